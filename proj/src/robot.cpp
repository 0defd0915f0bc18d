#include "iosmp/robot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iosmp::robot
{
using geometry::Capsule;
using geometry::Segment;

namespace
{
constexpr double kDegenerate = 1e-30;

// Fixed-size twins of geometry::closestSegmentPoint / closestSegmentSegment, same arithmetic,
// for the arm's per-pose loops where the dynamic versions' allocations dominate.
double pointSegment3(const Eigen::Vector3d &a, const Eigen::Vector3d &b, const Eigen::Vector3d &p)
{
    const Eigen::Vector3d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > kDegenerate ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

double segmentSegment3(const Eigen::Vector3d &a1, const Eigen::Vector3d &b1, const Eigen::Vector3d &a2,
                       const Eigen::Vector3d &b2)
{
    const Eigen::Vector3d d1 = b1 - a1;
    const Eigen::Vector3d d2 = b2 - a2;
    const Eigen::Vector3d r = a1 - a2;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0;
    double t = 0.0;
    if (a <= kDegenerate && e <= kDegenerate)
    {
    }
    else if (a <= kDegenerate)
    {
        t = std::clamp(f / e, 0.0, 1.0);
    }
    else
    {
        const double c = d1.dot(r);
        if (e <= kDegenerate)
        {
            s = std::clamp(-c / a, 0.0, 1.0);
        }
        else
        {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            if (denom > 1e-14 * a * e)
                s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            t = (b * s + f) / e;
            if (t < 0.0)
            {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            }
            else if (t > 1.0)
            {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((a1 + s * d1) - (a2 + t * d2)).norm();
}

struct Capsule3
{
    Eigen::Vector3d a;
    Eigen::Vector3d b;
    double radius;
};

void poseCapsules(const SerialArmModel &arm, const ArmPose &pose, std::vector<Capsule3> &out)
{
    out.clear();
    for (const auto &b : arm.bodies())
        out.push_back({pose.toWorld(b.link, b.a), pose.toWorld(b.link, b.b), b.radius});
}
}  // namespace

SerialArmModel::SerialArmModel(std::vector<Joint> joints, std::vector<Body> bodies, std::size_t eeLink,
                               Eigen::Vector3d eePoint, Eigen::Vector3d base)
    : joints_(std::move(joints)), bodies_(std::move(bodies)), eeLink_(eeLink), eePoint_(std::move(eePoint)),
      base_(std::move(base))
{
    if (joints_.empty())
        throw InputError("arm needs at least one joint");
    const auto n = joints_.size();
    bounds_.lower.resize(static_cast<Eigen::Index>(n));
    bounds_.upper.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
    {
        auto &j = joints_[i];
        const double len = j.axis.norm();
        if (!(len > 1e-12))
            throw InputError("joint " + std::to_string(i + 1) + ": axis must be non-zero");
        j.axis /= len;
        if (!(j.lower < j.upper))
            throw InputError("joint " + std::to_string(i + 1) + ": limits must satisfy lower < upper");
        bounds_.lower[static_cast<Eigen::Index>(i)] = j.lower;
        bounds_.upper[static_cast<Eigen::Index>(i)] = j.upper;
    }
    for (std::size_t i = 0; i < bodies_.size(); ++i)
    {
        if (bodies_[i].link > n)
            throw InputError("body " + std::to_string(i) + ": link index out of range");
        if (!(bodies_[i].radius > 0.0))
            throw InputError("body " + std::to_string(i) + ": radius must be positive");
    }
    if (eeLink_ > n)
        throw InputError("end effector link index out of range");
    for (std::size_t i = 0; i < bodies_.size(); ++i)
        for (std::size_t j = i + 2; j < bodies_.size(); ++j)
            selfPairs_.emplace_back(i, j);
}

ArmPose SerialArmModel::pose(const Config &q) const
{
    if (static_cast<std::size_t>(q.size()) != joints_.size())
        throw InputError("forwardKinematics: expected " + std::to_string(joints_.size()) + " joint values, got " +
                         std::to_string(q.size()));
    ArmPose pose;
    const auto n = joints_.size();
    pose.rotation.resize(n + 1);
    pose.position.resize(n + 1);
    pose.jointAxis.resize(n);
    pose.rotation[0].setIdentity();
    pose.position[0] = base_;
    for (std::size_t k = 0; k < n; ++k)
    {
        const auto &j = joints_[k];
        pose.position[k + 1] = pose.position[k] + pose.rotation[k] * j.offset;
        pose.jointAxis[k] = pose.rotation[k] * j.axis;
        pose.rotation[k + 1] = pose.rotation[k] * Eigen::AngleAxisd(q[static_cast<Eigen::Index>(k)], j.axis);
    }
    return pose;
}

Eigen::Vector3d SerialArmModel::endEffector(const Config &q) const
{
    return pose(q).toWorld(eeLink_, eePoint_);
}

Eigen::MatrixXd SerialArmModel::pointJacobian(const ArmPose &pose, std::size_t link,
                                              const Eigen::Vector3d &world) const
{
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3, static_cast<Eigen::Index>(dim()));
    for (std::size_t k = 0; k < link; ++k)
        jac.col(static_cast<Eigen::Index>(k)) = pose.jointAxis[k].cross(world - pose.position[k + 1]);
    return jac;
}

void SerialArmModel::accumulatePointGradient(const ArmPose &pose, std::size_t link, const Eigen::Vector3d &world,
                                             const Eigen::Vector3d &g, Vec &out) const
{
    for (std::size_t k = 0; k < link; ++k)
        out[static_cast<Eigen::Index>(k)] += pose.jointAxis[k].dot((world - pose.position[k + 1]).cross(g));
}

SerialArmModel defaultSevenDofArm()
{
    std::vector<Joint> joints;
    std::vector<Body> bodies;
    constexpr double kLink = 0.2;
    for (std::size_t k = 0; k < 7; ++k)
    {
        Joint j;
        j.axis = (k % 2 == 0) ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitY();
        j.offset = k == 0 ? Eigen::Vector3d::Zero() : Eigen::Vector3d(0.0, 0.0, kLink);
        j.lower = -2.8;
        j.upper = 2.8;
        joints.push_back(j);
        bodies.push_back(Body{k + 1, Eigen::Vector3d::Zero(), Eigen::Vector3d(0.0, 0.0, kLink), 0.05});
    }
    return SerialArmModel(std::move(joints), std::move(bodies), 7, Eigen::Vector3d(0.0, 0.0, kLink));
}

std::size_t dimOf(const RobotModel &model)
{
    return std::visit([](const auto &m) { return m.dim(); }, model);
}

const Bounds &boundsOf(const RobotModel &model)
{
    if (const auto *p = std::get_if<PointRobotModel>(&model))
        return p->bounds;
    return std::get<SerialArmModel>(model).bounds();
}

std::vector<Capsule> forwardKinematics(const SerialArmModel &model, const Config &q)
{
    const ArmPose pose = model.pose(q);
    std::vector<Capsule> out;
    out.reserve(model.bodies().size());
    for (const auto &b : model.bodies())
        out.push_back(Capsule{Segment{pose.toWorld(b.link, b.a), pose.toWorld(b.link, b.b)}, b.radius});
    return out;
}

Vec endEffector(const RobotModel &model, const Config &q)
{
    if (const auto *arm = std::get_if<SerialArmModel>(&model))
        return arm->endEffector(q);
    return q;
}

Eigen::MatrixXd endEffectorJacobian(const RobotModel &model, const Config &q)
{
    if (const auto *arm = std::get_if<SerialArmModel>(&model))
    {
        const ArmPose pose = arm->pose(q);
        return arm->pointJacobian(pose, arm->endEffectorLink(), pose.toWorld(arm->endEffectorLink(), arm->endEffectorPoint()));
    }
    return Eigen::MatrixXd::Identity(q.size(), q.size());
}

const char *toString(ConstraintKind kind)
{
    switch (kind)
    {
        case ConstraintKind::Obstacle:
            return "obstacle";
        case ConstraintKind::SelfCollision:
            return "self_collision";
        case ConstraintKind::JointLower:
            return "joint_lower";
        case ConstraintKind::JointUpper:
            return "joint_upper";
        case ConstraintKind::GoalRegion:
            return "goal_region";
    }
    return "unknown";
}

std::vector<ConstraintTerm> jointLimitValues(const SerialArmModel &model, const Config &q)
{
    if (static_cast<std::size_t>(q.size()) != model.dim())
        throw InputError("jointLimitValues: configuration dimension mismatch");
    std::vector<ConstraintTerm> out;
    out.reserve(2 * model.dim());
    const auto n = static_cast<Eigen::Index>(model.dim());
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto &j = model.joints()[static_cast<std::size_t>(i)];
        ConstraintTerm lo{ConstraintKind::JointLower, static_cast<std::size_t>(i), 0, q[i] - j.lower, Vec::Unit(n, i), {}};
        ConstraintTerm hi{ConstraintKind::JointUpper, static_cast<std::size_t>(i), 0, j.upper - q[i], -Vec::Unit(n, i), {}};
        out.push_back(std::move(lo));
        out.push_back(std::move(hi));
    }
    return out;
}

ConstraintEvaluator::ConstraintEvaluator(RobotModel robot, std::vector<geometry::ObstaclePrimitive> obstacles,
                                         CheckOptions options)
    : robot_(std::move(robot)), obstacles_(std::move(obstacles)), options_(options)
{
    const auto workspaceDim = isArm() ? Eigen::Index{3} : static_cast<Eigen::Index>(dim());
    for (std::size_t i = 0; i < obstacles_.size(); ++i)
    {
        geometry::validate(obstacles_[i]);
        if (geometry::dimOf(obstacles_[i]) != workspaceDim)
            throw InputError("obstacle " + std::to_string(i) + ": dimension " +
                             std::to_string(geometry::dimOf(obstacles_[i])) + " does not match the space (" +
                             std::to_string(workspaceDim) + ")");
    }
    if (options_.minResolution < 1 || !(options_.resolutionStep > 0.0))
        throw InputError("collision checking resolution must be positive");
    if (isArm())
        for (const auto &o : obstacles_)
        {
            if (const auto *h = std::get_if<geometry::Hypersphere>(&o))
                obstacles3_.push_back({h->center, h->center, h->radius, true, h->center, 0.0});
            else
            {
                const auto &c = std::get<Capsule>(o);
                obstacles3_.push_back({c.axis.a, c.axis.b, c.radius, false, 0.5 * (c.axis.a + c.axis.b),
                                       0.5 * (c.axis.b - c.axis.a).norm()});
            }
        }
}

std::size_t ConstraintEvaluator::edgeTermCount() const
{
    if (const auto *arm = std::get_if<SerialArmModel>(&robot_))
        return arm->bodies().size() * obstacles_.size() + arm->selfCollisionPairs().size();
    return obstacles_.size();
}

int ConstraintEvaluator::defaultResolution(const Config &q0, const Config &q1) const
{
    if (!isArm())
        return 1;
    const double steps = std::ceil((q1 - q0).norm() / options_.resolutionStep);
    return std::max(options_.minResolution, static_cast<int>(std::min(steps, 1e6)));
}

void ConstraintEvaluator::edgeConstraintValues(const Config &q0, const Config &q1, int resolution, bool withGradient,
                                               std::vector<ConstraintTerm> &out,
                                               const GradientFilter &needGradient) const
{
    if (static_cast<std::size_t>(q0.size()) != dim() || static_cast<std::size_t>(q1.size()) != dim())
        throw InputError("edgeConstraintValues: configuration dimension mismatch");
    if (const auto *arm = std::get_if<SerialArmModel>(&robot_))
        armEdge(*arm, q0, q1, std::max(resolution, 1), withGradient, needGradient, out);
    else
        pointEdge(q0, q1, withGradient, out);
}

std::vector<ConstraintTerm> ConstraintEvaluator::edgeConstraintValues(const Config &q0, const Config &q1,
                                                                      int resolution, bool withGradient) const
{
    std::vector<ConstraintTerm> out;
    out.reserve(edgeTermCount());
    edgeConstraintValues(q0, q1, resolution, withGradient, out);
    return out;
}

void ConstraintEvaluator::pointEdge(const Config &q0, const Config &q1, bool withGradient,
                                    std::vector<ConstraintTerm> &out) const
{
    const Segment edge{q0, q1};
    const auto d = q0.size();
    for (std::size_t i = 0; i < obstacles_.size(); ++i)
    {
        const auto c = geometry::clearance(edge, obstacles_[i], withGradient);
        ConstraintTerm term{ConstraintKind::Obstacle, i, 0, toForm(c), {}, {}};
        if (withGradient)
        {
            const Vec &g = options_.form == ClearanceForm::SignedSquared ? c.gradient : c.distanceGradient;
            term.gradFrom = g.head(d);
            term.gradTo = g.tail(d);
        }
        out.push_back(std::move(term));
    }
}

void ConstraintEvaluator::armEdge(const SerialArmModel &arm, const Config &q0, const Config &q1, int resolution,
                                  bool withGradient, const GradientFilter &needGradient,
                                  std::vector<ConstraintTerm> &out) const
{
    const auto &bodies = arm.bodies();
    const auto &pairs = arm.selfCollisionPairs();
    const std::size_t nObstacleTerms = bodies.size() * obstacles_.size();
    const std::size_t nTerms = nObstacleTerms + pairs.size();

    std::vector<double> best(nTerms, std::numeric_limits<double>::infinity());
    std::vector<int> argmin(nTerms, 0);
    std::vector<ArmPose> poses;
    poses.reserve(static_cast<std::size_t>(resolution) + 1);
    std::vector<Capsule3> caps;
    const bool squaredForm = options_.form == ClearanceForm::SignedSquared;
    auto form = [squaredForm](double delta) { return squaredForm ? geometry::signedSquare(delta) : delta; };

    for (int j = 0; j <= resolution; ++j)
    {
        const double s = static_cast<double>(j) / resolution;
        const Config q = (1.0 - s) * q0 + s * q1;
        poses.push_back(arm.pose(q));
        poseCapsules(arm, poses.back(), caps);

        std::size_t t = 0;
        for (std::size_t bi = 0; bi < bodies.size(); ++bi)
        {
            for (std::size_t oi = 0; oi < obstacles3_.size(); ++oi, ++t)
            {
                const auto &o = obstacles3_[oi];
                const double core = o.sphere ? pointSegment3(caps[bi].a, caps[bi].b, o.a)
                                             : segmentSegment3(caps[bi].a, caps[bi].b, o.a, o.b);
                const double v = form(core - (o.radius + caps[bi].radius));
                if (v < best[t])
                {
                    best[t] = v;
                    argmin[t] = j;
                }
            }
        }
        for (const auto &[i, k] : pairs)
        {
            const double core = segmentSegment3(caps[i].a, caps[i].b, caps[k].a, caps[k].b);
            const double v = form(core - (caps[i].radius + caps[k].radius));
            if (v < best[t])
            {
                best[t] = v;
                argmin[t] = j;
            }
            ++t;
        }
    }

    const auto n = static_cast<Eigen::Index>(arm.dim());
    const bool squared = options_.form == ClearanceForm::SignedSquared;
    for (std::size_t t = 0; t < nTerms; ++t)
    {
        ConstraintTerm term;
        term.value = best[t];
        if (t < nObstacleTerms)
        {
            term.kind = ConstraintKind::Obstacle;
            term.body = t / obstacles_.size();
            term.index = t % obstacles_.size();
        }
        else
        {
            term.kind = ConstraintKind::SelfCollision;
            term.index = t - nObstacleTerms;
        }
        if (withGradient && needGradient && !needGradient(t, term.value))
        {
            term.gradFrom = Vec::Zero(n);
            term.gradTo = Vec::Zero(n);
        }
        else if (withGradient)
        {
            const int j = argmin[t];
            const double s = static_cast<double>(j) / resolution;
            const ArmPose &pose = poses[static_cast<std::size_t>(j)];
            auto capsuleAt = [&](std::size_t bi) {
                const auto &b = bodies[bi];
                return Capsule{Segment{pose.toWorld(b.link, b.a), pose.toWorld(b.link, b.b)}, b.radius};
            };
            Vec g = Vec::Zero(n);
            if (term.kind == ConstraintKind::Obstacle)
            {
                const auto cap = capsuleAt(term.body);
                const auto c = geometry::clearance(cap.axis, obstacles_[term.index], true, cap.radius);
                const Vec &dg = squared ? c.gradient : c.distanceGradient;
                const std::size_t link = bodies[term.body].link;
                arm.accumulatePointGradient(pose, link, cap.axis.a, dg.segment<3>(0), g);
                arm.accumulatePointGradient(pose, link, cap.axis.b, dg.segment<3>(3), g);
            }
            else
            {
                const auto [i, k] = pairs[term.index];
                const auto ci = capsuleAt(i);
                const auto ck = capsuleAt(k);
                const auto c = geometry::capsuleClearance(ci.axis, ci.radius, ck.axis, ck.radius, true);
                const Vec &dg = squared ? c.gradient : c.distanceGradient;
                arm.accumulatePointGradient(pose, bodies[i].link, ci.axis.a, dg.segment<3>(0), g);
                arm.accumulatePointGradient(pose, bodies[i].link, ci.axis.b, dg.segment<3>(3), g);
                arm.accumulatePointGradient(pose, bodies[k].link, ck.axis.a, dg.segment<3>(6), g);
                arm.accumulatePointGradient(pose, bodies[k].link, ck.axis.b, dg.segment<3>(9), g);
            }
            term.gradFrom = (1.0 - s) * g;
            term.gradTo = s * g;
        }
        out.push_back(std::move(term));
    }
}

std::vector<ConstraintTerm> ConstraintEvaluator::jointLimitValues(const Config &q) const
{
    if (const auto *arm = std::get_if<SerialArmModel>(&robot_))
        return robot::jointLimitValues(*arm, q);
    return {};
}

EdgeReport ConstraintEvaluator::edgeReport(const Config &q0, const Config &q1, int resolution) const
{
    EdgeReport report;
    report.minValue = std::numeric_limits<double>::infinity();
    auto consider = [&report](const ConstraintTerm &t) {
        if (t.value < report.minValue || std::isnan(t.value))
        {
            report.minValue = t.value;
            report.kind = t.kind;
            report.index = t.index;
            report.body = t.body;
        }
    };
    std::vector<ConstraintTerm> terms;
    terms.reserve(edgeTermCount());
    edgeConstraintValues(q0, q1, resolution, false, terms);
    for (const auto &t : terms)
        consider(t);
    for (const auto &t : jointLimitValues(q0))
        consider(t);
    for (const auto &t : jointLimitValues(q1))
        consider(t);
    return report;
}

bool ConstraintEvaluator::configValid(const Config &q) const
{
    if (static_cast<std::size_t>(q.size()) != dim() || !q.allFinite())
        return false;
    if (const auto *arm = std::get_if<SerialArmModel>(&robot_))
        return armEdgeValid(*arm, q, q, 0);
    return edgeReport(q, q, 1).minValue >= -options_.tolerance;
}

bool ConstraintEvaluator::edgeValid(const Config &q0, const Config &q1, int resolutionScale) const
{
    if (!q0.allFinite() || !q1.allFinite())
        return false;
    const int res = defaultResolution(q0, q1) * std::max(resolutionScale, 1);
    if (const auto *arm = std::get_if<SerialArmModel>(&robot_))
    {
        if (static_cast<std::size_t>(q0.size()) != dim() || static_cast<std::size_t>(q1.size()) != dim())
            throw InputError("edgeValid: configuration dimension mismatch");
        return armEdgeValid(*arm, q0, q1, res);
    }
    return edgeReport(q0, q1, res).minValue >= -options_.tolerance;
}

bool ConstraintEvaluator::armEdgeValid(const SerialArmModel &arm, const Config &q0, const Config &q1,
                                       int resolution) const
{
    const double tol = options_.tolerance;
    const bool squaredForm = options_.form == ClearanceForm::SignedSquared;
    auto ok = [&](double delta) { return (squaredForm ? geometry::signedSquare(delta) : delta) >= -tol; };

    for (const Config *q : {&q0, &q1})
        for (Eigen::Index i = 0; i < q->size(); ++i)
        {
            const auto &j = arm.joints()[static_cast<std::size_t>(i)];
            if (!((*q)[i] - j.lower >= -tol) || !(j.upper - (*q)[i] >= -tol))
                return false;
        }

    // Coarse-to-fine pose order finds a collision in the middle of an edge early.
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(resolution) + 1);
    order.push_back(0);
    if (resolution > 0)
        order.push_back(resolution);
    for (int stride = resolution; stride > 1; stride = (stride + 1) / 2)
    {
        const int half = stride / 2;
        for (int j = half; j < resolution; j += stride)
            if (std::find(order.begin(), order.end(), j) == order.end())
                order.push_back(j);
        if (stride == 2)
            break;
    }
    for (int j = 1; j < resolution; ++j)
        if (std::find(order.begin(), order.end(), j) == order.end())
            order.push_back(j);

    const auto &bodies = arm.bodies();
    std::vector<Capsule3> caps;
    std::vector<Eigen::Vector3d> mid;
    std::vector<double> reach;
    for (int j : order)
    {
        const double s = resolution > 0 ? static_cast<double>(j) / resolution : 0.0;
        const Config q = (1.0 - s) * q0 + s * q1;
        poseCapsules(arm, arm.pose(q), caps);
        for (std::size_t bi = 0; bi < bodies.size(); ++bi)
        {
            const auto &c = caps[bi];
            const double half = 0.5 * (c.b - c.a).norm();
            const Eigen::Vector3d m = 0.5 * (c.a + c.b);
            for (const auto &o : obstacles3_)
            {
                // Bounding spheres that do not touch cannot produce a negative clearance.
                if ((m - o.center).norm() - half - o.half - c.radius - o.radius > 0.0)
                    continue;
                const double core = o.sphere ? pointSegment3(c.a, c.b, o.a) : segmentSegment3(c.a, c.b, o.a, o.b);
                if (!ok(core - (o.radius + c.radius)))
                    return false;
            }
        }
        for (const auto &[i, k] : arm.selfCollisionPairs())
        {
            const double core = segmentSegment3(caps[i].a, caps[i].b, caps[k].a, caps[k].b);
            if (!ok(core - (caps[i].radius + caps[k].radius)))
                return false;
        }
    }
    return true;
}
}  // namespace iosmp::robot
