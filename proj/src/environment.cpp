#include "iosmp/environment.hpp"

#include <cmath>

#include "iosmp/rng.hpp"

namespace iosmp
{
namespace
{
constexpr int kMaxAttempts = 10000;

bool hasDim(const Vec &v, std::size_t d)
{
    return static_cast<std::size_t>(v.size()) == d;
}
}  // namespace

void validateScenario(const Scenario &s)
{
    const auto d = s.dim();
    if (!hasDim(s.start, d) || !s.start.allFinite())
        throw InputError("start must be a finite " + std::to_string(d) + "-vector");
    const auto &bounds = robot::boundsOf(s.robot);
    for (Eigen::Index i = 0; i < bounds.lower.size(); ++i)
        if (!(bounds.lower[i] < bounds.upper[i]))
            throw InputError("bounds must satisfy lo < hi on axis " + std::to_string(i));
    const auto eval = s.evaluator();
    if (!eval.configValid(s.start))
        throw InputError("start configuration is in collision or outside its limits");
    if (const auto *g = std::get_if<SingleConfigGoal>(&s.goal))
    {
        if (!hasDim(g->q, d) || !g->q.allFinite())
            throw InputError("goal must be a finite " + std::to_string(d) + "-vector");
        if (!eval.configValid(g->q))
            throw InputError("goal configuration is in collision or outside its limits");
        if (g->q == s.start)
            throw InputError("start and goal coincide");
    }
    else
    {
        const auto &r = std::get<WorkspaceRegionGoal>(s.goal);
        const auto wd = robot::endEffector(s.robot, s.start).size();
        if (r.center.size() != wd || !r.center.allFinite())
            throw InputError("goal region center must be a finite " + std::to_string(wd) + "-vector");
        if (!(r.radius > 0.0))
            throw InputError("goal region radius must be positive");
        if (isGoalConfig(s, s.start))
            throw InputError("start already lies in the goal region");
    }
}

Scenario emptyBox(int dim, std::uint64_t seed)
{
    if (dim < 1)
        throw InputError("dimension must be positive");
    Scenario s;
    s.robot = robot::PointRobotModel{{Vec::Zero(dim), Vec::Ones(dim)}};
    s.start = Vec::Constant(dim, 0.5);
    s.start[dim - 1] = 0.0;
    Vec goal = Vec::Constant(dim, 0.5);
    goal[dim - 1] = 1.0;
    s.goal = SingleConfigGoal{goal};
    s.seed = seed;
    return s;
}

Scenario generateRandomEnv(const RandomEnvParams &params)
{
    if (params.dim < 2 || params.dim > 8)
        throw InputError("dimension must be in [2, 8]");
    if (params.obstacleCount < 0)
        throw InputError("obstacle count must be non-negative");
    if (!(params.radiusMin > 0.0) || !(params.radiusMin <= params.radiusMax) || !(params.radiusMax < 0.5))
        throw InputError("radius range must satisfy 0 < min <= max < 0.5");

    Scenario s = emptyBox(params.dim, params.seed);
    const Vec &goal = std::get<SingleConfigGoal>(s.goal).q;
    Rng rng = Rng::stream(params.seed, StreamId::Environment);
    for (int i = 0; i < params.obstacleCount; ++i)
    {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt)
        {
            Vec center(params.dim);
            for (int k = 0; k < params.dim; ++k)
                center[k] = rng.uniform();
            const double radius = rng.uniform(params.radiusMin, params.radiusMax);
            if ((center - s.start).norm() <= radius || (center - goal).norm() <= radius)
                continue;
            s.obstacles.emplace_back(geometry::Hypersphere{std::move(center), radius});
            placed = true;
        }
        if (!placed)
            throw GenerationError("could not place obstacle " + std::to_string(i) + " after " +
                                  std::to_string(kMaxAttempts) + " attempts");
    }
    return s;
}

GoalRegionValue goalRegionConstraint(const Scenario &s, const Config &q, double radiusMargin)
{
    const auto *region = std::get_if<WorkspaceRegionGoal>(&s.goal);
    if (region == nullptr)
        throw UsageError("goalRegionConstraint requires a workspace region goal");
    const Vec ee = robot::endEffector(s.robot, q);
    const Vec diff = ee - region->center;
    const double r = region->radius - radiusMargin;
    GoalRegionValue out;
    out.value = r * r - diff.squaredNorm();
    out.gradient = -2.0 * robot::endEffectorJacobian(s.robot, q).transpose() * diff;
    return out;
}

bool isGoalConfig(const Scenario &s, const Config &q)
{
    if (const auto *g = std::get_if<SingleConfigGoal>(&s.goal))
        return g->q.size() == q.size() && g->q == q;
    const auto &region = std::get<WorkspaceRegionGoal>(s.goal);
    const Vec diff = robot::endEffector(s.robot, q) - region.center;
    return region.radius * region.radius - diff.squaredNorm() >= 0.0;
}

Scenario perturbGoalRegion(const Scenario &s, double halfWidth)
{
    const auto *region = std::get_if<WorkspaceRegionGoal>(&s.goal);
    if (region == nullptr)
        throw UsageError("perturbGoalRegion requires a workspace region goal");
    Scenario out = s;
    auto &moved = std::get<WorkspaceRegionGoal>(out.goal);
    Rng rng = Rng::stream(s.seed, StreamId::Perturbation);
    for (Eigen::Index k = 0; k < moved.center.size(); ++k)
        moved.center[k] += rng.uniform(-halfWidth, halfWidth);
    return out;
}
}  // namespace iosmp
