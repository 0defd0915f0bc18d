#include "iosmp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iosmp::optimizer
{
void OptimizerConfig::validate() const
{
    if (!(mu0 > 0.0))
        throw InputError("mu0 must be positive");
    if (!(muUp > 0.0 && muUp < 1.0))
        throw InputError("muUp must lie in (0, 1)");
    if (!(lambda0 >= 0.0))
        throw InputError("lambda0 must be non-negative");
    if (!(tau > 0.0) || !(tauInner > 0.0))
        throw InputError("tolerances must be positive");
    if (resolutionScale < 1)
        throw InputError("resolutionScale must be at least 1");
    if (maxOuter < 1 || maxInner < 1)
        throw InputError("iteration caps must be at least 1");
    if (waypoints < 2)
        throw InputError("paths need at least 2 waypoints");
    if (!(clearanceMargin >= 0.0))
        throw InputError("clearanceMargin must be non-negative");
    if (!(goalMargin >= 0.0))
        throw InputError("goal margin must be non-negative");
}

double psi(double gamma, double sigma, double mu)
{
    if (gamma - mu * sigma <= 0.0)
        return -sigma * gamma + gamma * gamma / (2.0 * mu);
    return -0.5 * mu * sigma * sigma;
}

double psiSlope(double gamma, double sigma, double mu)
{
    if (gamma - mu * sigma <= 0.0)
        return -sigma + gamma / mu;
    return 0.0;
}

ALState updateMultipliers(const ALState &state, const Vec &constraintValues)
{
    if (constraintValues.size() != state.lambda.size())
        throw InputError("updateMultipliers: constraint count does not match the multipliers");
    ALState next = state;
    for (Eigen::Index i = 0; i < next.lambda.size(); ++i)
        next.lambda[i] = std::max(state.lambda[i] - constraintValues[i] / state.mu, 0.0);
    next.mu = state.mu * state.muUp;
    return next;
}

namespace
{
robot::CheckOptions formOptions(const Scenario &s, const OptimizerConfig &config)
{
    auto options = s.checking;
    if (config.form)
        options.form = *config.form;
    return options;
}
}  // namespace

PathProblem::PathProblem(const Scenario &scenario, const OptimizerConfig &config)
    : scenario_(scenario),
      evaluator_(scenario.robot, scenario.obstacles, formOptions(scenario, config)),
      lastFree_(scenario.hasRegionGoal()),
      goalMargin_(config.goalMargin),
      clearanceMargin_(config.clearanceMargin),
      resolutionScale_(config.resolutionScale)
{
}

std::size_t PathProblem::freeWaypoints(const Path &p) const
{
    return p.size() - (lastFree_ ? 1 : 2);
}

Vec PathProblem::pack(const Path &p) const
{
    const auto d = static_cast<Eigen::Index>(scenario_.dim());
    Vec x(static_cast<Eigen::Index>(freeWaypoints(p)) * d);
    for (std::size_t i = 0; i < freeWaypoints(p); ++i)
        x.segment(static_cast<Eigen::Index>(i) * d, d) = p.waypoints[i + 1];
    return x;
}

void PathProblem::unpack(const Vec &x, Path &p) const
{
    const auto d = static_cast<Eigen::Index>(scenario_.dim());
    for (std::size_t i = 0; i < freeWaypoints(p); ++i)
        p.waypoints[i + 1] = x.segment(static_cast<Eigen::Index>(i) * d, d);
}

std::size_t PathProblem::constraintCount(const Path &p) const
{
    const std::size_t n = p.size();
    std::size_t count = (n - 1) * evaluator_.edgeTermCount();
    if (evaluator_.isArm())
        count += freeWaypoints(p) * 2 * evaluator_.dim();
    return count + (lastFree_ ? 1 : 0);
}

std::vector<PathConstraint> PathProblem::constraints(const Path &p, bool withGradient, const ALState *state) const
{
    std::vector<PathConstraint> out;
    out.reserve(constraintCount(p));
    std::vector<robot::ConstraintTerm> terms;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        terms.clear();
        const auto &q0 = p.waypoints[i];
        const auto &q1 = p.waypoints[i + 1];
        robot::ConstraintEvaluator::GradientFilter filter;
        if (state)
        {
            const std::size_t offset = out.size();
            filter = [&, offset](std::size_t t, double value) {
                const auto k = static_cast<Eigen::Index>(offset + t);
                return psiSlope(value - clearanceMargin_, state->lambda[k], state->mu) != 0.0;
            };
        }
        evaluator_.edgeConstraintValues(q0, q1, evaluator_.defaultResolution(q0, q1) * resolutionScale_, withGradient, terms,
                                        filter);
        for (auto &t : terms)
        {
            t.value -= clearanceMargin_;
            out.push_back({i, true, std::move(t)});
        }
    }
    const std::size_t lastFree = lastFree_ ? n - 1 : n - 2;
    for (std::size_t i = 1; i <= lastFree; ++i)
        for (auto &t : evaluator_.jointLimitValues(p.waypoints[i]))
            out.push_back({i, false, std::move(t)});
    if (lastFree_)
    {
        const auto g = goalRegionConstraint(scenario_, p.back(), goalMargin_);
        robot::ConstraintTerm t{robot::ConstraintKind::GoalRegion, 0, 0, g.value, g.gradient, {}};
        out.push_back({n - 1, false, std::move(t)});
    }
    return out;
}

Vec PathProblem::values(const std::vector<PathConstraint> &cs)
{
    Vec v(static_cast<Eigen::Index>(cs.size()));
    for (std::size_t i = 0; i < cs.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = cs[i].term.value;
    return v;
}

Vec PathProblem::values(const Path &p) const
{
    Vec out(static_cast<Eigen::Index>(constraintCount(p)));
    Eigen::Index k = 0;
    const std::size_t n = p.size();
    if (!evaluator_.isArm())
    {
        const auto &obstacles = evaluator_.obstacles();
        const bool squared = evaluator_.options().form == robot::ClearanceForm::SignedSquared;
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            const geometry::Segment edge{p.waypoints[i], p.waypoints[i + 1]};
            for (const auto &o : obstacles)
            {
                const auto c = geometry::clearance(edge, o);
                out[k++] = (squared ? c.value : c.distance) - clearanceMargin_;
            }
        }
    }
    else
    {
        std::vector<robot::ConstraintTerm> terms;
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            terms.clear();
            const auto &q0 = p.waypoints[i];
            const auto &q1 = p.waypoints[i + 1];
            evaluator_.edgeConstraintValues(q0, q1, evaluator_.defaultResolution(q0, q1) * resolutionScale_, false, terms);
            for (const auto &t : terms)
                out[k++] = t.value - clearanceMargin_;
        }
        const std::size_t lastFree = lastFree_ ? n - 1 : n - 2;
        for (std::size_t i = 1; i <= lastFree; ++i)
            for (const auto &t : evaluator_.jointLimitValues(p.waypoints[i]))
                out[k++] = t.value;
    }
    if (lastFree_)
        out[k++] = goalRegionConstraint(scenario_, p.back(), goalMargin_).value;
    return out;
}

Vec pathLengthGradient(const Path &p)
{
    // Segments shorter than a tiny fraction of the path are treated as zero length. Waypoints joined by them form a run whose
    // members all get the run's mean gradient: the minimum-norm subgradient of the kink, which
    // keeps descent from stalling when waypoints collapse onto each other.
    const double coincident = 1e-9 * pathLength(p);
    const auto d = p.front().size();
    const std::size_t n = p.size();
    Vec g = Vec::Zero(static_cast<Eigen::Index>(n) * d);
    std::size_t first = 0;
    while (first < n)
    {
        std::size_t last = first;
        while (last + 1 < n && (p.waypoints[last + 1] - p.waypoints[last]).norm() <= coincident)
            ++last;
        Vec sum = Vec::Zero(d);
        if (first > 0)
        {
            const Vec diff = p.waypoints[first] - p.waypoints[first - 1];
            sum += diff / diff.norm();
        }
        if (last + 1 < n)
        {
            const Vec diff = p.waypoints[last] - p.waypoints[last + 1];
            sum += diff / diff.norm();
        }
        sum /= static_cast<double>(last - first + 1);
        for (std::size_t i = first; i <= last; ++i)
            g.segment(static_cast<Eigen::Index>(i) * d, d) = sum;
        first = last + 1;
    }
    return g;
}

ALValue augmentedLagrangian(const PathProblem &problem, const Path &p, const ALState &state, bool withGradient)
{
    if (static_cast<Eigen::Index>(problem.constraintCount(p)) != state.lambda.size())
        throw InputError("augmentedLagrangian: constraint count does not match the multipliers");
    ALValue out;
    std::vector<PathConstraint> cs;
    if (withGradient)
    {
        cs = problem.constraints(p, true, &state);
        out.constraints = PathProblem::values(cs);
    }
    else
    {
        out.constraints = problem.values(p);
    }
    out.value = pathLength(p);
    for (Eigen::Index i = 0; i < out.constraints.size(); ++i)
        out.value += psi(out.constraints[i], state.lambda[i], state.mu);
    if (!withGradient)
        return out;

    Vec full = pathLengthGradient(p);
    const auto d = p.front().size();
    for (std::size_t i = 0; i < cs.size(); ++i)
    {
        const double slope = psiSlope(cs[i].term.value, state.lambda[static_cast<Eigen::Index>(i)], state.mu);
        if (slope == 0.0)
            continue;
        const auto w = static_cast<Eigen::Index>(cs[i].waypoint);
        full.segment(w * d, d) += slope * cs[i].term.gradFrom;
        if (cs[i].edge)
            full.segment((w + 1) * d, d) += slope * cs[i].term.gradTo;
    }
    out.gradient = full.segment(d, static_cast<Eigen::Index>(problem.freeWaypoints(p)) * d);
    return out;
}

InnerResult innerMinimize(const PathProblem &problem, const Path &p, const ALState &state,
                          const OptimizerConfig &config, const StopCheck &stop)
{
    constexpr double kArmijo = 1e-4;
    constexpr double kBacktrack = 0.5;
    constexpr double kMinStep = 1e-12;

    InnerResult result;
    result.path = p;
    auto current = augmentedLagrangian(problem, result.path, state, true);
    result.history.push_back(current.value);
    Path candidate = p;
    while (true)
    {
        result.value = current.value;
        result.gradientNorm = current.gradient.norm();
        if (result.gradientNorm <= config.tauInner || result.steps >= config.maxInner || (stop && stop()))
            break;
        const Vec x = problem.pack(result.path);
        const double slope = current.gradient.squaredNorm();
        bool accepted = false;
        for (double step = 1.0; step >= kMinStep; step *= kBacktrack)
        {
            problem.unpack(x - step * current.gradient, candidate);
            const double trial = augmentedLagrangian(problem, candidate, state, false).value;
            if (std::isfinite(trial) && trial <= current.value - kArmijo * step * slope)
            {
                accepted = true;
                break;
            }
        }
        if (!accepted)
        {
            result.stalled = true;
            break;
        }
        result.path = candidate;
        current = augmentedLagrangian(problem, result.path, state, true);
        result.history.push_back(current.value);
        ++result.steps;
    }
    return result;
}

PathCheck checkPath(const Scenario &scenario, const Path &p, int resolutionScale)
{
    PathCheck out;
    out.minConstraint = std::numeric_limits<double>::infinity();
    if (p.size() < 2)
        return out;
    const auto eval = scenario.evaluator();
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
    {
        const auto &q0 = p.waypoints[i];
        const auto &q1 = p.waypoints[i + 1];
        if (!q0.allFinite() || !q1.allFinite())
        {
            out.minConstraint = -std::numeric_limits<double>::infinity();
            out.worstEdge = i;
            return out;
        }
        const auto report = eval.edgeReport(q0, q1, eval.defaultResolution(q0, q1) * std::max(resolutionScale, 1));
        if (report.minValue < out.minConstraint)
        {
            out.minConstraint = report.minValue;
            out.worstEdge = i;
        }
    }
    bool endpoints = p.front() == scenario.start;
    if (const auto *g = std::get_if<SingleConfigGoal>(&scenario.goal))
        endpoints = endpoints && p.back() == g->q;
    else
        endpoints = endpoints && isGoalConfig(scenario, p.back());
    out.valid = endpoints && out.minConstraint >= -scenario.checking.tolerance;
    return out;
}

OptimizeResult optimize(const Path &p0, const Scenario &scenario, const OptimizerConfig &config,
                        const StopCheck &stop)
{
    config.validate();
    if (p0.size() < 2)
        throw InputError("optimize needs a path of at least 2 waypoints");
    const PathProblem problem(scenario, config);

    OptimizeResult result;
    Path p = p0.size() == config.waypoints ? p0 : resampleByArclength(p0, config.waypoints);
    ALState state;
    state.lambda = Vec::Constant(static_cast<Eigen::Index>(problem.constraintCount(p)), config.lambda0);
    state.mu = config.mu0;
    state.muUp = config.muUp;

    for (int k = 0; k < config.maxOuter; ++k)
    {
        if (stop && stop())
        {
            result.interrupted = true;
            break;
        }
        auto inner = innerMinimize(problem, p, state, config, stop);
        p = std::move(inner.path);
        result.innerSteps += inner.steps;
        ++result.iterations;
        if (stop && stop())
        {
            result.interrupted = true;
            break;
        }
        const auto g = augmentedLagrangian(problem, p, state, false).constraints;
        state = updateMultipliers(state, g);
        if (augmentedLagrangian(problem, p, state, true).gradient.norm() < config.tau)
        {
            result.converged = true;
            break;
        }
    }

    const auto check = checkPath(scenario, p);
    result.feasible = check.valid;
    result.minConstraint = check.minConstraint;
    result.finalCost = pathLength(p);
    result.path = std::move(p);
    return result;
}
}  // namespace iosmp::optimizer
