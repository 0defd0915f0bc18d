#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "iosmp/environment.hpp"
#include "iosmp/path.hpp"

namespace iosmp::optimizer
{
struct OptimizerConfig
{
    double mu0{1.0};
    double muUp{0.5};
    double lambda0{0.0};
    double tau{1e-4};
    double tauInner{1e-5};
    int maxOuter{20};
    int maxInner{200};
    std::size_t waypoints{20};
    /// Clearance composition used inside the augmented Lagrangian. The squared form has a zero
    /// gradient at contact, so the multipliers cannot pin a constraint at exactly zero and
    /// solutions stall at a visible penetration; plain signed distance does not. Unset means the
    /// scenario's checking form.
    std::optional<robot::ClearanceForm> form{robot::ClearanceForm::SignedDistance};
    /// The goal-region constraint uses radius - goalMargin so the result stays strictly inside.
    double goalMargin{1e-4};
    /// Subtracted from every obstacle and self-collision value (in the units of `form`), so the
    /// optimizer aims for that much slack instead of stopping at contact.
    double clearanceMargin{0.0};
    /// Multiplies the arm edge discretization used inside the optimizer. Poses between the
    /// optimizer's samples are unconstrained, so a coarse grid lets thin obstacles slip through.
    int resolutionScale{1};

    void validate() const;
};

/// Penalty for one inequality constraint with value gamma, multiplier sigma and weight mu.
double psi(double gamma, double sigma, double mu);
/// d psi / d gamma.
double psiSlope(double gamma, double sigma, double mu);

struct ALState
{
    Vec lambda;
    double mu{1.0};
    double muUp{0.5};
};

/// lambda_i <- max(lambda_i - g_i / mu, 0), then mu <- mu * muUp.
ALState updateMultipliers(const ALState &state, const Vec &constraintValues);

/// A constraint of the path problem: an edge term touching waypoints (waypoint, waypoint + 1)
/// or a waypoint term touching only `waypoint`.
struct PathConstraint
{
    std::size_t waypoint{0};
    bool edge{false};
    robot::ConstraintTerm term;
};

/// Inequality constraints and free variables for a fixed-topology path in one scenario.
/// Interior waypoints are free; the last one is also free for workspace-region goals.
class PathProblem
{
public:
    PathProblem(const Scenario &scenario, const OptimizerConfig &config);

    const Scenario &scenario() const
    {
        return scenario_;
    }
    const robot::ConstraintEvaluator &evaluator() const
    {
        return evaluator_;
    }
    bool lastFree() const
    {
        return lastFree_;
    }

    std::size_t freeWaypoints(const Path &p) const;
    Vec pack(const Path &p) const;
    /// Writes x into the free waypoints of `p`.
    void unpack(const Vec &x, Path &p) const;

    /// With `state`, gradients are only computed for terms whose penalty slope is nonzero.
    std::vector<PathConstraint> constraints(const Path &p, bool withGradient, const ALState *state = nullptr) const;
    static Vec values(const std::vector<PathConstraint> &cs);
    /// Same values as constraints(p, false), without building the terms.
    Vec values(const Path &p) const;
    std::size_t constraintCount(const Path &p) const;

private:
    Scenario scenario_;
    robot::ConstraintEvaluator evaluator_;
    bool lastFree_;
    double goalMargin_;
    double clearanceMargin_;
    int resolutionScale_;
};

struct ALValue
{
    double value{0.0};
    Vec gradient;        ///< over the packed free variables
    Vec constraints;     ///< g_i(p)
};

ALValue augmentedLagrangian(const PathProblem &problem, const Path &p, const ALState &state, bool withGradient = true);

/// Gradient of pathLength with respect to every waypoint, stacked.
Vec pathLengthGradient(const Path &p);

struct InnerResult
{
    Path path;
    double value{0.0};
    double gradientNorm{0.0};
    int steps{0};
    bool stalled{false};
    /// L_A after each accepted step, starting with the initial value.
    std::vector<double> history;
};

/// Checked between descent steps; returning true ends the optimization early.
using StopCheck = std::function<bool()>;

InnerResult innerMinimize(const PathProblem &problem, const Path &p, const ALState &state,
                          const OptimizerConfig &config, const StopCheck &stop = {});

struct OptimizeResult
{
    Path path;
    bool converged{false};
    bool feasible{false};
    double finalCost{0.0};
    int iterations{0};
    int innerSteps{0};
    /// Smallest checker constraint value along the result.
    double minConstraint{0.0};
    bool interrupted{false};
};

/// Augmented Lagrangian path optimization. Paths of a different length are first resampled by
/// arclength to `config.waypoints`. Infeasible results are reported, not thrown.
OptimizeResult optimize(const Path &p0, const Scenario &scenario, const OptimizerConfig &config = {},
                        const StopCheck &stop = {});

/// Re-validates every edge and both endpoints with the scenario's checker at `resolutionScale`
/// times the default resolution. Returns the smallest constraint value seen.
struct PathCheck
{
    bool valid{false};
    double minConstraint{0.0};
    std::size_t worstEdge{0};
};
PathCheck checkPath(const Scenario &scenario, const Path &p, int resolutionScale = 1);
}  // namespace iosmp::optimizer
