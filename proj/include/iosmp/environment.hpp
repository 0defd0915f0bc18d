#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iosmp/geometry.hpp"
#include "iosmp/robot.hpp"

namespace iosmp
{
struct SingleConfigGoal
{
    Config q;
};

/// End effector must lie inside a workspace sphere.
struct WorkspaceRegionGoal
{
    Vec center;
    double radius{0.0};
};

using GoalSpec = std::variant<SingleConfigGoal, WorkspaceRegionGoal>;

struct Scenario
{
    robot::RobotModel robot;
    /// Arm model file the robot was loaded from, kept so the scenario writes back as a reference.
    std::string armFile;
    std::vector<geometry::ObstaclePrimitive> obstacles;
    Config start;
    GoalSpec goal;
    std::uint64_t seed{0};
    robot::CheckOptions checking;

    std::size_t dim() const
    {
        return robot::dimOf(robot);
    }
    bool hasRegionGoal() const
    {
        return std::holds_alternative<WorkspaceRegionGoal>(goal);
    }
    robot::ConstraintEvaluator evaluator() const
    {
        return robot::ConstraintEvaluator(robot, obstacles, checking);
    }
};

/// Raised for a goal-region query on a scenario with a configuration goal, and similar
/// calls that are invalid for the scenario at hand.
class UsageError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// Throws InputError unless start and goal are well-formed and feasible.
void validateScenario(const Scenario &s);

struct RandomEnvParams
{
    int dim{2};
    int obstacleCount{25};
    double radiusMin{0.05};
    double radiusMax{0.2};
    std::uint64_t seed{0};
};

class GenerationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Unit box with start and goal at the centers of opposite faces along the last axis and
/// uniformly placed hyperspheres. Spheres containing the start or goal are redrawn.
Scenario generateRandomEnv(const RandomEnvParams &params);

Scenario emptyBox(int dim, std::uint64_t seed = 0);

bool isGoalConfig(const Scenario &s, const Config &q);

struct GoalRegionValue
{
    double value{0.0};
    Vec gradient;
};

/// radius^2 - |ee(q) - center|^2 and its gradient. Usage error for configuration goals.
GoalRegionValue goalRegionConstraint(const Scenario &s, const Config &q, double radiusMargin = 0.0);

/// Moves a workspace goal region by a uniform offset in [-halfWidth, halfWidth]^3 drawn from
/// the scenario seed's perturbation stream.
Scenario perturbGoalRegion(const Scenario &s, double halfWidth = 0.1);
}  // namespace iosmp
