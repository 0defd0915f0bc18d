#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "iosmp/geometry.hpp"

namespace iosmp
{
using Config = Vec;

namespace robot
{
struct Bounds
{
    Vec lower;
    Vec upper;
};

/// Point robot in an axis-aligned box; the configuration is the position itself.
struct PointRobotModel
{
    Bounds bounds;

    std::size_t dim() const
    {
        return static_cast<std::size_t>(bounds.lower.size());
    }
};

struct Joint
{
    Eigen::Vector3d axis{Eigen::Vector3d::UnitZ()};
    /// Translation from the previous frame to this joint, applied before the rotation.
    Eigen::Vector3d offset{Eigen::Vector3d::Zero()};
    double lower{-M_PI};
    double upper{M_PI};
};

/// Capsule rigidly attached to a frame. Frame 0 is the base; frame k follows joint k.
struct Body
{
    std::size_t link{0};
    Eigen::Vector3d a{Eigen::Vector3d::Zero()};
    Eigen::Vector3d b{Eigen::Vector3d::Zero()};
    double radius{0.05};
};

/// World-frame data for one configuration.
struct ArmPose
{
    std::vector<Eigen::Matrix3d> rotation;    ///< frames 0..n
    std::vector<Eigen::Vector3d> position;    ///< frames 0..n; frame k origin is joint k's pivot
    std::vector<Eigen::Vector3d> jointAxis;   ///< world axis of joint k at index k - 1

    Eigen::Vector3d toWorld(std::size_t link, const Eigen::Vector3d &local) const
    {
        return position[link] + rotation[link] * local;
    }
};

class SerialArmModel
{
public:
    SerialArmModel() = default;
    SerialArmModel(std::vector<Joint> joints, std::vector<Body> bodies, std::size_t eeLink,
                   Eigen::Vector3d eePoint, Eigen::Vector3d base = Eigen::Vector3d::Zero());

    std::size_t dim() const
    {
        return joints_.size();
    }
    const std::vector<Joint> &joints() const
    {
        return joints_;
    }
    const std::vector<Body> &bodies() const
    {
        return bodies_;
    }
    std::size_t endEffectorLink() const
    {
        return eeLink_;
    }
    const Eigen::Vector3d &endEffectorPoint() const
    {
        return eePoint_;
    }
    const Eigen::Vector3d &base() const
    {
        return base_;
    }
    const Bounds &bounds() const
    {
        return bounds_;
    }
    /// Body index pairs checked for self-collision (index gap >= 2).
    const std::vector<std::pair<std::size_t, std::size_t>> &selfCollisionPairs() const
    {
        return selfPairs_;
    }

    ArmPose pose(const Config &q) const;
    Eigen::Vector3d endEffector(const Config &q) const;
    /// 3 x n Jacobian of a world point rigidly attached to `link`.
    Eigen::MatrixXd pointJacobian(const ArmPose &pose, std::size_t link, const Eigen::Vector3d &world) const;

    /// Accumulates g . d(world point)/dq into `out` without forming the Jacobian.
    void accumulatePointGradient(const ArmPose &pose, std::size_t link, const Eigen::Vector3d &world,
                                 const Eigen::Vector3d &g, Vec &out) const;

private:
    std::vector<Joint> joints_;
    std::vector<Body> bodies_;
    std::size_t eeLink_{0};
    Eigen::Vector3d eePoint_{Eigen::Vector3d::Zero()};
    Eigen::Vector3d base_{Eigen::Vector3d::Zero()};
    Bounds bounds_;
    std::vector<std::pair<std::size_t, std::size_t>> selfPairs_;
};

/// The generic 7-DOF arm: alternating z/y axes, 0.2 m links, 0.05 m capsules, +-2.8 rad.
SerialArmModel defaultSevenDofArm();

using RobotModel = std::variant<PointRobotModel, SerialArmModel>;

std::size_t dimOf(const RobotModel &model);
const Bounds &boundsOf(const RobotModel &model);

/// Posed body capsules in the world frame.
std::vector<geometry::Capsule> forwardKinematics(const SerialArmModel &model, const Config &q);

/// Workspace point used for goal regions: the arm's end effector, or the position itself
/// for a point robot.
Vec endEffector(const RobotModel &model, const Config &q);

/// d endEffector / dq, size (workspace dim) x (config dim).
Eigen::MatrixXd endEffectorJacobian(const RobotModel &model, const Config &q);

enum class ConstraintKind
{
    Obstacle,
    SelfCollision,
    JointLower,
    JointUpper,
    GoalRegion,
};

const char *toString(ConstraintKind kind);

/// One inequality constraint value (>= 0 means satisfied) with its gradient.
///
/// Edge terms carry gradients for both edge endpoints; waypoint terms only use `gradFrom`.
struct ConstraintTerm
{
    ConstraintKind kind{ConstraintKind::Obstacle};
    std::size_t index{0};  ///< obstacle index, self-collision pair index or joint index
    std::size_t body{0};   ///< arm body for obstacle terms
    double value{0.0};
    Vec gradFrom;
    Vec gradTo;
};

std::vector<ConstraintTerm> jointLimitValues(const SerialArmModel &model, const Config &q);

/// Which monotone signed composition of the clearance distance is exposed as the
/// constraint value.
enum class ClearanceForm
{
    SignedSquared,  ///< sign(delta) * delta^2
    SignedDistance, ///< delta
};

struct CheckOptions
{
    ClearanceForm form{ClearanceForm::SignedSquared};
    /// Arm edges are discretized every `resolutionStep` radians, with at least `minResolution` intervals.
    double resolutionStep{0.05};
    int minResolution{5};
    /// Constraint values down to -tolerance count as satisfied.
    double tolerance{1e-8};
};

struct EdgeReport
{
    double minValue{0.0};
    ConstraintKind kind{ConstraintKind::Obstacle};
    std::size_t index{0};
    std::size_t body{0};
};

/// Constraint evaluation and collision checking for one robot among static obstacles.
/// Immutable after construction; all queries are const and thread-safe.
class ConstraintEvaluator
{
public:
    ConstraintEvaluator(RobotModel robot, std::vector<geometry::ObstaclePrimitive> obstacles,
                        CheckOptions options = {});

    const RobotModel &robot() const
    {
        return robot_;
    }
    const std::vector<geometry::ObstaclePrimitive> &obstacles() const
    {
        return obstacles_;
    }
    const CheckOptions &options() const
    {
        return options_;
    }
    std::size_t dim() const
    {
        return dimOf(robot_);
    }
    bool isArm() const
    {
        return std::holds_alternative<SerialArmModel>(robot_);
    }

    /// Number of terms edgeConstraintValues produces per edge.
    std::size_t edgeTermCount() const;

    /// Discretization intervals for an arm edge; point robot edges are exact and return 1.
    int defaultResolution(const Config &q0, const Config &q1) const;

    /// Obstacle and self-collision terms of the edge (q0, q1). For the arm each term is the
    /// minimum over `resolution + 1` evenly spaced poses, with the gradient taken through
    /// the minimizing pose. Values are appended to `out` in a fixed order.
    /// `needGradient(term, value)`, when given, limits gradient work to the terms it accepts;
    /// the others get zero gradients. `term` counts from 0 within this edge.
    using GradientFilter = std::function<bool(std::size_t, double)>;
    void edgeConstraintValues(const Config &q0, const Config &q1, int resolution, bool withGradient,
                              std::vector<ConstraintTerm> &out, const GradientFilter &needGradient = {}) const;
    std::vector<ConstraintTerm> edgeConstraintValues(const Config &q0, const Config &q1, int resolution,
                                                     bool withGradient = true) const;

    /// Joint-limit terms for the arm, empty for the point robot.
    std::vector<ConstraintTerm> jointLimitValues(const Config &q) const;

    /// Smallest constraint value over the edge, including joint limits at the endpoints.
    EdgeReport edgeReport(const Config &q0, const Config &q1, int resolution) const;

    bool configValid(const Config &q) const;
    /// Validates at `resolutionScale` times the default resolution.
    bool edgeValid(const Config &q0, const Config &q1, int resolutionScale = 1) const;

    double toForm(const geometry::Clearance &c) const
    {
        return options_.form == ClearanceForm::SignedSquared ? c.value : c.distance;
    }

private:
    void pointEdge(const Config &q0, const Config &q1, bool withGradient, std::vector<ConstraintTerm> &out) const;
    void armEdge(const SerialArmModel &arm, const Config &q0, const Config &q1, int resolution, bool withGradient,
                 const GradientFilter &needGradient,
                 std::vector<ConstraintTerm> &out) const;
    /// Early-exit check of every pose of an arm edge; same verdict as edgeReport.
    bool armEdgeValid(const SerialArmModel &arm, const Config &q0, const Config &q1, int resolution) const;

    /// Workspace obstacles in fixed-size form for the arm's inner loops. A sphere has b == a.
    struct Obstacle3
    {
        Eigen::Vector3d a;
        Eigen::Vector3d b;
        double radius;
        bool sphere;
        /// Bounding sphere of the swept core: center and half length.
        Eigen::Vector3d center;
        double half;
    };

    RobotModel robot_;
    std::vector<geometry::ObstaclePrimitive> obstacles_;
    CheckOptions options_;
    std::vector<Obstacle3> obstacles3_;
};
}  // namespace robot
}  // namespace iosmp
