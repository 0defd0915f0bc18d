#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Core>

namespace iosmp
{
/// Coordinates in configuration space or workspace.
using Vec = Eigen::VectorXd;

/// Raised when an operation receives structurally invalid input
/// (mismatched dimensions, non-positive radii, ...).
class InputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

namespace geometry
{
struct Segment
{
    Vec a;
    Vec b;

    Eigen::Index dim() const
    {
        return a.size();
    }
};

struct Hypersphere
{
    Vec center;
    double radius{0.0};
};

/// Sphere swept along a 3D axis segment.
struct Capsule
{
    Segment axis;
    double radius{0.0};
};

using ObstaclePrimitive = std::variant<Hypersphere, Capsule>;

double radiusOf(const ObstaclePrimitive &o);
Eigen::Index dimOf(const ObstaclePrimitive &o);

/// Throws InputError when the primitive violates its invariants.
void validate(const ObstaclePrimitive &o);

struct SegmentPointResult
{
    double distance{0.0};
    /// Closest-point parameter on the segment, clamped to [0, 1].
    double t{0.0};
};

struct SegmentSegmentResult
{
    double distance{0.0};
    double s{0.0};  ///< parameter on the first segment
    double t{0.0};  ///< parameter on the second segment
};

SegmentPointResult closestSegmentPoint(const Segment &s, const Vec &p);
SegmentSegmentResult closestSegmentSegment(const Segment &s1, const Segment &s2);

double segmentPointDistance(const Segment &s, const Vec &p);
double segmentSegmentDistance(const Segment &s1, const Segment &s2);

/// Signed clearance between a segment (optionally inflated to a capsule) and a primitive.
///
/// distance is delta = core distance - combined radius; value = sign(delta) * delta^2, so
/// negative values mean penetration. When gradients are requested they are taken with
/// respect to the concatenated segment endpoints [a; b] (size 2 * dim). At zero core
/// distance the contact normal is undefined; a deterministic direction perpendicular to
/// the segment is used so that symmetric configurations still receive a push.
struct Clearance
{
    double value{0.0};
    double distance{0.0};
    Vec gradient;          ///< d value / d [a; b]
    Vec distanceGradient;  ///< d distance / d [a; b]
};

Clearance clearance(const Segment &edge, const ObstaclePrimitive &o, bool withGradient = false,
                    double edgeRadius = 0.0);

/// Clearance between two capsules. Gradients cover [a1; b1; a2; b2].
Clearance capsuleClearance(const Segment &s1, double r1, const Segment &s2, double r2,
                           bool withGradient = false);

inline double signedSquare(double delta)
{
    return delta * std::abs(delta);
}
}  // namespace geometry
}  // namespace iosmp
