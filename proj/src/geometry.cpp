#include "iosmp/geometry.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

namespace iosmp::geometry
{
namespace
{
constexpr double kDegenerate = 1e-30;
constexpr double kContact = 1e-15;

void requireSameDim(const Vec &x, const Vec &y, const char *what)
{
    if (x.size() != y.size())
        throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()) + ")");
}

// Unit vector orthogonal to every direction in `dirs`, chosen deterministically.
// Falls back to the first coordinate axis when the span is the whole space.
Vec perpendicularTo(std::initializer_list<const Vec *> dirs, Eigen::Index dim)
{
    std::vector<Vec> basis;
    for (const Vec *d : dirs)
    {
        Vec u = *d;
        for (const Vec &e : basis)
            u -= u.dot(e) * e;
        const double n = u.norm();
        if (n > 1e-12)
            basis.push_back(u / n);
    }
    // Try axes with the smallest component along the spanned directions first.
    std::vector<Eigen::Index> axes(static_cast<std::size_t>(dim));
    std::iota(axes.begin(), axes.end(), Eigen::Index{0});
    auto weight = [&](Eigen::Index k) {
        double w = 0.0;
        for (const Vec &e : basis)
            w += e[k] * e[k];
        return w;
    };
    std::stable_sort(axes.begin(), axes.end(), [&](Eigen::Index i, Eigen::Index j) { return weight(i) < weight(j); });
    for (Eigen::Index k : axes)
    {
        Vec n = Vec::Unit(dim, k);
        for (const Vec &e : basis)
            n -= n.dot(e) * e;
        const double len = n.norm();
        if (len > 1e-6)
            return n / len;
    }
    return Vec::Unit(dim, 0);
}

Clearance finish(double core, double radius, bool withGradient, Vec coreGradient)
{
    Clearance c;
    c.distance = core - radius;
    c.value = signedSquare(c.distance);
    if (withGradient)
    {
        c.distanceGradient = std::move(coreGradient);
        c.gradient = 2.0 * std::abs(c.distance) * c.distanceGradient;
    }
    return c;
}
}  // namespace

double radiusOf(const ObstaclePrimitive &o)
{
    return std::visit([](const auto &p) { return p.radius; }, o);
}

Eigen::Index dimOf(const ObstaclePrimitive &o)
{
    if (const auto *h = std::get_if<Hypersphere>(&o))
        return h->center.size();
    return std::get<Capsule>(o).axis.dim();
}

void validate(const ObstaclePrimitive &o)
{
    if (!(radiusOf(o) > 0.0) || !std::isfinite(radiusOf(o)))
        throw InputError("obstacle radius must be positive and finite");
    if (const auto *c = std::get_if<Capsule>(&o))
    {
        if (c->axis.a.size() != 3 || c->axis.b.size() != 3)
            throw InputError("capsule axis endpoints must be 3-vectors");
        if (!c->axis.a.allFinite() || !c->axis.b.allFinite())
            throw InputError("capsule axis must be finite");
    }
    else
    {
        const auto &h = std::get<Hypersphere>(o);
        if (h.center.size() < 1 || !h.center.allFinite())
            throw InputError("hypersphere center must be a finite vector");
    }
}

SegmentPointResult closestSegmentPoint(const Segment &s, const Vec &p)
{
    requireSameDim(s.a, s.b, "segment");
    requireSameDim(s.a, p, "segmentPointDistance");
    // Plain loops: this sits in the optimizer's innermost loop and must not allocate.
    const Eigen::Index d = p.size();
    double len2 = 0.0;
    double proj = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
    {
        const double ab = s.b[i] - s.a[i];
        len2 += ab * ab;
        proj += (p[i] - s.a[i]) * ab;
    }
    const double t = len2 > kDegenerate ? std::clamp(proj / len2, 0.0, 1.0) : 0.0;
    double dist2 = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
    {
        const double r = s.a[i] + t * (s.b[i] - s.a[i]) - p[i];
        dist2 += r * r;
    }
    return {std::sqrt(dist2), t};
}

SegmentSegmentResult closestSegmentSegment(const Segment &s1, const Segment &s2)
{
    requireSameDim(s1.a, s1.b, "segment");
    requireSameDim(s2.a, s2.b, "segment");
    requireSameDim(s1.a, s2.a, "segmentSegmentDistance");

    const Vec d1 = s1.b - s1.a;
    const Vec d2 = s2.b - s2.a;
    const Vec r = s1.a - s2.a;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);

    double s = 0.0;
    double t = 0.0;
    if (a <= kDegenerate && e <= kDegenerate)
    {
        // both degenerate
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
            // parallel segments: any s works, pick the start
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
    const Vec diff = (s1.a + s * d1) - (s2.a + t * d2);
    return {diff.norm(), s, t};
}

double segmentPointDistance(const Segment &s, const Vec &p)
{
    return closestSegmentPoint(s, p).distance;
}

double segmentSegmentDistance(const Segment &s1, const Segment &s2)
{
    return closestSegmentSegment(s1, s2).distance;
}

Clearance clearance(const Segment &edge, const ObstaclePrimitive &o, bool withGradient, double edgeRadius)
{
    requireSameDim(edge.a, edge.b, "edge");
    if (const auto *h = std::get_if<Hypersphere>(&o))
    {
        const auto closest = closestSegmentPoint(edge, h->center);
        Vec grad;
        if (withGradient)
        {
            const Eigen::Index d = edge.dim();
            const Vec x = edge.a + closest.t * (edge.b - edge.a);
            const Vec u = edge.b - edge.a;
            const Vec n = closest.distance > kContact ? Vec((x - h->center) / closest.distance)
                                                      : perpendicularTo({&u}, d);
            grad.resize(2 * d);
            grad.head(d) = (1.0 - closest.t) * n;
            grad.tail(d) = closest.t * n;
        }
        return finish(closest.distance, h->radius + edgeRadius, withGradient, std::move(grad));
    }
    const auto &cap = std::get<Capsule>(o);
    Clearance full = capsuleClearance(edge, edgeRadius, cap.axis, cap.radius, withGradient);
    if (withGradient)
    {
        const Eigen::Index d = edge.dim();
        full.gradient = full.gradient.head(2 * d).eval();
        full.distanceGradient = full.distanceGradient.head(2 * d).eval();
    }
    return full;
}

Clearance capsuleClearance(const Segment &s1, double r1, const Segment &s2, double r2, bool withGradient)
{
    const auto closest = closestSegmentSegment(s1, s2);
    Vec grad;
    if (withGradient)
    {
        const Eigen::Index d = s1.dim();
        const Vec u1 = s1.b - s1.a;
        const Vec u2 = s2.b - s2.a;
        const Vec x1 = s1.a + closest.s * u1;
        const Vec x2 = s2.a + closest.t * u2;
        const Vec n = closest.distance > kContact ? Vec((x1 - x2) / closest.distance)
                                                  : perpendicularTo({&u1, &u2}, d);
        grad.resize(4 * d);
        grad.segment(0, d) = (1.0 - closest.s) * n;
        grad.segment(d, d) = closest.s * n;
        grad.segment(2 * d, d) = -(1.0 - closest.t) * n;
        grad.segment(3 * d, d) = -closest.t * n;
    }
    return finish(closest.distance, r1 + r2, withGradient, std::move(grad));
}
}  // namespace iosmp::geometry
