#pragma once

#include <cstddef>
#include <vector>

#include "iosmp/robot.hpp"

namespace iosmp
{
/// Piecewise-linear path through configuration space.
struct Path
{
    std::vector<Config> waypoints;

    std::size_t size() const
    {
        return waypoints.size();
    }
    bool empty() const
    {
        return waypoints.empty();
    }
    const Config &front() const
    {
        return waypoints.front();
    }
    const Config &back() const
    {
        return waypoints.back();
    }
    bool operator==(const Path &other) const;
};

/// Sum of Euclidean segment lengths.
double pathLength(const Path &p);

/// `count` waypoints evenly spaced by arclength; the endpoints are copied exactly.
Path resampleByArclength(const Path &p, std::size_t count);

Path straightLine(const Config &from, const Config &to, std::size_t count);
}  // namespace iosmp
