#include "iosmp/path.hpp"

#include <algorithm>

namespace iosmp
{
bool Path::operator==(const Path &other) const
{
    if (waypoints.size() != other.waypoints.size())
        return false;
    for (std::size_t i = 0; i < waypoints.size(); ++i)
        if (waypoints[i].size() != other.waypoints[i].size() || waypoints[i] != other.waypoints[i])
            return false;
    return true;
}

double pathLength(const Path &p)
{
    double total = 0.0;
    for (std::size_t i = 1; i < p.waypoints.size(); ++i)
        total += (p.waypoints[i] - p.waypoints[i - 1]).norm();
    return total;
}

Path resampleByArclength(const Path &p, std::size_t count)
{
    if (p.waypoints.size() < 2 || count < 2)
        throw InputError("resampling needs a path of at least 2 waypoints and a target of at least 2");
    std::vector<double> cumulative(p.waypoints.size(), 0.0);
    for (std::size_t i = 1; i < p.waypoints.size(); ++i)
        cumulative[i] = cumulative[i - 1] + (p.waypoints[i] - p.waypoints[i - 1]).norm();
    const double total = cumulative.back();

    Path out;
    out.waypoints.reserve(count);
    out.waypoints.push_back(p.waypoints.front());
    std::size_t seg = 1;
    for (std::size_t j = 1; j + 1 < count; ++j)
    {
        const double target = total * static_cast<double>(j) / static_cast<double>(count - 1);
        while (seg + 1 < cumulative.size() && cumulative[seg] < target)
            ++seg;
        const double span = cumulative[seg] - cumulative[seg - 1];
        const double t = span > 0.0 ? std::clamp((target - cumulative[seg - 1]) / span, 0.0, 1.0) : 0.0;
        out.waypoints.push_back((1.0 - t) * p.waypoints[seg - 1] + t * p.waypoints[seg]);
    }
    out.waypoints.push_back(p.waypoints.back());
    return out;
}

Path straightLine(const Config &from, const Config &to, std::size_t count)
{
    if (count < 2)
        throw InputError("a straight line needs at least 2 waypoints");
    Path out;
    out.waypoints.reserve(count);
    out.waypoints.push_back(from);
    for (std::size_t j = 1; j + 1 < count; ++j)
    {
        const double t = static_cast<double>(j) / static_cast<double>(count - 1);
        out.waypoints.push_back((1.0 - t) * from + t * to);
    }
    out.waypoints.push_back(to);
    return out;
}
}  // namespace iosmp
