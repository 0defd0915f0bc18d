#include "iosmp/format.hpp"

#include <charconv>
#include <cmath>

namespace iosmp
{
std::string formatDouble(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}
}  // namespace iosmp
