#pragma once

#include <string>

namespace iosmp
{
/// Shortest decimal text that parses back to exactly `x`.
std::string formatDouble(double x);
}  // namespace iosmp
