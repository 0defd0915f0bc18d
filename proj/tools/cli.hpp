#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iosmp::cli
{
inline constexpr int kOk = 0;
inline constexpr int kNoPath = 1;
inline constexpr int kUsage = 2;

/// Runs one command line (without the program name); returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
}  // namespace iosmp::cli
