#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "iosmp/environment.hpp"
#include "iosmp/optimizer.hpp"
#include "iosmp/path.hpp"
#include "iosmp/roadmap.hpp"

namespace iosmp::io
{
/// Malformed input file. `what()` reads `file:line:column: message`; line and column are 1-based,
/// 0 when the problem is not tied to a position.
class FormatError : public std::runtime_error
{
public:
    FormatError(const std::string &file, int line, int column, const std::string &message);

    const std::string &file() const
    {
        return file_;
    }
    int line() const
    {
        return line_;
    }
    int column() const
    {
        return column_;
    }

private:
    std::string file_;
    int line_;
    int column_;
};

/// Arm scenarios reference their arm file; relative references resolve against `baseDir`.
Scenario parseScenario(const std::string &text, const std::string &name = "<scenario>",
                       const std::filesystem::path &baseDir = ".");
std::string formatScenario(const Scenario &s);
Scenario readScenario(const std::filesystem::path &file);
void writeScenario(const std::filesystem::path &file, const Scenario &s);

robot::SerialArmModel parseArm(const std::string &text, const std::string &name = "<arm>");
std::string formatArm(const robot::SerialArmModel &arm);
robot::SerialArmModel readArm(const std::filesystem::path &file);

Path parsePath(const std::string &text, const std::string &name = "<path>");
std::string formatPath(const Path &p);
Path readPath(const std::filesystem::path &file);

optimizer::OptimizerConfig parseOptimizerConfig(const std::string &text, const std::string &name = "<config>");
std::string formatOptimizerConfig(const optimizer::OptimizerConfig &c, int indent = 0);

std::string formatRoadmap(const roadmap::Roadmap &rm);
/// Vertices and edge endpoints of a dumped roadmap, enough to draw it.
struct RoadmapDump
{
    std::vector<Config> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};
RoadmapDump parseRoadmap(const std::string &text, const std::string &name = "<roadmap>");

std::string readText(const std::filesystem::path &file);
/// Writes through a temporary file and a rename so readers never see partial output.
void writeText(const std::filesystem::path &file, const std::string &text);
}  // namespace iosmp::io
