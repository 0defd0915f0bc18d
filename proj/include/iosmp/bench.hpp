#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "iosmp/io.hpp"
#include "iosmp/orchestrator.hpp"

namespace iosmp::bench
{
using orchestrator::Method;

/// A grid of (dimension, obstacle count) cells with envsPerCell seeded environments each.
/// With a base scenario the grid collapses to one cell: every environment is the base scenario
/// reseeded, with its goal region optionally shifted by a uniform offset of goalPerturbation.
struct SuiteSpec
{
    std::string name{"suite"};
    std::vector<int> dims{2};
    std::vector<int> obstacleCounts{25};
    int envsPerCell{15};
    std::optional<double> timeLimit;
    std::optional<std::size_t> sampleBudget;
    std::vector<Method> methods{Method::IosMp, Method::PrmStar};
    /// One seed per environment; empty means seedBase, seedBase + 1, ...
    std::vector<std::uint64_t> seeds;
    std::uint64_t seedBase{0};
    std::optional<Scenario> baseScenario;
    std::string baseScenarioFile;
    double goalPerturbation{0.0};
    optimizer::OptimizerConfig optimizer;
    int gridPoints{100};

    void validate() const;
    std::uint64_t seedFor(int env) const;
    /// Canonical text of every field that affects results; hashed for the run directory name.
    std::string canonical() const;
    std::string hash() const;
};

/// Suite file reader; a base scenario path resolves against `baseDir`.
SuiteSpec parseSuite(const std::string &text, const std::string &name = "<suite>",
                     const std::filesystem::path &baseDir = ".");
SuiteSpec readSuite(const std::filesystem::path &file);

struct Cell
{
    int dim{0};
    int obstacles{0};
};

struct RunRecord
{
    Cell cell;
    int env{0};
    std::uint64_t seed{0};
    Method method{Method::IosMp};
    orchestrator::PlanTrace trace;
    /// Infinity when the run found no path.
    double finalCost{0.0};
    bool success{false};
    std::optional<Path> bestPath;
    /// Empty unless the run threw; such runs count as failures and the suite continues.
    std::string error;
    int optimizations{0};
    int rejectedOptimizations{0};
    std::size_t samples{0};
    double seconds{0.0};
};

struct CurvePoint
{
    double time{0.0};
    Method method{Method::IosMp};
    /// Mean over the environments where the method holds a path at this time; NaN when none does.
    double meanRatio{0.0};
    int nSuccess{0};
};

struct CellResult
{
    Cell cell;
    std::vector<RunRecord> runs;
    /// Shortest path found by any method at any time, per environment; infinity if none.
    std::vector<double> bestPerEnv;
    std::vector<CurvePoint> curve;

    /// Final cost over the environment's best; infinity if the method failed where another
    /// succeeded, NaN where no method succeeded.
    double finalRatio(int env, Method m) const;
    /// Median of finalRatio over environments some method solved.
    double medianFinalRatio(Method m) const;
    int successes(Method m) const;
    /// `time_s,method,mean_ratio,n_success`
    std::string aggregateCsv() const;
};

struct SuiteResult
{
    SuiteSpec spec;
    std::vector<CellResult> cells;
};

/// Best cost the trace holds at time t; infinity before its first event.
double costAt(const orchestrator::PlanTrace &trace, double t);
/// `points` log-spaced times ending at `limit`, starting three decades earlier.
std::vector<double> timeGrid(double limit, int points);

Scenario scenarioFor(const SuiteSpec &spec, const Cell &cell, int env);

using Progress = std::function<void(const RunRecord &)>;
/// Runs every (cell, environment, method) triple on up to `workers` threads. Results are
/// merged in a fixed order, so budget-mode suites are reproducible regardless of workers.
SuiteResult runSuite(const SuiteSpec &spec, int workers = 1, const Progress &progress = {});

/// Writes `<outDir>/<name>-<hash>/` with the spec, per-run traces, per-cell aggregates and,
/// for planar cells, scene SVGs. Returns the run directory.
std::filesystem::path writeSuiteOutputs(const SuiteResult &result, const std::filesystem::path &outDir);

struct StyledPath
{
    Path path;
    std::string stroke{"#d62728"};
    double width{2.0};
};

using RoadmapLines = io::RoadmapDump;
RoadmapLines linesOf(const roadmap::Roadmap &rm);

/// Pixel size of the drawable square and the margin around it.
inline constexpr double kSvgSize = 500.0;
inline constexpr double kSvgMargin = 10.0;

/// Planar scenes only: box outline, obstacle disks as `circle`, optional roadmap edges as
/// `line`, each path as a `polyline`. Point (x, y) maps to
/// (margin + size (x - lo) / (hi - lo), margin + size (hi - y) / (hi - lo)) per axis.
std::string renderScene2D(const Scenario &s, const RoadmapLines *roadmap = nullptr,
                          const std::vector<StyledPath> &paths = {});
}  // namespace iosmp::bench
