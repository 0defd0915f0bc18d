#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iosmp/optimizer.hpp"
#include "iosmp/roadmap.hpp"

namespace iosmp::orchestrator
{
enum class Method
{
    IosMp,
    PrmStar,
    OptOnly,
    IosMpNoShare,
};

/// Names used in suite files and result tables: iosmp, prm_star, opt_only, iosmp_noshare.
const char *toString(Method m);
Method parseMethod(const std::string &name);

struct PlannerConfig
{
    /// Inject feasible optimized paths back into the roadmap.
    bool sharePaths{true};
};

/// Exactly one of timeLimit (seconds) or sampleBudget must be set.
struct TraceEvent;

struct PlanRequest
{
    Scenario scenario;
    std::optional<double> timeLimit;
    std::optional<std::size_t> sampleBudget;
    optimizer::OptimizerConfig optimizer;
    PlannerConfig planner;
    bool recordTrace{true};
    /// Called with every new best path as it is reported.
    std::function<void(const TraceEvent &, const Path &)> onImprove;

    Budget makeBudget() const;
};

enum class EventKind
{
    PlannerPath,
    OptimizedPath,
};

const char *toString(EventKind k);

struct TraceEvent
{
    /// Seconds since the start in wall-clock mode, samples drawn in budget mode.
    double time{0.0};
    EventKind kind{EventKind::PlannerPath};
    double cost{0.0};
};

struct PlanTrace
{
    bool countsSamples{false};
    std::vector<TraceEvent> events;

    /// Header `wall_time_s,event,cost`, or `samples,event,cost` in budget mode.
    std::string toCsv() const;
};

struct PlanResult
{
    std::optional<Path> bestPath;
    double bestCost{std::numeric_limits<double>::infinity()};
    PlanTrace trace;
    int iterations{0};
    int optimizations{0};
    /// Optimizer results discarded as infeasible or not shorter.
    int rejectedOptimizations{0};
    std::size_t samples{0};
    /// Final roadmap, absent for the optimizer-only method.
    std::shared_ptr<const roadmap::Roadmap> roadmap;
};

/// Alternates roadmap expansion and path optimization until the budget runs out.
PlanResult plan(const PlanRequest &req);
/// The same loop with the optimization step disabled.
PlanResult planSamplingOnly(const PlanRequest &req);
/// One optimization of a straight-line init. For workspace-region goals every waypoint starts
/// at the start configuration and the last one is pulled into the region by its constraint.
PlanResult planOptimizerOnly(const PlanRequest &req);

PlanResult run(Method m, const PlanRequest &req);
}  // namespace iosmp::orchestrator
