#include "iosmp/orchestrator.hpp"

#include <sstream>

#include "iosmp/format.hpp"

namespace iosmp::orchestrator
{
const char *toString(Method m)
{
    switch (m)
    {
    case Method::IosMp:
        return "iosmp";
    case Method::PrmStar:
        return "prm_star";
    case Method::OptOnly:
        return "opt_only";
    case Method::IosMpNoShare:
        return "iosmp_noshare";
    }
    return "?";
}

Method parseMethod(const std::string &name)
{
    // The CLI spells methods with dashes, suite files with underscores.
    std::string n = name;
    for (char &c : n)
        if (c == '-')
            c = '_';
    for (Method m : {Method::IosMp, Method::PrmStar, Method::OptOnly, Method::IosMpNoShare})
        if (n == toString(m))
            return m;
    throw InputError("unknown method '" + name + "'");
}

const char *toString(EventKind k)
{
    return k == EventKind::PlannerPath ? "planner_path" : "optimized_path";
}

Budget PlanRequest::makeBudget() const
{
    if (timeLimit.has_value() == sampleBudget.has_value())
        throw InputError("plan request needs exactly one of a time limit or a sample budget");
    return timeLimit ? Budget::wallClock(*timeLimit) : Budget::samples(*sampleBudget);
}

std::string PlanTrace::toCsv() const
{
    std::ostringstream out;
    out << (countsSamples ? "samples" : "wall_time_s") << ",event,cost\n";
    for (const auto &e : events)
        out << formatDouble(e.time) << ',' << toString(e.kind) << ',' << formatDouble(e.cost) << '\n';
    return out.str();
}

namespace
{
class Session
{
public:
    explicit Session(const PlanRequest &req) : req_(req), budget_(req.makeBudget())
    {
        validateScenario(req.scenario);
        req.optimizer.validate();
        result_.trace.countsSamples = budget_.countsSamples();
    }

    void update(const Path &p, double cost, EventKind kind)
    {
        result_.bestPath = p;
        result_.bestCost = cost;
        const TraceEvent e{budget_.now(), kind, cost};
        if (req_.recordTrace)
            result_.trace.events.push_back(e);
        if (req_.onImprove)
            req_.onImprove(e, p);
    }

    optimizer::OptimizeResult optimize(const Path &p0)
    {
        ++result_.optimizations;
        optimizer::StopCheck stop;
        if (!budget_.countsSamples())
            stop = [this] { return budget_.exhausted(); };
        return optimizer::optimize(p0, req_.scenario, req_.optimizer, stop);
    }

    // The optimizer's own check runs at the nominal resolution; a best path must also hold at 10x.
    bool acceptable(const optimizer::OptimizeResult &r) const
    {
        return r.feasible && optimizer::checkPath(req_.scenario, r.path, 10).valid;
    }

    PlanResult interleaved(bool optimize)
    {
        auto graph = std::make_shared<roadmap::Roadmap>(req_.scenario);
        while (!budget_.exhausted())
        {
            auto p = graph->expandUntilImproved(result_.bestCost, budget_);
            if (!p)
                break;
            ++result_.iterations;
            const double planned = pathLength(*p);
            if (!optimize)
            {
                update(*p, planned, EventKind::PlannerPath);
                continue;
            }
            // The planner path beat the incumbent by contract, so it is recorded before the
            // optimizer runs; the optimized path then replaces it only if valid and shorter still.
            update(*p, planned, EventKind::PlannerPath);
            const auto r = this->optimize(*p);
            bool accepted = acceptable(r) && r.finalCost < planned;
            if (accepted && req_.planner.sharePaths)
            {
                try
                {
                    graph->injectPath(r.path);
                }
                catch (const roadmap::PathRejected &)
                {
                    // Checker and roadmap disagree only at the tolerance boundary; drop the path.
                    accepted = false;
                }
            }
            if (accepted)
                update(r.path, r.finalCost, EventKind::OptimizedPath);
            else
                ++result_.rejectedOptimizations;
        }
        result_.samples = budget_.samplesDrawn();
        result_.roadmap = std::move(graph);
        return std::move(result_);
    }

    PlanResult optimizerOnly()
    {
        const Scenario &s = req_.scenario;
        const std::size_t n = req_.optimizer.waypoints;
        const Path init = s.hasRegionGoal() ? straightLine(s.start, s.start, n)
                                            : straightLine(s.start, std::get<SingleConfigGoal>(s.goal).q, n);
        ++result_.iterations;
        const auto r = optimize(init);
        if (acceptable(r))
            update(r.path, r.finalCost, EventKind::OptimizedPath);
        else
            ++result_.rejectedOptimizations;
        return std::move(result_);
    }

private:
    const PlanRequest &req_;
    Budget budget_;
    PlanResult result_;
};
}  // namespace

PlanResult plan(const PlanRequest &req)
{
    return Session(req).interleaved(true);
}

PlanResult planSamplingOnly(const PlanRequest &req)
{
    return Session(req).interleaved(false);
}

PlanResult planOptimizerOnly(const PlanRequest &req)
{
    return Session(req).optimizerOnly();
}

PlanResult run(Method m, const PlanRequest &req)
{
    switch (m)
    {
    case Method::IosMp:
        return plan(req);
    case Method::PrmStar:
        return planSamplingOnly(req);
    case Method::OptOnly:
        return planOptimizerOnly(req);
    case Method::IosMpNoShare:
    {
        PlanRequest r = req;
        r.planner.sharePaths = false;
        return plan(r);
    }
    }
    throw InputError("unknown method");
}
}  // namespace iosmp::orchestrator
