#include "iosmp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "iosmp/format.hpp"
#include "yaml_reader.hpp"

namespace iosmp::bench
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(const std::string &text)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string joined(const std::vector<std::string> &xs)
{
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += (i ? ", " : "") + xs[i];
    return out + "]";
}

template <class T>
std::vector<std::string> texts(const std::vector<T> &xs)
{
    std::vector<std::string> out;
    for (const auto &x : xs)
        out.push_back(std::to_string(x));
    return out;
}

bool isPlanar(const Scenario &s)
{
    return std::holds_alternative<robot::PointRobotModel>(s.robot) && s.dim() == 2;
}
}  // namespace

// ---------------------------------------------------------------- spec

void SuiteSpec::validate() const
{
    if (envsPerCell < 1)
        throw InputError("envsPerCell must be at least 1");
    if (timeLimit.has_value() == sampleBudget.has_value())
        throw InputError("suite needs exactly one of timeLimit or sampleBudget");
    if (timeLimit && !(*timeLimit > 0.0))
        throw InputError("timeLimit must be positive");
    if (sampleBudget && *sampleBudget == 0)
        throw InputError("sampleBudget must be positive");
    if (methods.empty())
        throw InputError("suite needs at least one method");
    if (!seeds.empty() && seeds.size() != static_cast<std::size_t>(envsPerCell))
        throw InputError("seeds must list exactly envsPerCell entries");
    if (gridPoints < 2)
        throw InputError("gridPoints must be at least 2");
    if (!baseScenario && (dims.empty() || obstacleCounts.empty()))
        throw InputError("suite needs dims and obstacleCounts, or a base scenario");
    if (goalPerturbation < 0.0)
        throw InputError("goalPerturbation must be non-negative");
    if (goalPerturbation > 0.0 && !(baseScenario && baseScenario->hasRegionGoal()))
        throw InputError("goalPerturbation needs a base scenario with a goal region");
    optimizer.validate();
}

std::uint64_t SuiteSpec::seedFor(int env) const
{
    return seeds.empty() ? seedBase + static_cast<std::uint64_t>(env) : seeds[static_cast<std::size_t>(env)];
}

std::string SuiteSpec::canonical() const
{
    std::ostringstream out;
    out << "format: iosmp-suite/1\n";
    out << "name: " << YAML::Dump(YAML::Node(name)) << '\n';
    if (baseScenario)
    {
        out << "scenario: " << YAML::Dump(YAML::Node(baseScenarioFile)) << '\n';
        out << "goalPerturbation: " << formatDouble(goalPerturbation) << '\n';
    }
    else
    {
        out << "dims: " << joined(texts(dims)) << '\n';
        out << "obstacleCounts: " << joined(texts(obstacleCounts)) << '\n';
    }
    out << "envsPerCell: " << envsPerCell << '\n';
    if (timeLimit)
        out << "timeLimit: " << formatDouble(*timeLimit) << '\n';
    else
        out << "sampleBudget: " << *sampleBudget << '\n';
    std::vector<std::string> ms;
    for (Method m : methods)
        ms.push_back(orchestrator::toString(m));
    out << "methods: " << joined(ms) << '\n';
    std::vector<std::uint64_t> all;
    for (int e = 0; e < envsPerCell; ++e)
        all.push_back(seedFor(e));
    out << "seeds: " << joined(texts(all)) << '\n';
    out << "gridPoints: " << gridPoints << '\n';
    out << "optimizer:\n" << io::formatOptimizerConfig(optimizer, 2);
    // The scenario content, not just its file name, decides the results.
    if (baseScenario)
        out << "# scenario hash " << std::hex << fnv1a(io::formatScenario(*baseScenario)) << std::dec << '\n';
    return out.str();
}

std::string SuiteSpec::hash() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return std::string(buf, 12);
}

SuiteSpec parseSuite(const std::string &text, const std::string &name, const std::filesystem::path &baseDir)
{
    const io::detail::Reader r(name);
    const YAML::Node root = r.load(text);
    r.checkFormat(root, "iosmp-suite/1");
    r.onlyKeys(root, {"format", "name", "dims", "obstacleCounts", "envsPerCell", "timeLimit", "sampleBudget",
                      "methods", "seeds", "seedBase", "scenario", "goalPerturbation", "optimizer", "gridPoints"});
    SuiteSpec s;
    auto intList = [&](const YAML::Node &n, const char *what) {
        if (!n.IsSequence() || n.size() == 0)
            r.fail(n, std::string(what) + " must be a non-empty list");
        std::vector<int> out;
        for (const auto &x : n)
            out.push_back(r.scalar<int>(x, what));
        return out;
    };
    if (root["name"])
        s.name = r.scalar<std::string>(root["name"], "name");
    if (root["dims"])
        s.dims = intList(root["dims"], "dims");
    if (root["obstacleCounts"])
        s.obstacleCounts = intList(root["obstacleCounts"], "obstacleCounts");
    if (root["envsPerCell"])
        s.envsPerCell = r.scalar<int>(root["envsPerCell"], "envsPerCell");
    if (root["timeLimit"])
        s.timeLimit = r.real(root["timeLimit"], "timeLimit");
    if (root["sampleBudget"])
        s.sampleBudget = r.scalar<std::size_t>(root["sampleBudget"], "sampleBudget");
    if (const YAML::Node ms = root["methods"])
    {
        if (!ms.IsSequence())
            r.fail(ms, "methods must be a list");
        s.methods.clear();
        for (const auto &m : ms)
            s.methods.push_back(r.anchored(m, [&] { return orchestrator::parseMethod(r.scalar<std::string>(m, "method")); }));
    }
    if (const YAML::Node ss = root["seeds"])
    {
        if (!ss.IsSequence())
            r.fail(ss, "seeds must be a list");
        for (const auto &x : ss)
            s.seeds.push_back(r.unsignedInt(x, "seed"));
    }
    if (root["seedBase"])
        s.seedBase = r.unsignedInt(root["seedBase"], "seedBase");
    if (root["scenario"])
    {
        s.baseScenarioFile = r.scalar<std::string>(root["scenario"], "scenario");
        const auto file = baseDir / s.baseScenarioFile;
        if (!std::filesystem::is_regular_file(file))
            r.fail(root["scenario"], "cannot read scenario file '" + file.string() + "'");
        s.baseScenario = io::readScenario(file);
    }
    if (root["goalPerturbation"])
        s.goalPerturbation = r.real(root["goalPerturbation"], "goalPerturbation");
    if (root["optimizer"])
        s.optimizer = io::detail::optimizerFrom(r, root["optimizer"]);
    if (root["gridPoints"])
        s.gridPoints = r.scalar<int>(root["gridPoints"], "gridPoints");
    r.anchored(root, [&] {
        s.validate();
        return 0;
    });
    return s;
}

SuiteSpec readSuite(const std::filesystem::path &file)
{
    return parseSuite(io::readText(file), file.string(), file.parent_path());
}

// ---------------------------------------------------------------- aggregation

double costAt(const orchestrator::PlanTrace &trace, double t)
{
    double best = kInf;
    for (const auto &e : trace.events)
    {
        if (e.time > t)
            break;
        best = std::min(best, e.cost);
    }
    return best;
}

std::vector<double> timeGrid(double limit, int points)
{
    if (!(limit > 0.0) || points < 2)
        throw InputError("time grid needs a positive limit and at least 2 points");
    std::vector<double> out;
    const double lo = std::log10(limit) - 3.0, hi = std::log10(limit);
    for (int i = 0; i < points; ++i)
        out.push_back(i + 1 == points ? limit : std::pow(10.0, lo + (hi - lo) * i / (points - 1)));
    return out;
}

double CellResult::finalRatio(int env, Method m) const
{
    const double best = bestPerEnv[static_cast<std::size_t>(env)];
    if (std::isinf(best))
        return std::numeric_limits<double>::quiet_NaN();
    for (const auto &r : runs)
        if (r.env == env && r.method == m)
            return r.success ? r.finalCost / best : kInf;
    return std::numeric_limits<double>::quiet_NaN();
}

double CellResult::medianFinalRatio(Method m) const
{
    std::vector<double> xs;
    for (std::size_t e = 0; e < bestPerEnv.size(); ++e)
    {
        const double x = finalRatio(static_cast<int>(e), m);
        if (!std::isnan(x))
            xs.push_back(x);
    }
    if (xs.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    if (n % 2)
        return xs[n / 2];
    const double a = xs[n / 2 - 1], b = xs[n / 2];
    return std::isinf(b) ? b : 0.5 * (a + b);
}

int CellResult::successes(Method m) const
{
    int n = 0;
    for (const auto &r : runs)
        n += r.method == m && r.success;
    return n;
}

std::string CellResult::aggregateCsv() const
{
    std::ostringstream out;
    out << "time_s,method,mean_ratio,n_success\n";
    for (const auto &p : curve)
        out << formatDouble(p.time) << ',' << orchestrator::toString(p.method) << ','
            << (std::isnan(p.meanRatio) ? std::string() : formatDouble(p.meanRatio)) << ',' << p.nSuccess << '\n';
    return out.str();
}

namespace
{
void aggregate(CellResult &cell, const SuiteSpec &spec)
{
    cell.bestPerEnv.assign(static_cast<std::size_t>(spec.envsPerCell), kInf);
    for (const auto &r : cell.runs)
        if (r.success)
        {
            // The final cost is the minimum over the trace, since best costs only decrease.
            auto &b = cell.bestPerEnv[static_cast<std::size_t>(r.env)];
            b = std::min(b, r.finalCost);
        }
    const double limit = spec.timeLimit ? *spec.timeLimit : static_cast<double>(*spec.sampleBudget);
    for (Method m : spec.methods)
        for (double t : timeGrid(limit, spec.gridPoints))
        {
            double sum = 0.0;
            int n = 0;
            for (const auto &r : cell.runs)
            {
                if (r.method != m || !r.success)
                    continue;
                // Every event of a successful run happened within the budget; late wall-clock
                // stragglers are clamped to the final grid time.
                const double c = t == limit ? r.finalCost : costAt(r.trace, t);
                if (std::isinf(c))
                    continue;
                sum += c / cell.bestPerEnv[static_cast<std::size_t>(r.env)];
                ++n;
            }
            cell.curve.push_back({t, m, n ? sum / n : std::numeric_limits<double>::quiet_NaN(), n});
        }
}
}  // namespace

// ---------------------------------------------------------------- running

Scenario scenarioFor(const SuiteSpec &spec, const Cell &cell, int env)
{
    const std::uint64_t seed = spec.seedFor(env);
    if (spec.baseScenario)
    {
        Scenario s = *spec.baseScenario;
        s.seed = seed;
        if (spec.goalPerturbation > 0.0)
            s = perturbGoalRegion(s, spec.goalPerturbation);
        return s;
    }
    RandomEnvParams p;
    p.dim = cell.dim;
    p.obstacleCount = cell.obstacles;
    p.seed = seed;
    return generateRandomEnv(p);
}

SuiteResult runSuite(const SuiteSpec &spec, int workers, const Progress &progress)
{
    spec.validate();
    SuiteResult result;
    result.spec = spec;
    if (spec.baseScenario)
        result.cells.push_back({Cell{static_cast<int>(spec.baseScenario->dim()),
                                     static_cast<int>(spec.baseScenario->obstacles.size())},
                                {}, {}, {}});
    else
        for (int d : spec.dims)
            for (int n : spec.obstacleCounts)
                result.cells.push_back({Cell{d, n}, {}, {}, {}});

    std::vector<RunRecord> jobs;
    for (const auto &c : result.cells)
        for (int e = 0; e < spec.envsPerCell; ++e)
            for (Method m : spec.methods)
            {
                RunRecord r;
                r.cell = c.cell;
                r.env = e;
                r.seed = spec.seedFor(e);
                r.method = m;
                jobs.push_back(std::move(r));
            }

    std::atomic<std::size_t> next{0};
    std::mutex progressMutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
        {
            RunRecord &r = jobs[i];
            const auto started = std::chrono::steady_clock::now();
            try
            {
                orchestrator::PlanRequest req;
                req.scenario = scenarioFor(spec, r.cell, r.env);
                req.timeLimit = spec.timeLimit;
                req.sampleBudget = spec.sampleBudget;
                req.optimizer = spec.optimizer;
                const auto res = orchestrator::run(r.method, req);
                r.trace = res.trace;
                r.finalCost = res.bestCost;
                r.success = res.bestPath.has_value();
                r.bestPath = res.bestPath;
                r.optimizations = res.optimizations;
                r.rejectedOptimizations = res.rejectedOptimizations;
                r.samples = res.samples;
            }
            catch (const std::exception &e)
            {
                r.error = e.what();
                r.success = false;
                r.finalCost = kInf;
            }
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            if (progress)
            {
                const std::lock_guard lock(progressMutex);
                progress(r);
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    if (n == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }

    std::size_t k = 0;
    for (auto &c : result.cells)
    {
        for (int e = 0; e < spec.envsPerCell; ++e)
            for (std::size_t m = 0; m < spec.methods.size(); ++m)
                c.runs.push_back(std::move(jobs[k++]));
        aggregate(c, spec);
    }
    return result;
}

// ---------------------------------------------------------------- output

RoadmapLines linesOf(const roadmap::Roadmap &rm)
{
    RoadmapLines out;
    for (const auto &v : rm.vertices())
        out.vertices.push_back(v.q);
    for (const auto &e : rm.edges())
        out.edges.emplace_back(e.u, e.v);
    return out;
}

namespace
{
const char *methodColor(Method m)
{
    switch (m)
    {
    case Method::IosMp:
        return "#d62728";
    case Method::PrmStar:
        return "#1f77b4";
    case Method::OptOnly:
        return "#2ca02c";
    case Method::IosMpNoShare:
        return "#9467bd";
    }
    return "#000000";
}

std::string cellName(const Cell &c)
{
    return "d" + std::to_string(c.dim) + "_n" + std::to_string(c.obstacles);
}

std::string runsCsv(const CellResult &cell)
{
    std::ostringstream out;
    out << "env,seed,method,success,final_cost,final_ratio,optimizations,rejected_optimizations,samples,seconds,error\n";
    for (const auto &r : cell.runs)
    {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << r.env << ',' << r.seed << ',' << orchestrator::toString(r.method) << ',' << (r.success ? 1 : 0) << ','
            << formatDouble(r.finalCost) << ',' << formatDouble(cell.finalRatio(r.env, r.method)) << ','
            << r.optimizations << ',' << r.rejectedOptimizations << ',' << r.samples << ','
            << formatDouble(r.seconds) << ',' << err << '\n';
    }
    return out.str();
}
}  // namespace

std::filesystem::path writeSuiteOutputs(const SuiteResult &result, const std::filesystem::path &outDir)
{
    const auto dir = outDir / (result.spec.name + "-" + result.spec.hash());
    std::filesystem::create_directories(dir);
    io::writeText(dir / "suite.yaml", result.spec.canonical());
    for (const auto &cell : result.cells)
    {
        const auto cdir = dir / cellName(cell.cell);
        io::writeText(cdir / "aggregate.csv", cell.aggregateCsv());
        io::writeText(cdir / "runs.csv", runsCsv(cell));
        for (const auto &r : cell.runs)
            io::writeText(cdir / "traces" /
                              ("env" + std::to_string(r.env) + "_" + orchestrator::toString(r.method) + ".csv"),
                          r.trace.toCsv());
        for (int e = 0; e < result.spec.envsPerCell; ++e)
        {
            Scenario s;
            try
            {
                s = scenarioFor(result.spec, cell.cell, e);
            }
            catch (const std::exception &)
            {
                continue;
            }
            if (!isPlanar(s))
                continue;
            std::vector<StyledPath> paths;
            for (const auto &r : cell.runs)
                if (r.env == e && r.bestPath)
                    paths.push_back({*r.bestPath, methodColor(r.method), 2.0});
            io::writeText(cdir / "scenes" / ("env" + std::to_string(e) + ".svg"), renderScene2D(s, nullptr, paths));
        }
    }
    return dir;
}

// ---------------------------------------------------------------- svg

namespace
{
struct Viewport
{
    Vec lo, hi;

    double x(double v) const
    {
        return kSvgMargin + kSvgSize * (v - lo[0]) / (hi[0] - lo[0]);
    }
    double y(double v) const
    {
        return kSvgMargin + kSvgSize * (hi[1] - v) / (hi[1] - lo[1]);
    }
    double r(double v) const
    {
        return kSvgSize * v / (hi[0] - lo[0]);
    }
};

std::string num(double v)
{
    return formatDouble(v);
}
}  // namespace

std::string renderScene2D(const Scenario &s, const RoadmapLines *roadmap, const std::vector<StyledPath> &paths)
{
    if (!isPlanar(s))
        throw UsageError("scene rendering supports planar point-robot scenarios only");
    const auto &b = robot::boundsOf(s.robot);
    const Viewport v{b.lower, b.upper};
    const double full = kSvgSize + 2 * kSvgMargin;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(full) << "\" height=\"" << num(full)
        << "\" viewBox=\"0 0 " << num(full) << ' ' << num(full) << "\">\n";
    out << "<rect class=\"box\" x=\"" << num(kSvgMargin) << "\" y=\"" << num(kSvgMargin) << "\" width=\""
        << num(kSvgSize) << "\" height=\"" << num(kSvgSize) << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (const auto &o : s.obstacles)
    {
        const auto &h = std::get<geometry::Hypersphere>(o);
        out << "<circle class=\"obstacle\" cx=\"" << num(v.x(h.center[0])) << "\" cy=\"" << num(v.y(h.center[1]))
            << "\" r=\"" << num(v.r(h.radius)) << "\" fill=\"#7f7f7f\"/>\n";
    }
    if (roadmap)
        for (const auto &[a, c] : roadmap->edges)
        {
            const auto &p = roadmap->vertices[a];
            const auto &q = roadmap->vertices[c];
            out << "<line class=\"edge\" x1=\"" << num(v.x(p[0])) << "\" y1=\"" << num(v.y(p[1])) << "\" x2=\""
                << num(v.x(q[0])) << "\" y2=\"" << num(v.y(q[1])) << "\" stroke=\"#c7c7c7\" stroke-width=\"0.5\"/>\n";
        }
    for (const auto &sp : paths)
    {
        out << "<polyline class=\"path\" fill=\"none\" stroke=\"" << sp.stroke << "\" stroke-width=\""
            << num(sp.width) << "\" points=\"";
        for (std::size_t i = 0; i < sp.path.size(); ++i)
            out << (i ? " " : "") << num(v.x(sp.path.waypoints[i][0])) << ',' << num(v.y(sp.path.waypoints[i][1]));
        out << "\"/>\n";
    }
    const double mark = 4.0;
    out << "<rect class=\"start\" x=\"" << num(v.x(s.start[0]) - mark) << "\" y=\"" << num(v.y(s.start[1]) - mark)
        << "\" width=\"" << num(2 * mark) << "\" height=\"" << num(2 * mark) << "\" fill=\"#2ca02c\"/>\n";
    if (const auto *g = std::get_if<SingleConfigGoal>(&s.goal))
        out << "<rect class=\"goal\" x=\"" << num(v.x(g->q[0]) - mark) << "\" y=\"" << num(v.y(g->q[1]) - mark)
            << "\" width=\"" << num(2 * mark) << "\" height=\"" << num(2 * mark) << "\" fill=\"#ff7f0e\"/>\n";
    else
    {
        // An ellipse keeps the circle elements reserved for obstacles.
        const auto &region = std::get<WorkspaceRegionGoal>(s.goal);
        out << "<ellipse class=\"goal\" cx=\"" << num(v.x(region.center[0])) << "\" cy=\""
            << num(v.y(region.center[1])) << "\" rx=\"" << num(v.r(region.radius)) << "\" ry=\""
            << num(kSvgSize * region.radius / (v.hi[1] - v.lo[1]))
            << "\" fill=\"none\" stroke=\"#ff7f0e\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}
}  // namespace iosmp::bench
