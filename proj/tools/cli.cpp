#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iosmp/bench.hpp"
#include "iosmp/format.hpp"
#include "iosmp/io.hpp"
#include "iosmp/orchestrator.hpp"

namespace iosmp::cli
{
namespace
{
namespace fs = std::filesystem;

/// Seed from IOSMP_SEED, if set. Malformed values are a usage error.
std::optional<std::uint64_t> seedOverride()
{
    const char *env = std::getenv("IOSMP_SEED");
    if (env == nullptr || *env == '\0')
        return std::nullopt;
    std::uint64_t v = 0;
    std::istringstream in(env);
    if (!(in >> v) || !in.eof())
        throw InputError(std::string("IOSMP_SEED must be an unsigned integer, got '") + env + "'");
    return v;
}

std::string yamlString(const std::string &s)
{
    // Double-quoted YAML scalar; escapes the two characters that matter in file names and argv.
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string indented(const std::string &text, const std::string &pad)
{
    std::string out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out += pad + line + "\n";
    return out;
}

struct Manifest
{
    std::string command;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> fields;
    std::string scenario;
    std::string optimizer;
    std::vector<std::pair<std::string, std::string>> outputs;

    std::string text() const
    {
        std::ostringstream m;
        m << "format: iosmp-manifest/1\n";
        m << "version: " << IOSMP_VERSION << '\n';
        m << "command: " << command << '\n';
        m << "args: [";
        for (std::size_t i = 0; i < args.size(); ++i)
            m << (i ? ", " : "") << yamlString(args[i]);
        m << "]\n";
        for (const auto &[k, v] : fields)
            m << k << ": " << v << '\n';
        if (!optimizer.empty())
            m << "optimizer:\n" << optimizer;
        if (!scenario.empty())
            m << "scenario:\n" << indented(scenario, "  ");
        if (!outputs.empty())
        {
            m << "outputs:\n";
            for (const auto &[k, v] : outputs)
                m << "  " << k << ": " << yamlString(v) << '\n';
        }
        return m.str();
    }
};

// ---------------------------------------------------------------- gen-env

struct GenEnvArgs
{
    int dim{2};
    int obstacles{25};
    std::optional<std::uint64_t> seed;
    double radiusMin{0.05};
    double radiusMax{0.2};
    std::string out;
};

int genEnv(const GenEnvArgs &a, std::ostream &out)
{
    RandomEnvParams p;
    p.dim = a.dim;
    p.obstacleCount = a.obstacles;
    p.radiusMin = a.radiusMin;
    p.radiusMax = a.radiusMax;
    p.seed = a.seed ? *a.seed : seedOverride().value_or(0);
    const std::string text = io::formatScenario(generateRandomEnv(p));
    if (a.out.empty())
        out << text;
    else
        io::writeText(a.out, text);
    return kOk;
}

// ---------------------------------------------------------------- plan

struct PlanArgs
{
    std::string scenario;
    std::string method{"iosmp"};
    std::optional<double> time;
    std::optional<std::size_t> samples;
    std::string trace;
    bool noShare{false};
    std::string config;
    std::string pathOut;
    std::string roadmapOut;
    std::string manifest;
};

int plan(const PlanArgs &a, const std::vector<std::string> &argv, std::ostream &out)
{
    Scenario s = io::readScenario(a.scenario);
    if (const auto seed = seedOverride())
        s.seed = *seed;
    orchestrator::Method method = orchestrator::parseMethod(a.method);
    if (a.noShare)
    {
        if (method != orchestrator::Method::IosMp)
            throw InputError("--no-share only applies to the iosmp method");
        method = orchestrator::Method::IosMpNoShare;
    }
    orchestrator::PlanRequest req;
    req.scenario = s;
    req.timeLimit = a.time;
    req.sampleBudget = a.samples;
    if (!a.config.empty())
        req.optimizer = io::parseOptimizerConfig(io::readText(a.config), a.config);

    const auto result = orchestrator::run(method, req);

    Manifest m;
    m.command = "plan";
    m.args = argv;
    m.fields.push_back({"method", orchestrator::toString(method)});
    m.fields.push_back({"seed", std::to_string(s.seed)});
    if (a.time)
        m.fields.push_back({"timeLimit", formatDouble(*a.time)});
    else
        m.fields.push_back({"sampleBudget", std::to_string(*a.samples)});
    m.optimizer = io::formatOptimizerConfig(req.optimizer, 2);
    m.scenario = io::formatScenario(s);

    if (!a.trace.empty())
    {
        io::writeText(a.trace, result.trace.toCsv());
        m.outputs.push_back({"trace", a.trace});
    }
    if (!a.pathOut.empty() && result.bestPath)
    {
        io::writeText(a.pathOut, io::formatPath(*result.bestPath));
        m.outputs.push_back({"path", a.pathOut});
    }
    if (!a.roadmapOut.empty())
    {
        if (!result.roadmap)
            throw InputError("--roadmap-out needs a roadmap-based method");
        io::writeText(a.roadmapOut, io::formatRoadmap(*result.roadmap));
        m.outputs.push_back({"roadmap", a.roadmapOut});
    }
    // The manifest sits next to the first output unless placed explicitly.
    std::string manifest = a.manifest;
    if (manifest.empty() && !m.outputs.empty())
        manifest = m.outputs.front().second + ".manifest.yaml";
    if (!manifest.empty())
        io::writeText(manifest, m.text());

    out << "method: " << orchestrator::toString(method) << '\n';
    out << "iterations: " << result.iterations << '\n';
    out << "samples: " << result.samples << '\n';
    out << "best_cost: " << formatDouble(result.bestCost) << '\n';
    if (manifest.empty())
        out << "manifest:\n" << indented(m.text(), "  ");
    return result.bestPath ? kOk : kNoPath;
}

// ---------------------------------------------------------------- bench

struct BenchArgs
{
    std::string suite;
    std::string out;
    int workers{1};
};

int bench(const BenchArgs &a, const std::vector<std::string> &argv, std::ostream &out)
{
    bench::SuiteSpec spec = bench::readSuite(a.suite);
    if (const auto seed = seedOverride())
    {
        spec.seeds.clear();
        spec.seedBase = *seed;
    }
    const auto result = bench::runSuite(spec, a.workers, [&](const bench::RunRecord &r) {
        out << "d" << r.cell.dim << "_n" << r.cell.obstacles << " env " << r.env << ' '
            << orchestrator::toString(r.method) << ": " << (r.success ? formatDouble(r.finalCost) : "no path")
            << (r.error.empty() ? "" : " (" + r.error + ")") << '\n';
    });
    const auto dir = bench::writeSuiteOutputs(result, a.out);
    Manifest m;
    m.command = "bench";
    m.args = argv;
    m.fields.push_back({"suite", yamlString(a.suite)});
    m.fields.push_back({"workers", std::to_string(a.workers)});
    m.fields.push_back({"hash", spec.hash()});
    m.optimizer = io::formatOptimizerConfig(spec.optimizer, 2);
    io::writeText(dir / "manifest.yaml", m.text());
    for (const auto &c : result.cells)
        for (auto method : spec.methods)
            out << "d" << c.cell.dim << "_n" << c.cell.obstacles << ' ' << orchestrator::toString(method)
                << ": successes " << c.successes(method) << '/' << spec.envsPerCell << ", median final ratio "
                << formatDouble(c.medianFinalRatio(method)) << '\n';
    out << "results: " << dir.string() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- render

struct RenderArgs
{
    std::string scenario;
    std::vector<std::string> paths;
    std::string roadmap;
    std::string out;
};

int render(const RenderArgs &a, std::ostream &out)
{
    const Scenario s = io::readScenario(a.scenario);
    static const char *colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"};
    std::vector<bench::StyledPath> paths;
    for (std::size_t i = 0; i < a.paths.size(); ++i)
        paths.push_back({io::readPath(a.paths[i]), colors[i % 5], 2.0});
    std::optional<bench::RoadmapLines> rm;
    if (!a.roadmap.empty())
        rm = io::parseRoadmap(io::readText(a.roadmap), a.roadmap);
    const std::string svg = bench::renderScene2D(s, rm ? &*rm : nullptr, paths);
    if (a.out.empty())
        out << svg;
    else
        io::writeText(a.out, svg);
    return kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs
{
    std::string scenario;
    std::string path;
    int resolutionScale{1};
};

int validate(const ValidateArgs &a, std::ostream &out)
{
    const Scenario s = io::readScenario(a.scenario);
    const Path p = io::readPath(a.path);
    for (const auto &q : p.waypoints)
        if (static_cast<std::size_t>(q.size()) != s.dim())
            throw InputError("path waypoints have dimension " + std::to_string(q.size()) + ", scenario has " +
                             std::to_string(s.dim()));
    const auto check = optimizer::checkPath(s, p, a.resolutionScale);
    out << "valid: " << (check.valid ? "true" : "false") << '\n';
    out << "min_clearance: " << formatDouble(check.minConstraint) << '\n';
    out << "length: " << formatDouble(pathLength(p)) << '\n';
    const auto eval = s.evaluator();
    const auto &q0 = p.waypoints[check.worstEdge];
    const auto &q1 = p.waypoints[check.worstEdge + 1];
    const auto report = eval.edgeReport(q0, q1, eval.defaultResolution(q0, q1) * std::max(a.resolutionScale, 1));
    out << "worst_edge: " << check.worstEdge << '\n';
    if (std::isinf(report.minValue))
        out << "worst_constraint: none\n";
    else
    {
        out << "worst_constraint: " << robot::toString(report.kind) << ' ' << report.index;
        if (report.kind == robot::ConstraintKind::Obstacle && eval.isArm())
            out << " body " << report.body;
        out << '\n';
    }
    if (p.front() != s.start)
        out << "error: path does not begin at the start configuration\n";
    if (!isGoalConfig(s, p.back()))
        out << "error: path does not end in the goal\n";
    return check.valid ? kOk : kNoPath;
}
}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Interleaved roadmap and path optimization planner", "iosmp"};
    app.require_subcommand(1);

    GenEnvArgs ge;
    auto *genCmd = app.add_subcommand("gen-env", "Generate a seeded random hypersphere environment");
    genCmd->add_option("--dim", ge.dim, "Configuration space dimension")->check(CLI::Range(2, 8));
    genCmd->add_option("--obstacles", ge.obstacles, "Number of hyperspheres")->check(CLI::NonNegativeNumber);
    genCmd->add_option("--seed", ge.seed, "Environment seed (default: IOSMP_SEED or 0)");
    genCmd->add_option("--radius-min", ge.radiusMin);
    genCmd->add_option("--radius-max", ge.radiusMax);
    genCmd->add_option("--out", ge.out, "Scenario file to write (default: stdout)");

    PlanArgs pa;
    auto *planCmd = app.add_subcommand("plan", "Plan on a scenario and report the best path over time");
    planCmd->add_option("--scenario", pa.scenario)->required();
    planCmd->add_option("--method", pa.method, "iosmp, prm-star, opt-only or iosmp-noshare");
    auto *timeOpt = planCmd->add_option("--time", pa.time, "Wall-clock limit in seconds");
    auto *samplesOpt = planCmd->add_option("--samples", pa.samples, "Sample budget (deterministic)");
    timeOpt->excludes(samplesOpt);
    planCmd->add_option("--trace", pa.trace, "Trace CSV to write");
    planCmd->add_flag("--no-share", pa.noShare, "Do not inject optimized paths into the roadmap");
    planCmd->add_option("--config", pa.config, "Optimizer configuration file");
    planCmd->add_option("--path-out", pa.pathOut, "Best path file to write");
    planCmd->add_option("--roadmap-out", pa.roadmapOut, "Roadmap dump to write");
    planCmd->add_option("--manifest", pa.manifest, "Manifest file (default: next to the first output)");

    BenchArgs ba;
    auto *benchCmd = app.add_subcommand("bench", "Run a benchmark suite");
    benchCmd->add_option("--suite", ba.suite)->required();
    benchCmd->add_option("--out", ba.out)->required();
    benchCmd->add_option("--workers", ba.workers)->check(CLI::PositiveNumber);

    RenderArgs ra;
    auto *renderCmd = app.add_subcommand("render", "Render a planar scenario as SVG");
    renderCmd->add_option("--scenario", ra.scenario)->required();
    renderCmd->add_option("--path", ra.paths, "Path file to draw (repeatable)");
    renderCmd->add_option("--roadmap", ra.roadmap, "Roadmap dump to draw");
    renderCmd->add_option("--out", ra.out, "SVG file to write (default: stdout)");

    ValidateArgs va;
    auto *validateCmd = app.add_subcommand("validate", "Re-check a path against a scenario");
    validateCmd->add_option("--scenario", va.scenario)->required();
    validateCmd->add_option("--path", va.path)->required();
    validateCmd->add_option("--resolution-scale", va.resolutionScale)->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &)
    {
        out << app.help();
        return kOk;
    }
    catch (const CLI::CallForAllHelp &)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    }
    catch (const CLI::ParseError &e)
    {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    if (planCmd->parsed() && !pa.time && !pa.samples)
    {
        err << "usage error: plan needs --time or --samples\n";
        return kUsage;
    }

    try
    {
        if (genCmd->parsed())
            return genEnv(ge, out);
        if (planCmd->parsed())
            return plan(pa, args, out);
        if (benchCmd->parsed())
            return bench(ba, args, out);
        if (renderCmd->parsed())
            return render(ra, out);
        return validate(va, out);
    }
    catch (const io::FormatError &e)
    {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    catch (const InputError &e)
    {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    catch (const UsageError &e)
    {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    catch (const GenerationError &e)
    {
        err << "error: " << e.what() << '\n';
        return kNoPath;
    }
}
}  // namespace iosmp::cli
