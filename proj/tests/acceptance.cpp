// Acceptance harness: one PASS/FAIL line per criterion. `--only N` runs a single criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <queue>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cli.hpp"
#include "iosmp/bench.hpp"
#include "iosmp/format.hpp"
#include "iosmp/io.hpp"
#include "iosmp/orchestrator.hpp"
#include "test_support.hpp"

using namespace iosmp;
namespace fs = std::filesystem;
using orchestrator::Method;

namespace
{
const fs::path kSource = IOSMP_SOURCE_DIR;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Verdict
{
    bool pass{false};
    std::string detail;
};

std::string str(double v)
{
    std::ostringstream o;
    o << std::setprecision(6) << v;
    return o.str();
}

int workerCount()
{
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

fs::path scratch(const std::string &name)
{
    const auto dir = fs::temp_directory_path() / ("iosmp_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------- 1

Verdict formulaFidelity()
{
    using optimizer::psi;
    double worst = 0.0;
    auto expect = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

    expect(psi(1.0, 0.0, 1.0), 0.0);
    expect(psi(-1.0, 2.0, 0.5), 3.0);
    Rng rng(1);
    for (int i = 0; i < 100; ++i)
    {
        const double sigma = rng.uniform(0.0, 3.0), mu = rng.uniform(0.01, 2.0);
        // both branches meet at gamma = mu sigma
        expect(psi(mu * sigma, sigma, mu), -0.5 * mu * sigma * sigma);
        expect(psi(std::nextafter(mu * sigma, -kInf), sigma, mu), -0.5 * mu * sigma * sigma);
    }

    optimizer::ALState st;
    st.lambda = test::vec({1.0, 1.0, 0.7});
    st.mu = 0.25;
    st.muUp = 0.5;
    auto next = optimizer::updateMultipliers(st, test::vec({0.5, -0.5, 0.0}));
    expect(next.lambda[0], 0.0);
    expect(next.lambda[1], 1.0 + 0.5 / 0.25);
    expect(next.lambda[2], 0.7);
    expect(next.mu, 0.125);
    st.mu = 0.5;
    next = optimizer::updateMultipliers(st, test::vec({0.5, -0.5, 0.0}));
    expect(next.lambda[1], 2.0);
    return {worst <= 1e-12, "max abs error " + str(worst)};
}

// ---------------------------------------------------------------- 2

struct GradientStats
{
    int cases{0};
    int skipped{0};
    double worst{0.0};
};

// Draws cases until `want` non-degenerate ones have been compared.
GradientStats gradientCases(int want, const std::function<bool(Rng &, Vec &, Vec &, std::function<double(const Vec &)> &)> &draw,
                            std::uint64_t seed)
{
    GradientStats s;
    Rng rng(seed);
    while (s.cases < want)
    {
        Vec x, analytic;
        std::function<double(const Vec &)> f;
        if (!draw(rng, x, analytic, f) || test::nearKink(f, x, 1e-6, 1e-3))
        {
            ++s.skipped;
            continue;
        }
        s.worst = std::max(s.worst, test::relativeError(analytic, test::centralDifference(f, x)));
        ++s.cases;
    }
    return s;
}

Verdict gradientCorrectness()
{
    constexpr int kCases = 1000;
    std::vector<std::pair<std::string, GradientStats>> all;

    for (bool squared : {true, false})
        all.emplace_back(squared ? "clearance(value)" : "clearance(distance)",
                         gradientCases(kCases,
                                       [squared](Rng &rng, Vec &x, Vec &g, auto &f) {
                                           const auto d = static_cast<Eigen::Index>(2 + rng.next() % 7);
                                           const bool capsule = rng.uniform() < 0.5;
                                           const auto dim = capsule ? Eigen::Index(3) : d;
                                           geometry::ObstaclePrimitive o;
                                           if (capsule)
                                               o = geometry::Capsule{{test::randomVec(rng, 3), test::randomVec(rng, 3)},
                                                                     rng.uniform(0.02, 0.2)};
                                           else
                                               o = geometry::Hypersphere{test::randomVec(rng, dim), rng.uniform(0.02, 0.3)};
                                           const double inflate = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 0.1);
                                           x = test::randomVec(rng, 2 * dim);
                                           auto eval = [o, dim, inflate, squared](const Vec &y, bool grad) {
                                               return geometry::clearance({y.head(dim), y.tail(dim)}, o, grad, inflate);
                                           };
                                           const auto c = eval(x, true);
                                           if (std::abs(c.distance) < 1e-4)
                                               return false;
                                           g = squared ? c.gradient : c.distanceGradient;
                                           f = [eval, squared](const Vec &y) {
                                               const auto c = eval(y, false);
                                               return squared ? c.value : c.distance;
                                           };
                                           return true;
                                       },
                                       21 + squared));

    {
        Scenario arm;
        arm.robot = robot::defaultSevenDofArm();
        arm.start = Vec::Zero(7);
        arm.goal = WorkspaceRegionGoal{test::vec({0.4, 0.1, 0.5}), 0.1};
        all.emplace_back("goal region", gradientCases(kCases,
                                                      [&arm](Rng &rng, Vec &x, Vec &g, auto &f) {
                                                          x = test::randomVec(rng, 7, -2.8, 2.8);
                                                          g = goalRegionConstraint(arm, x).gradient;
                                                          f = [&arm](const Vec &y) { return goalRegionConstraint(arm, y).value; };
                                                          return true;
                                                      },
                                                      23));
    }

    all.emplace_back("pathLength", gradientCases(kCases,
                                                 [](Rng &rng, Vec &x, Vec &g, auto &f) {
                                                     const auto d = static_cast<Eigen::Index>(2 + rng.next() % 7);
                                                     const std::size_t n = 2 + rng.next() % 19;
                                                     x = test::randomVec(rng, d * static_cast<Eigen::Index>(n), -1.0, 1.0);
                                                     auto unflat = [d, n](const Vec &y) {
                                                         Path p;
                                                         for (std::size_t i = 0; i < n; ++i)
                                                             p.waypoints.push_back(y.segment(static_cast<Eigen::Index>(i) * d, d));
                                                         return p;
                                                     };
                                                     g = optimizer::pathLengthGradient(unflat(x));
                                                     f = [unflat](const Vec &y) { return pathLength(unflat(y)); };
                                                     return true;
                                                 },
                                                 24));

    all.emplace_back("augmented Lagrangian",
                     gradientCases(kCases,
                                   [](Rng &rng, Vec &x, Vec &g, auto &f) {
                                       RandomEnvParams params;
                                       params.dim = static_cast<int>(2 + rng.next() % 3);
                                       params.obstacleCount = 10;
                                       params.seed = rng.next();
                                       Scenario s = generateRandomEnv(params);
                                       if (rng.uniform() < 0.3)
                                           s.goal = WorkspaceRegionGoal{std::get<SingleConfigGoal>(s.goal).q, 0.1};
                                       const Config end = s.hasRegionGoal()
                                                              ? Config(std::get<WorkspaceRegionGoal>(s.goal).center)
                                                              : std::get<SingleConfigGoal>(s.goal).q;
                                       Path p = straightLine(s.start, end, 8);
                                       for (std::size_t i = 1; i < p.size(); ++i)
                                           p.waypoints[i] += test::randomVec(rng, params.dim, -0.15, 0.15);
                                       if (!s.hasRegionGoal())
                                           p.waypoints.back() = end;
                                       auto problem = std::make_shared<optimizer::PathProblem>(s, optimizer::OptimizerConfig{});
                                       optimizer::ALState st;
                                       st.lambda = test::randomVec(rng, static_cast<Eigen::Index>(problem->constraintCount(p)), 0.0, 2.0);
                                       st.mu = rng.uniform(0.05, 1.0);
                                       const auto v = optimizer::augmentedLagrangian(*problem, p, st, true);
                                       x = problem->pack(p);
                                       g = v.gradient;
                                       f = [problem, p, st](const Vec &y) mutable {
                                           problem->unpack(y, p);
                                           return optimizer::augmentedLagrangian(*problem, p, st, false).value;
                                       };
                                       return true;
                                   },
                                   25));

    bool pass = true;
    std::string detail;
    for (const auto &[name, s] : all)
    {
        pass = pass && s.cases >= kCases && s.worst <= 1e-4;
        detail += (detail.empty() ? "" : "; ") + name + " " + std::to_string(s.cases) + " cases worst " + str(s.worst);
    }
    return {pass, detail};
}

// ---------------------------------------------------------------- 3

Verdict convexOptimality()
{
    int hits = 0;
    double worst = 0.0;
    Rng rng(3);
    for (int run = 0; run < 100; ++run)
    {
        const int d = 2 + run % 7;
        const Scenario s = emptyBox(d);
        const Config goal = std::get<SingleConfigGoal>(s.goal).q;
        const Vec u = (goal - s.start).normalized();
        Vec w = test::randomVec(rng, d, -1.0, 1.0);
        w -= w.dot(u) * u;
        w.normalize();
        Path p = straightLine(s.start, goal, 20);
        for (std::size_t i = 1; i + 1 < p.size(); ++i)
            p.waypoints[i] += (i % 2 ? 1.0 : -1.0) * rng.uniform(0.0, 0.3) * w;
        const auto r = optimizer::optimize(p, s);
        const double err = std::abs(r.finalCost - (goal - s.start).norm());
        worst = std::max(worst, err);
        hits += err <= 1e-6;
    }
    return {hits >= 99, std::to_string(hits) + "/100 within 1e-6, worst error " + str(worst)};
}

// ---------------------------------------------------------------- 4

// Shortest path on a 1001 x 1001 lattice over the unit square avoiding the open disk. Each node
// links to every node reachable by a primitive offset with |dx|, |dy| <= stencil whose segment
// stays outside the disk, so the lattice path bends only where the continuous optimum does.
double gridOracle(const Vec &center, double radius, const Vec &start, const Vec &goal, int stencil)
{
    constexpr int kN = 1001;
    const double h = 1.0 / (kN - 1);
    auto id = [](int i, int j) { return static_cast<std::size_t>(j) * kN + static_cast<std::size_t>(i); };
    auto pos = [h](int i, int j) { return Eigen::Vector2d(i * h, j * h); };
    const Eigen::Vector2d c(center[0], center[1]);
    auto free = [&](const Eigen::Vector2d &a, const Eigen::Vector2d &b) {
        const Eigen::Vector2d ab = b - a;
        const double t = std::clamp((c - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        return (a + t * ab - c).norm() >= radius;
    };
    std::vector<std::pair<int, int>> offsets;
    for (int dx = -stencil; dx <= stencil; ++dx)
        for (int dy = -stencil; dy <= stencil; ++dy)
            if ((dx || dy) && std::gcd(dx, dy) == 1)
                offsets.emplace_back(dx, dy);

    const int si = static_cast<int>(std::lround(start[0] / h)), sj = static_cast<int>(std::lround(start[1] / h));
    const int gi = static_cast<int>(std::lround(goal[0] / h)), gj = static_cast<int>(std::lround(goal[1] / h));
    std::vector<double> dist(static_cast<std::size_t>(kN) * kN, kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[id(si, sj)] = 0.0;
    open.push({0.0, id(si, sj)});
    while (!open.empty())
    {
        const auto [du, u] = open.top();
        open.pop();
        if (du > dist[u])
            continue;
        const int i = static_cast<int>(u % kN), j = static_cast<int>(u / kN);
        if (i == gi && j == gj)
            return du;
        const Eigen::Vector2d a = pos(i, j);
        for (const auto &[dx, dy] : offsets)
        {
            const int ni = i + dx, nj = j + dy;
            if (ni < 0 || nj < 0 || ni >= kN || nj >= kN)
                continue;
            const double w = h * std::hypot(dx, dy);
            const std::size_t v = id(ni, nj);
            if (du + w >= dist[v])
                continue;
            if (!free(a, pos(ni, nj)))
                continue;
            dist[v] = du + w;
            open.push({dist[v], v});
        }
    }
    return kInf;
}

Verdict singleObstacleOracle()
{
    Scenario s = emptyBox(2);
    s.obstacles.push_back(geometry::Hypersphere{test::vec({0.5, 0.5}), 0.2});
    const Config goal = std::get<SingleConfigGoal>(s.goal).q;
    const auto r = optimizer::optimize(straightLine(s.start, goal, 20), s);
    const double oracle = gridOracle(test::vec({0.5, 0.5}), 0.2, s.start, goal, 8);
    // tangent, arc, tangent
    const double continuous = 2.0 * std::sqrt(0.25 - 0.04) + 0.2 * (M_PI - 2.0 * std::acos(0.2 / 0.5));
    const double gap = std::abs(r.finalCost - oracle);
    return {r.feasible && gap <= 1e-3, "optimized " + str(r.finalCost) + (r.feasible ? " (feasible)" : " (infeasible)") +
                                           ", grid oracle " + str(oracle) + ", continuous optimum " +
                                           str(continuous) + ", gap " + str(gap) + " vs 1e-3"};
}

// ---------------------------------------------------------------- 5

Verdict supergraph()
{
    bool pass = true;
    std::string detail;
    for (const auto &[dim, obstacles] : {std::pair{2, 25}, std::pair{3, 50}})
    {
        int compared = 0, withInjection = 0, identical = 0;
        for (std::uint64_t seed = 0; withInjection < 10 && seed < 400; ++seed)
        {
            RandomEnvParams params;
            params.dim = dim;
            params.obstacleCount = obstacles;
            params.seed = seed;
            orchestrator::PlanRequest req;
            try
            {
                req.scenario = generateRandomEnv(params);
            }
            catch (const GenerationError &)
            {
                continue;
            }
            req.sampleBudget = 1000;
            req.recordTrace = false;
            const auto a = orchestrator::plan(req);
            const auto b = orchestrator::planSamplingOnly(req);
            ++compared;
            identical += a.roadmap->sampledSubgraph() == b.roadmap->sampledSubgraph();
            withInjection += a.optimizations - a.rejectedOptimizations > 0;
        }
        pass = pass && identical == compared && withInjection >= 10;
        detail += (detail.empty() ? "" : "; ") + std::to_string(dim) + "D/" + std::to_string(obstacles) + ": " +
                  std::to_string(identical) + "/" + std::to_string(compared) + " identical, " +
                  std::to_string(withInjection) + " seeds with injected paths";
    }
    return {pass, detail};
}

// ---------------------------------------------------------------- 6

Verdict anytime()
{
    int runs = 0, solved = 0, events = 0, bad = 0;
    std::string firstProblem;
    auto flag = [&](const std::string &what) {
        ++bad;
        if (firstProblem.empty())
            firstProblem = what;
    };
    for (const auto &[dim, obstacles] : {std::pair{2, 15}, std::pair{3, 30}})
        for (std::uint64_t seed = 0; seed < 25; ++seed)
        {
            RandomEnvParams params;
            params.dim = dim;
            params.obstacleCount = obstacles;
            params.seed = seed;
            orchestrator::PlanRequest req;
            req.scenario = generateRandomEnv(params);
            req.sampleBudget = 1500;
            const std::string tag = std::to_string(dim) + "D seed " + std::to_string(seed);
            double last = kInf;
            req.onImprove = [&](const orchestrator::TraceEvent &e, const Path &p) {
                ++events;
                if (!(e.cost <= last))
                    flag(tag + ": cost increased");
                last = e.cost;
                if (!optimizer::checkPath(req.scenario, p, 10).valid)
                    flag(tag + ": reported path fails at 10x resolution");
                if (std::abs(pathLength(p) - e.cost) > 1e-9 * std::max(1.0, e.cost))
                    flag(tag + ": reported cost is not the path length");
            };
            const auto r = orchestrator::plan(req);
            ++runs;
            solved += r.bestPath.has_value();
            const auto &ev = r.trace.events;
            for (std::size_t i = 1; i < ev.size(); ++i)
                if (!(ev[i].cost <= ev[i - 1].cost) || ev[i].time < ev[i - 1].time)
                    flag(tag + ": trace not monotone");
        }
    return {bad == 0 && solved > 0, std::to_string(runs) + " runs, " + std::to_string(solved) + " solved, " +
                                        std::to_string(events) + " reported paths checked" +
                                        (firstProblem.empty() ? "" : ", first problem: " + firstProblem)};
}

// ---------------------------------------------------------------- 7

Verdict figureOrdering()
{
    const auto spec = bench::readSuite(kSource / "data" / "suites" / "fig2.yaml");
    const auto result = bench::runSuite(spec, workerCount());
    const auto dir = bench::writeSuiteOutputs(result, scratch("fig2"));
    bool pass = true;
    std::string detail;
    for (const auto &c : result.cells)
    {
        const double a = c.medianFinalRatio(Method::IosMp), b = c.medianFinalRatio(Method::PrmStar);
        pass = pass && a <= b;
        detail += (detail.empty() ? "" : "; ") + ("d" + std::to_string(c.cell.dim)) + " median ratio iosmp " + str(a) +
                  " vs prm_star " + str(b) + " (solved " + std::to_string(c.successes(Method::IosMp)) + "/" +
                  std::to_string(c.successes(Method::PrmStar)) + ")";
    }
    return {pass, detail + "; outputs " + dir.string()};
}

// ---------------------------------------------------------------- 8

Verdict optimizerOnlyHonesty()
{
    const auto spec = bench::readSuite(kSource / "data" / "suites" / "opt_only.yaml");
    const auto result = bench::runSuite(spec, workerCount());
    int successes = 0, bad = 0;
    for (const auto &c : result.cells)
        for (const auto &r : c.runs)
        {
            if (r.success)
            {
                ++successes;
                const bool ok = r.bestPath && std::isfinite(r.finalCost) &&
                                optimizer::checkPath(bench::scenarioFor(spec, c.cell, r.env), *r.bestPath, 10).valid;
                bad += !ok;
            }
            else
            {
                bad += r.bestPath.has_value() || !std::isinf(r.finalCost) || r.rejectedOptimizations != 1 ||
                       !r.error.empty();
            }
        }
    const int total = spec.envsPerCell;
    return {successes > 0 && successes < total && bad == 0,
            std::to_string(successes) + "/" + std::to_string(total) + " feasible, " + std::to_string(bad) +
                " misreported"};
}

// ---------------------------------------------------------------- 9

double median(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    if (n == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return n % 2 ? xs[n / 2] : (std::isinf(xs[n / 2]) ? kInf : 0.5 * (xs[n / 2 - 1] + xs[n / 2]));
}

Verdict sharingAblation()
{
    const auto spec = bench::readSuite(kSource / "data" / "suites" / "arm_sharing.yaml");
    const auto result = bench::runSuite(spec, workerCount());
    const auto dir = bench::writeSuiteOutputs(result, scratch("arm_sharing"));
    std::vector<double> share, noShare;
    int improvedByOptimizer = 0;
    for (const auto &r : result.cells.at(0).runs)
    {
        (r.method == Method::IosMp ? share : noShare).push_back(r.finalCost);
        improvedByOptimizer += r.optimizations > r.rejectedOptimizations;
    }
    const double a = median(share), b = median(noShare);
    return {a <= b, "median final cost shared " + str(a) + " vs no-share " + str(b) + " over " +
                        std::to_string(share.size()) + " seeds; " + std::to_string(improvedByOptimizer) + "/" +
                        std::to_string(share.size() + noShare.size()) +
                        " runs accepted an optimized path; outputs " + dir.string()};
}

// ---------------------------------------------------------------- 10

int cliRun(const std::vector<std::string> &args)
{
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

std::vector<std::pair<std::string, std::string>> filesUnder(const fs::path &root)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto &e : fs::recursive_directory_iterator(root))
        // Manifests record the argument lists and runs.csv records wall time; neither is a result.
        if (e.is_regular_file() && e.path().filename() != "runs.csv" &&
            e.path().filename().string().find("manifest") == std::string::npos)
            out.emplace_back(fs::relative(e.path(), root).string(), io::readText(e.path()));
    std::sort(out.begin(), out.end());
    return out;
}

Verdict determinism()
{
    std::vector<fs::path> dirs;
    for (const char *tag : {"a", "b"})
    {
        const auto d = scratch(std::string("det_") + tag);
        const auto s = (d / "env.yaml").string();
        cliRun({"gen-env", "--dim", "2", "--obstacles", "25", "--seed", "10", "--out", s});
        cliRun({"plan", "--scenario", s, "--samples", "1500", "--trace", (d / "trace.csv").string(), "--roadmap-out",
                (d / "roadmap.yaml").string(), "--path-out", (d / "path.yaml").string()});
        cliRun({"render", "--scenario", s, "--roadmap", (d / "roadmap.yaml").string(), "--path",
                (d / "path.yaml").string(), "--out", (d / "scene.svg").string()});
        const auto arm = (kSource / "data" / "scenarios" / "ladder_config.yaml").string();
        cliRun({"plan", "--scenario", arm, "--method", "prm-star", "--samples", "300", "--trace", (d / "arm_trace.csv").string(),
                "--roadmap-out", (d / "arm_roadmap.yaml").string()});
        io::writeText(d / "suite.yaml", "format: iosmp-suite/1\nname: det\ndims: [2]\nobstacleCounts: [25]\n"
                                        "envsPerCell: 3\nsampleBudget: 500\nmethods: [iosmp, prm_star]\nseedBase: 10\n");
        cliRun({"bench", "--suite", (d / "suite.yaml").string(), "--out", (d / "bench").string(), "--workers",
                tag[0] == 'a' ? "1" : "2"});
        dirs.push_back(d);
    }
    const auto a = filesUnder(dirs[0]), b = filesUnder(dirs[1]);
    int differing = 0;
    std::string first;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        if (a[i] != b[i])
        {
            ++differing;
            if (first.empty())
                first = a[i].first;
        }
    // every expected artifact must exist, or the comparison proves nothing
    const std::vector<std::string> expected{"trace.csv", "roadmap.yaml", "path.yaml", "scene.svg", "arm_trace.csv",
                                            "arm_roadmap.yaml"};
    int missing = 0;
    for (const auto &name : expected)
        missing += !fs::is_regular_file(dirs[0] / name);
    const bool pass = a.size() == b.size() && differing == 0 && missing == 0 && a.size() > expected.size();
    return {pass, std::to_string(a.size()) + " files compared, " + std::to_string(differing) + " differ" +
                      (first.empty() ? "" : " (first " + first + ")") + ", " + std::to_string(missing) + " missing"};
}
}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    app.add_option("--only", only, "Criterion numbers to run (default: all)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"formula fidelity", formulaFidelity},
        {"gradient correctness", gradientCorrectness},
        {"convex-case optimality", convexOptimality},
        {"single-obstacle oracle", singleObstacleOracle},
        {"supergraph property", supergraph},
        {"anytime monotonicity and validity", anytime},
        {"iosmp vs prm_star ordering", figureOrdering},
        {"optimizer-only honesty", optimizerOnlyHonesty},
        {"path-sharing ablation", sharingAblation},
        {"determinism", determinism},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const int n = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "criterion " << n << " " << criteria[i].first << ": " << (v.pass ? "PASS" : "FAIL") << " ("
                  << v.detail << "; " << str(secs) << " s)" << std::endl;
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
