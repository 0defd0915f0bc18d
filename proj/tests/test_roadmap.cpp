#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "iosmp/roadmap.hpp"
#include "test_support.hpp"

using namespace iosmp;
using namespace iosmp::roadmap;
using iosmp::test::vec;

namespace
{
// Most 2D/25 draws have no start-goal connection at all; these seeds do.
constexpr std::uint64_t kSolvableSeeds[] = {8, 10, 19, 21, 31, 33, 35, 36};

Scenario clutter(std::uint64_t seed, int obstacles = 25)
{
    RandomEnvParams params;
    params.seed = seed;
    params.obstacleCount = obstacles;
    return generateRandomEnv(params);
}

// Exhaustive search over simple paths from vertex 0 to any goal vertex.
double bruteShortest(const Roadmap &rm)
{
    const auto &vs = rm.vertices();
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(vs.size());
    for (const auto &e : rm.edges())
    {
        const double w = (vs[e.u].q - vs[e.v].q).norm();
        adj[e.u].emplace_back(e.v, w);
        adj[e.v].emplace_back(e.u, w);
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> onPath(vs.size(), false);
    std::function<void(std::size_t, double)> visit = [&](std::size_t u, double cost) {
        if (vs[u].goal)
            best = std::min(best, cost);
        onPath[u] = true;
        for (const auto &[v, w] : adj[u])
            if (!onPath[v])
                visit(v, cost + w);
        onPath[u] = false;
    };
    visit(0, 0.0);
    return best;
}

// Splits every edge at its midpoint; collinear pieces of a valid edge stay valid.
Path subdivide(const Path &p)
{
    Path out;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
    {
        out.waypoints.push_back(p.waypoints[i]);
        out.waypoints.push_back(0.5 * (p.waypoints[i] + p.waypoints[i + 1]));
    }
    out.waypoints.push_back(p.back());
    return out;
}

void drawSamples(Roadmap &rm, std::size_t count)
{
    for (std::size_t i = 0; i < count; ++i)
        rm.addSample();
}
}  // namespace

TEST_CASE("kOfN examples")
{
    CHECK(kOfN(1, 2) == 3);
    CHECK(kOfN(100, 2) == 19);
    for (std::size_t d = 2; d <= 8; ++d)
        for (std::size_t n = 1; n < 2000; ++n)
            CHECK(kOfN(n + 1, d) >= kOfN(n, d));
    CHECK_THROWS_AS(kOfN(0, 2), InputError);
    CHECK_THROWS_AS(kOfN(5, 1), InputError);
}

TEST_CASE("empty box: start and goal connect directly and samples connect to each other")
{
    Roadmap rm(emptyBox(2, 3));
    CHECK(rm.bestCost() == doctest::Approx(1.0));
    const auto sp = rm.shortestPath();
    REQUIRE(sp);
    CHECK(sp->size() == 2);

    drawSamples(rm, 2);
    REQUIRE(rm.vertices().size() == 4);
    bool linked = false;
    for (const auto &e : rm.edges())
        linked |= (e.u == 2 && e.v == 3) || (e.u == 3 && e.v == 2);
    CHECK(linked);
    CHECK(rm.sampledCount() == 2);
}

TEST_CASE("rejected samples leave the graph unchanged but advance the stream")
{
    Scenario s = emptyBox(2, 9);
    s.obstacles.push_back(geometry::Hypersphere{vec({0.5, 0.5}), 0.45});
    Roadmap a(s);
    Roadmap b(s);
    std::size_t rejections = 0;
    for (int i = 0; i < 200; ++i)
    {
        const std::size_t before = a.vertices().size();
        const auto outcome = a.addSample();
        b.addSample();
        if (!outcome.accepted)
        {
            CHECK(a.vertices().size() == before);
            ++rejections;
        }
    }
    CHECK(rejections > 0);
    CHECK(a.rejectedCount() == rejections);
    CHECK(a.samplesDrawn() == 200);
    CHECK(a.sampledSubgraph() == b.sampledSubgraph());
}

TEST_CASE("shortestPath picks the direct edge over a detour and reports disconnection")
{
    Scenario walled = emptyBox(2, 1);
    // a row of disks spanning the box blocks every start-goal connection
    for (int i = 0; i <= 10; ++i)
        walled.obstacles.push_back(geometry::Hypersphere{vec({0.1 * i, 0.5}), 0.08});
    Roadmap rm(walled);
    drawSamples(rm, 300);
    CHECK_FALSE(rm.shortestPath());
    CHECK_FALSE(rm.bestPath());
    CHECK(std::isinf(rm.bestCost()));

    Roadmap open(emptyBox(2, 1));
    drawSamples(open, 50);
    const auto sp = open.shortestPath();
    REQUIRE(sp);
    CHECK(pathLength(*sp) == doctest::Approx(1.0));
}

TEST_CASE("shortestPath and the incremental labels match exhaustive enumeration")
{
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed)
    {
        Scenario s = clutter(seed, 6);
        Roadmap rm(s);
        while (rm.vertices().size() < 12 && rm.samplesDrawn() < 200)
            rm.addSample();
        const double oracle = bruteShortest(rm);
        const auto sp = rm.shortestPath();
        CHECK(sp.has_value() == std::isfinite(oracle));
        if (sp)
        {
            CHECK(pathLength(*sp) == doctest::Approx(oracle).epsilon(1e-12));
            CHECK(rm.bestCost() == doctest::Approx(oracle).epsilon(1e-12));
            ++compared;
        }
    }
    CHECK(compared > 10);
}

TEST_CASE("region goals: sampled vertices in the region are targets")
{
    Scenario s = emptyBox(2, 4);
    s.goal = WorkspaceRegionGoal{vec({0.5, 0.9}), 0.1};
    Roadmap rm(s);
    CHECK(rm.vertices().size() == 1);
    drawSamples(rm, 300);
    const auto sp = rm.shortestPath();
    REQUIRE(sp);
    CHECK(isGoalConfig(s, sp->back()));
    CHECK(pathLength(*sp) == doctest::Approx(rm.bestCost()).epsilon(1e-12));
    CHECK(pathLength(*sp) >= 0.8 - 1e-12);
}

TEST_CASE("every stored edge re-validates and matches its length")
{
    Roadmap rm(clutter(5));
    drawSamples(rm, 400);
    for (const auto &e : rm.edges())
    {
        CHECK(e.u != e.v);
        CHECK(rm.evaluator().edgeValid(rm.vertices()[e.u].q, rm.vertices()[e.v].q));
        CHECK(e.length == doctest::Approx((rm.vertices()[e.u].q - rm.vertices()[e.v].q).norm()));
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto &e : rm.edges())
        CHECK(seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second);
}

TEST_CASE("injectPath adds Optimized vertices without touching the sampled count")
{
    Roadmap rm(clutter(kSolvableSeeds[0]));
    Budget budget = Budget::samples(3000);
    const auto p = rm.expandUntilImproved(std::numeric_limits<double>::infinity(), budget);
    REQUIRE(p);
    const Path injected = subdivide(subdivide(*p));
    const std::size_t sampled = rm.sampledCount();
    const std::size_t before = rm.vertices().size();
    rm.injectPath(injected);
    CHECK(rm.sampledCount() == sampled);
    CHECK(rm.vertices().size() == before + injected.size() - 2);
    for (std::size_t i = before; i < rm.vertices().size(); ++i)
        CHECK((rm.vertices()[i].origin == Origin::Optimized));
    const auto sp = rm.shortestPath();
    REQUIRE(sp);
    CHECK(pathLength(*sp) <= pathLength(injected) + 1e-12);
}

TEST_CASE("injectPath rejects invalid paths with a diagnostic")
{
    Scenario s = emptyBox(2, 1);
    s.obstacles.push_back(geometry::Hypersphere{vec({0.5, 0.5}), 0.2});
    Roadmap rm(s);
    const std::size_t before = rm.vertices().size();
    CHECK_THROWS_WITH_AS(rm.injectPath(straightLine(s.start, vec({0.5, 1.0}), 5)),
                         doctest::Contains("fails validation"), PathRejected);
    CHECK_THROWS_AS(rm.injectPath(straightLine(vec({0.1, 0.0}), vec({0.5, 1.0}), 5)), PathRejected);
    CHECK_THROWS_AS(rm.injectPath(straightLine(s.start, vec({0.1, 0.0}), 5)), PathRejected);
    CHECK(rm.vertices().size() == before);
}

TEST_CASE("expandUntilImproved examples")
{
    Roadmap rm(emptyBox(2, 8));
    Budget budget = Budget::samples(100);
    const auto first = rm.expandUntilImproved(std::numeric_limits<double>::infinity(), budget);
    REQUIRE(first);
    CHECK(pathLength(*first) >= 1.0 - 1e-12);
    CHECK(budget.samplesDrawn() == 1);

    const auto none = rm.expandUntilImproved(1.0 + 1e-12, budget);
    CHECK_FALSE(none);
    CHECK(budget.exhausted());
}

TEST_CASE("successive improvements form a strictly decreasing sequence")
{
    Roadmap rm(clutter(kSolvableSeeds[1]));
    Budget budget = Budget::samples(3000);
    double best = std::numeric_limits<double>::infinity();
    int improvements = 0;
    while (!budget.exhausted())
    {
        const std::size_t drawnBefore = budget.samplesDrawn();
        const auto p = rm.expandUntilImproved(best, budget);
        if (!p)
            break;
        CHECK(budget.samplesDrawn() > drawnBefore);
        const double cost = pathLength(*p);
        if (std::isfinite(best))
            CHECK(cost < best - kImproveEpsilon * best);
        CHECK(p->front() == rm.scenario().start);
        best = cost;
        ++improvements;
    }
    CHECK(improvements >= 2);
}

TEST_CASE("injecting optimized paths leaves the sampled subgraph unchanged")
{
    const Scenario s = clutter(kSolvableSeeds[2]);
    Roadmap plain(s);
    Roadmap shared(s);
    int injections = 0;
    for (int i = 0; i < 1500; ++i)
    {
        plain.addSample();
        shared.addSample();
        if (i % 50 == 49)
            if (const auto p = shared.bestPath())
            {
                shared.injectPath(subdivide(*p));
                ++injections;
            }
    }
    CHECK(injections > 0);
    CHECK(shared.vertices().size() > plain.vertices().size());
    CHECK(shared.sampledCount() == plain.sampledCount());
    CHECK(shared.sampledSubgraph() == plain.sampledSubgraph());
    CHECK(shared.bestCost() <= plain.bestCost());
}

TEST_CASE("equal seeds give identical roadmaps")
{
    Roadmap a(clutter(17));
    Roadmap b(clutter(17));
    drawSamples(a, 300);
    drawSamples(b, 300);
    REQUIRE(a.vertices().size() == b.vertices().size());
    REQUIRE(a.edges().size() == b.edges().size());
    for (std::size_t i = 0; i < a.vertices().size(); ++i)
        CHECK(a.vertices()[i].q == b.vertices()[i].q);
    for (std::size_t i = 0; i < a.edges().size(); ++i)
        CHECK((a.edges()[i].u == b.edges()[i].u && a.edges()[i].v == b.edges()[i].v));

    Roadmap c(clutter(18));
    drawSamples(c, 300);
    CHECK_FALSE(c.sampledSubgraph() == a.sampledSubgraph());
}

TEST_CASE("budgets")
{
    Budget b = Budget::samples(2);
    CHECK_FALSE(b.exhausted());
    b.noteSample();
    b.noteSample();
    CHECK(b.exhausted());
    CHECK(b.now() == 2.0);
    CHECK_THROWS_AS(Budget::samples(0), InputError);
    CHECK_THROWS_AS(Budget::wallClock(0.0), InputError);
    CHECK_FALSE(Budget::wallClock(100.0).exhausted());
}
