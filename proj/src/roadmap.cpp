#include "iosmp/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace iosmp
{
Budget::Budget(bool countsSamples, double limit)
    : countsSamples_(countsSamples), limit_(limit), started_(std::chrono::steady_clock::now())
{
}

Budget Budget::wallClock(double seconds)
{
    if (!(seconds > 0.0))
        throw InputError("time budget must be positive");
    return Budget(false, seconds);
}

Budget Budget::samples(std::size_t count)
{
    if (count == 0)
        throw InputError("sample budget must be positive");
    return Budget(true, static_cast<double>(count));
}

double Budget::now() const
{
    if (countsSamples_)
        return static_cast<double>(samplesDrawn_);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
}

bool Budget::exhausted() const
{
    return countsSamples_ ? static_cast<double>(samplesDrawn_) >= limit_ : now() > limit_;
}

namespace roadmap
{
std::size_t kOfN(std::size_t n, std::size_t d)
{
    if (n < 1 || d < 2)
        throw InputError("kOfN needs n >= 1 and d >= 2");
    const double kRrg = std::numbers::e * (1.0 + 1.0 / static_cast<double>(d));
    return static_cast<std::size_t>(std::ceil(kRrg * std::log(static_cast<double>(n) + 1.0)));
}

const char *toString(Origin o)
{
    switch (o)
    {
    case Origin::Sampled:
        return "sampled";
    case Origin::Optimized:
        return "optimized";
    case Origin::Endpoint:
        return "endpoint";
    }
    return "?";
}

bool SampledSubgraph::operator==(const SampledSubgraph &other) const
{
    if (vertices.size() != other.vertices.size() || edges != other.edges)
        return false;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] != other.vertices[i])
            return false;
    return true;
}

namespace
{
constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr double kInf = std::numeric_limits<double>::infinity();

using QueueEntry = std::pair<double, std::size_t>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;
}  // namespace

Roadmap::Roadmap(const Scenario &scenario)
    : scenario_(scenario), evaluator_(scenario.evaluator()), rng_(Rng::stream(scenario.seed, StreamId::Sampling))
{
    validateScenario(scenario_);
    addVertex(scenario_.start, Origin::Endpoint, false);
    primary_.ids.push_back(0);
    dist_[0] = 0.0;
    if (const auto *g = std::get_if<SingleConfigGoal>(&scenario_.goal))
    {
        addVertex(g->q, Origin::Endpoint, true);
        if (evaluator_.edgeValid(scenario_.start, g->q))
            addEdge(0, 1);
        primary_.ids.push_back(1);
        propagate();
    }
}

std::size_t Roadmap::addVertex(Config q, Origin origin, bool goal)
{
    const std::size_t id = vertices_.size();
    vertices_.push_back({id, std::move(q), origin, goal});
    adjacency_.emplace_back();
    dist_.push_back(kInf);
    parent_.push_back(kNone);
    return id;
}

bool Roadmap::hasEdge(std::size_t u, std::size_t v) const
{
    const auto &adj = adjacency_[u];
    return std::any_of(adj.begin(), adj.end(), [v](const auto &e) { return e.first == v; });
}

void Roadmap::addEdge(std::size_t u, std::size_t v)
{
    const double w = (vertices_[u].q - vertices_[v].q).norm();
    edges_.push_back({u, v, w});
    adjacency_[u].emplace_back(v, w);
    adjacency_[v].emplace_back(u, w);
    relax(u, v, w);
    relax(v, u, w);
}

void Roadmap::relax(std::size_t from, std::size_t to, double w)
{
    if (dist_[from] + w < dist_[to])
    {
        dist_[to] = dist_[from] + w;
        parent_[to] = from;
        dirty_.push_back(to);
    }
}

void Roadmap::propagate()
{
    MinQueue queue;
    for (std::size_t v : dirty_)
        queue.emplace(dist_[v], v);
    dirty_.clear();
    while (!queue.empty())
    {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist_[u])
            continue;
        if (vertices_[u].goal && (!bestGoal_ || d < dist_[*bestGoal_] ||
                                  (d == dist_[*bestGoal_] && u < *bestGoal_)))
            bestGoal_ = u;
        for (const auto &[v, w] : adjacency_[u])
            relax(u, v, w);
        for (std::size_t v : dirty_)
            queue.emplace(dist_[v], v);
        dirty_.clear();
    }
}

std::vector<std::size_t> Roadmap::nearest(const Index &index, const Config &q, std::size_t k) const
{
    std::vector<QueueEntry> ranked;
    ranked.reserve(index.ids.size());
    for (std::size_t id : index.ids)
        ranked.emplace_back((vertices_[id].q - q).squaredNorm(), id);
    k = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        out.push_back(ranked[i].second);
    return out;
}

SampleOutcome Roadmap::addSample()
{
    const auto &bounds = robot::boundsOf(scenario_.robot);
    Config q(bounds.lower.size());
    for (Eigen::Index i = 0; i < q.size(); ++i)
        q[i] = rng_.uniform(bounds.lower[i], bounds.upper[i]);
    ++samplesDrawn_;
    if (!evaluator_.configValid(q))
    {
        ++rejected_;
        return {};
    }

    const bool goal = scenario_.hasRegionGoal() && isGoalConfig(scenario_, q);
    const std::size_t v = addVertex(std::move(q), Origin::Sampled, goal);
    ++sampledCount_;
    const std::size_t k = kOfN(sampledCount_, scenario_.dim());
    const Config &qv = vertices_[v].q;
    for (std::size_t u : nearest(primary_, qv, k))
        if (evaluator_.edgeValid(vertices_[u].q, qv))
            addEdge(u, v);
    for (std::size_t u : nearest(optimized_, qv, k))
        if (evaluator_.edgeValid(vertices_[u].q, qv))
            addEdge(u, v);
    primary_.ids.push_back(v);
    propagate();
    return {true, v};
}

void Roadmap::injectPath(const Path &p)
{
    if (p.size() < 2)
        throw PathRejected("injected path needs at least 2 waypoints");
    if (p.front() != scenario_.start)
        throw PathRejected("injected path does not begin at the start configuration");
    const auto *single = std::get_if<SingleConfigGoal>(&scenario_.goal);
    if (single ? p.back() != single->q : !isGoalConfig(scenario_, p.back()))
        throw PathRejected("injected path does not end at a goal configuration");
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
    {
        if (!evaluator_.edgeValid(p.waypoints[i], p.waypoints[i + 1]))
        {
            const auto report = evaluator_.edgeReport(p.waypoints[i], p.waypoints[i + 1],
                                                      evaluator_.defaultResolution(p.waypoints[i], p.waypoints[i + 1]));
            std::ostringstream msg;
            msg << "injected path edge " << i << " fails validation: " << robot::toString(report.kind) << " term "
                << report.index << " reaches " << report.minValue;
            throw PathRejected(msg.str());
        }
    }

    std::vector<std::size_t> ids;
    ids.reserve(p.size());
    ids.push_back(0);
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
    {
        const std::size_t v = addVertex(p.waypoints[i], Origin::Optimized, false);
        optimized_.ids.push_back(v);
        ids.push_back(v);
    }
    if (single)
    {
        ids.push_back(1);
    }
    else
    {
        std::size_t last = kNone;
        for (const auto &vert : vertices_)
            if (vert.goal && vert.q == p.back())
            {
                last = vert.id;
                break;
            }
        if (last == kNone)
        {
            last = addVertex(p.back(), Origin::Optimized, true);
            optimized_.ids.push_back(last);
        }
        ids.push_back(last);
    }
    for (std::size_t i = 0; i + 1 < ids.size(); ++i)
        if (ids[i] != ids[i + 1] && !hasEdge(ids[i], ids[i + 1]))
            addEdge(ids[i], ids[i + 1]);
    propagate();
}

std::optional<Path> Roadmap::expandUntilImproved(double bestCost, Budget &budget)
{
    const double threshold = std::isinf(bestCost) ? kInf : bestCost - kImproveEpsilon * bestCost;
    while (!budget.exhausted())
    {
        const auto outcome = addSample();
        budget.noteSample();
        if (outcome.accepted && this->bestCost() < threshold)
            return bestPath();
    }
    return std::nullopt;
}

Path Roadmap::extract(std::size_t goal, const std::vector<std::size_t> &parent) const
{
    Path p;
    for (std::size_t v = goal; v != kNone; v = parent[v])
        p.waypoints.push_back(vertices_[v].q);
    std::reverse(p.waypoints.begin(), p.waypoints.end());
    return p;
}

std::optional<Path> Roadmap::bestPath() const
{
    if (!bestGoal_)
        return std::nullopt;
    return extract(*bestGoal_, parent_);
}

std::optional<Path> Roadmap::shortestPath() const
{
    std::vector<double> dist(vertices_.size(), kInf);
    std::vector<std::size_t> parent(vertices_.size(), kNone);
    MinQueue queue;
    dist[0] = 0.0;
    queue.emplace(0.0, 0);
    while (!queue.empty())
    {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u])
            continue;
        if (vertices_[u].goal)
            return extract(u, parent);
        for (const auto &[v, w] : adjacency_[u])
        {
            if (d + w < dist[v])
            {
                dist[v] = d + w;
                parent[v] = u;
                queue.emplace(dist[v], v);
            }
        }
    }
    return std::nullopt;
}

SampledSubgraph Roadmap::sampledSubgraph() const
{
    SampledSubgraph out;
    std::vector<std::size_t> renumber(vertices_.size(), kNone);
    for (const auto &v : vertices_)
    {
        if (v.origin == Origin::Optimized)
            continue;
        renumber[v.id] = out.vertices.size();
        out.vertices.push_back(v.q);
    }
    for (const auto &e : edges_)
        if (renumber[e.u] != kNone && renumber[e.v] != kNone)
            out.edges.emplace_back(renumber[e.u], renumber[e.v]);
    return out;
}
}  // namespace roadmap
}  // namespace iosmp
