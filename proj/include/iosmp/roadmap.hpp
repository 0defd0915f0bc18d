#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iosmp/environment.hpp"
#include "iosmp/path.hpp"
#include "iosmp/rng.hpp"

namespace iosmp
{
/// Stopping rule shared by the planners: either wall-clock seconds or a number of samples.
/// In sample mode the clock reads the number of samples drawn so far.
class Budget
{
public:
    static Budget wallClock(double seconds);
    static Budget samples(std::size_t count);

    bool exhausted() const;
    void noteSample()
    {
        ++samplesDrawn_;
    }
    double now() const;
    bool countsSamples() const
    {
        return countsSamples_;
    }
    std::size_t samplesDrawn() const
    {
        return samplesDrawn_;
    }
    double limit() const
    {
        return limit_;
    }

private:
    Budget(bool countsSamples, double limit);

    bool countsSamples_;
    double limit_;
    std::size_t samplesDrawn_{0};
    std::chrono::steady_clock::time_point started_;
};

namespace roadmap
{
/// Neighbor count ceil(e (1 + 1/d) ln(n + 1)).
std::size_t kOfN(std::size_t n, std::size_t d);

/// Relative margin a new path must beat the incumbent by.
inline constexpr double kImproveEpsilon = 1e-9;

enum class Origin
{
    Sampled,
    Optimized,
    Endpoint
};

const char *toString(Origin o);

struct Vertex
{
    std::size_t id{0};
    Config q;
    Origin origin{Origin::Sampled};
    bool goal{false};
};

struct Edge
{
    std::size_t u{0};
    std::size_t v{0};
    double length{0.0};
};

/// Raised when an injected path does not pass edge validation.
class PathRejected : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct SampleOutcome
{
    bool accepted{false};
    std::size_t vertex{0};
};

/// Vertices and edges restricted to Sampled and Endpoint vertices, renumbered in insertion order.
struct SampledSubgraph
{
    std::vector<Config> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    bool operator==(const SampledSubgraph &other) const;
};

/// Seam for the global planner the orchestrator alternates with the optimizer.
class ExplorationPlanner
{
public:
    virtual ~ExplorationPlanner() = default;

    /// Keeps exploring until a path cheaper than bestCost (by the relative margin) is known, or
    /// the budget runs out. A path is only returned after drawing at least one new sample.
    virtual std::optional<Path> expandUntilImproved(double bestCost, Budget &budget) = 0;
    virtual void injectPath(const Path &p) = 0;
};

/// k-nearest PRM* roadmap. Start and (for configuration goals) goal are Endpoint vertices 0 and 1.
class Roadmap : public ExplorationPlanner
{
public:
    explicit Roadmap(const Scenario &scenario);

    const Scenario &scenario() const
    {
        return scenario_;
    }
    const robot::ConstraintEvaluator &evaluator() const
    {
        return evaluator_;
    }
    const std::vector<Vertex> &vertices() const
    {
        return vertices_;
    }
    const std::vector<Edge> &edges() const
    {
        return edges_;
    }
    std::size_t sampledCount() const
    {
        return sampledCount_;
    }
    std::size_t samplesDrawn() const
    {
        return samplesDrawn_;
    }
    std::size_t rejectedCount() const
    {
        return rejected_;
    }

    /// Draws one configuration from the sampling stream and connects it if it is feasible.
    SampleOutcome addSample();

    /// Throws PathRejected with a diagnostic if an endpoint or an edge of p does not validate.
    void injectPath(const Path &p) override;

    std::optional<Path> expandUntilImproved(double bestCost, Budget &budget) override;

    /// Uniform-cost search from the start to the nearest goal vertex.
    std::optional<Path> shortestPath() const;

    /// Cost of the best known start-to-goal path, maintained incrementally; infinity if none.
    double bestCost() const
    {
        return bestGoal_ ? dist_[*bestGoal_] : std::numeric_limits<double>::infinity();
    }
    std::optional<Path> bestPath() const;

    SampledSubgraph sampledSubgraph() const;

private:
    struct Index
    {
        std::vector<std::size_t> ids;
    };

    std::size_t addVertex(Config q, Origin origin, bool goal);
    bool hasEdge(std::size_t u, std::size_t v) const;
    void addEdge(std::size_t u, std::size_t v);
    std::vector<std::size_t> nearest(const Index &index, const Config &q, std::size_t k) const;
    void propagate();
    void relax(std::size_t from, std::size_t to, double w);
    Path extract(std::size_t goal, const std::vector<std::size_t> &parent) const;

    Scenario scenario_;
    robot::ConstraintEvaluator evaluator_;
    Rng rng_;
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
    Index primary_;
    Index optimized_;
    std::size_t sampledCount_{0};
    std::size_t samplesDrawn_{0};
    std::size_t rejected_{0};

    std::vector<double> dist_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> dirty_;
    std::optional<std::size_t> bestGoal_;
};
}  // namespace roadmap
}  // namespace iosmp
