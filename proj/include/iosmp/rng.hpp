#pragma once

#include <cstdint>
#include <random>

namespace iosmp
{
/// Purpose-tagged random streams. Each consumer of randomness owns its own stream so
/// that, for example, running the optimizer never perturbs roadmap sampling.
enum class StreamId : std::uint64_t
{
    Environment = 1,
    Sampling = 2,
    Perturbation = 3,
    Init = 4,
};

/// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Reproducible generator: std::mt19937_64 (whose output sequence is fixed by the C++
/// standard) with hand-rolled real conversion, since the standard distributions are
/// implementation-defined. Equal seeds give equal streams on every platform.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed)
    {
    }

    static Rng stream(std::uint64_t seed, StreamId id)
    {
        return Rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(id))));
    }

    std::uint64_t next()
    {
        return engine_();
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

private:
    std::mt19937_64 engine_;
};
}  // namespace iosmp
