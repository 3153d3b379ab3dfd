#pragma once

// Seeded random streams. Every stochastic subsystem draws from its own
// stream derived from the run seed, so e.g. toggling the defense does not
// perturb node trajectories or traffic selection.

#include <cmath>
#include <cstdint>
#include <random>

namespace aspuavn
{

enum class Stream : std::uint64_t
{
    Placement = 1,
    Mobility = 2,
    Roles = 3,
    Traffic = 4,
    Adversary = 5,
    Detectors = 6,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept
{
    return mix64(mix64(seed) ^ mix64(static_cast<std::uint64_t>(stream) * 0x632be59bd9b4e019ull));
}

/// mt19937_64 plus the handful of draws the simulator needs. The draw
/// formulas are spelled out here (instead of <random> distributions) so that
/// traces are identical across standard library implementations.
class Rng
{
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, Stream stream) : engine_(derive_seed(seed, stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
            return 0;
        // Lemire-style rejection to avoid modulo bias.
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t v = engine_();
        while (v >= limit)
            v = engine_();
        return v % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

private:
    std::mt19937_64 engine_;
};

} // namespace aspuavn
