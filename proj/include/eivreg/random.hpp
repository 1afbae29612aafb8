#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace eivreg {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x);

/**
 * Stable seed mixing used to derive substreams:
 * h = seed; for each key k: h = splitmix64(h ^ splitmix64(k + 0x9E3779B97F4A7C15)).
 */
std::uint64_t hash64(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/**
 * Pseudo-random stream with a fixed, documented sampling procedure so that
 * results do not depend on the standard library's distribution objects.
 *
 * Engine: std::mt19937_64 seeded with splitmix64(seed).
 * Uniform: top 53 bits of one engine draw, scaled to [0, 1).
 * Gaussian: Marsaglia polar method; the second variate of each accepted pair
 * is cached and returned by the next call.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    double uniform();
    double gaussian();
    /// Uniform integer in [0, bound) by rejection on the 64-bit draw.
    std::uint64_t below(std::uint64_t bound);
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace eivreg
