#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace selfboost {

/// Deterministic random number generator.
///
/// All randomness in the library flows through this wrapper so that results
/// are bit-identical across runs and platforms: the engine is std::mt19937_64
/// (fully specified by the standard) and the real-valued draws below avoid
/// the implementation-defined std::*_distribution classes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller. Stateless between calls (the second
    /// deviate of each pair is discarded) so serialized engine state fully
    /// captures the generator.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Integer in [0, n) without modulo bias (rejection sampling).
    std::uint64_t below(std::uint64_t n);

    std::string serialize() const;
    void deserialize(const std::string& state);

private:
    std::mt19937_64 engine_;
};

/// Stream derivation: statistically independent child seed for (master, index).
/// Two rounds of the splitmix64 finalizer over the combined words.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace selfboost
