#pragma once

#include <cstdint>

namespace derg {

// SplitMix64 (Steele, Lea, Flood 2014). Used instead of <random> engines so
// that streams are stateless functions of (seed, index) and outputs are
// identical across standard libraries.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 significant bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + next_unit() * (hi - lo); }

    // Independent stream for one run index; results depend only on
    // (seed, index), so runs may execute in any order.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }
};

}  // namespace derg
