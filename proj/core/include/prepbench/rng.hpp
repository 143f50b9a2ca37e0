#pragma once

#include <cstdint>

namespace prepbench {

/// Counter-based uniform stream: draw i is splitmix64(seed + i*golden).
/// Part of the external contract; seeded results must be byte-identical
/// across runs and platforms.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t x = seed_ + counter_++ * 0x9E3779B97F4A7C15ULL;
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Uniform in (0, 1].
    double next_unit() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53; }

    /// Uniform in {0, ..., n-1} by rejection (unbiased).
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace prepbench
