#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wpt {

/// Counter-based generator: the n-th draw of stream s under seed k is a pure
/// function of (k, s, n), so results never depend on call order across
/// independent streams or on the platform's <random> implementation.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(mix(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
        return mix(key_ + mix(counter));
    }

    constexpr std::uint64_t next_u64() noexcept { return at(counter_++); }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    constexpr double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal via Box-Muller; consumes two draws.
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Derived generator for a sub-stream; used to give each batch instance
    /// its own independent sequence.
    constexpr CounterRng split(std::uint64_t stream) const noexcept {
        CounterRng r{0};
        r.key_ = mix(key_ ^ mix(stream + 0x632BE59BD9B4E019ULL));
        return r;
    }

    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace wpt
