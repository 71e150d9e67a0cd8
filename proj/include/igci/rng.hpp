#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace igci::sim {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: the k-th output is mix64(key + (k + 1) * golden_gamma), where the
/// key is a hash of the seed and a list of stream identifiers. Streams for distinct
/// identifier lists are independent and every draw is reproducible across platforms.
///
/// Satisfies UniformRandomBitGenerator, but the members below are what the harness uses:
/// library distributions are avoided because their algorithms differ between vendors.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) noexcept
        : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)) {
        for (std::uint64_t id : stream) key_ = mix64(key_ ^ mix64(id + 0x3C6EF372FE94F82BULL));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        counter_ += kGamma;
        return mix64(key_ + counter_);
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal by the Box-Muller transform; the second variate is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * 3.14159265358979323846 * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

    /// Laplace(0, scale) by inversion.
    double laplace(double scale) noexcept {
        const double u = uniform() - 0.5;
        const double tail = 1.0 - 2.0 * std::abs(u);
        return (u < 0.0 ? scale : -scale) * std::log(tail);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace igci::sim
