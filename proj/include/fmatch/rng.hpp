#pragma once

/** @file
 * Counter-based random streams.
 *
 * Draw i of the stream keyed by k is splitmix64_finalize(k + (i + 1) * G) with
 * G = 0x9E3779B97F4A7C15, i.e. SplitMix64 seeded with k. Substream keys are
 * derived with mix_seed, so every (seed, index...) tuple names its own stream
 * and results never depend on which thread consumed it.
 */

#include <cstddef>
#include <cstdint>

namespace fmatch {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

[[nodiscard]] constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// mix(seed, index) = F(seed ^ F(index + G)), F = splitmix64_finalize.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64_finalize(seed ^ splitmix64_finalize(index + kGolden));
}

[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return mix_seed(mix_seed(seed, a), b);
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return splitmix64_finalize(key_ + counter_ * kGolden);
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound), bound >= 1, by rejection.
    std::size_t below(std::size_t bound) noexcept;

    /// Standard normal by the Box-Muller transform; pairs are cached.
    double normal() noexcept;

    /// Gamma(shape, 1) by Marsaglia and Tsang.
    double gamma(double shape) noexcept;

    /// Student-t with df degrees of freedom.
    double student_t(double df) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace fmatch
