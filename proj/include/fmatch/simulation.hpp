#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fmatch/acvf.hpp"

namespace fmatch {

enum class InnovationKind { Gaussian, StudentT };

/// Innovation law, always scaled to variance sigma2. Student-t needs df > 2.
struct Innovations {
    InnovationKind kind = InnovationKind::Gaussian;
    double df = 5.0;
};

/// Two-regime threshold AR: phi_low applies when y_{t-delay} <= threshold.
struct TarSpec {
    std::vector<double> phi_low;
    std::vector<double> phi_high;
    double threshold = 0.0;
    std::size_t delay = 1;
    double sigma2 = 1.0;
};

inline constexpr std::size_t kArmaBurnin = 200;
inline constexpr std::size_t kTarBurnin = 500;

/// n values of the ARMA recursion after burnin + max(p, q) discarded steps
/// from a zero history. Deterministic per (spec, n, seed, burnin, innovations).
/// Throws NonStationary or InvalidArgument.
[[nodiscard]] std::vector<double> simulate_arma(const ArmaSpec& spec, std::size_t n, std::uint64_t seed,
                                                std::size_t burnin = kArmaBurnin,
                                                const Innovations& innovations = {});

/// Threshold AR analogue; discards burnin + max(p_low, p_high) steps.
[[nodiscard]] std::vector<double> simulate_tar(const TarSpec& spec, std::size_t n, std::uint64_t seed,
                                               std::size_t burnin = kTarBurnin,
                                               const Innovations& innovations = {});

/// Sample autocovariances (divisor n, no centering) at lags 0..max_lag.
[[nodiscard]] std::vector<double> sample_acvf(const std::vector<double>& y, std::size_t max_lag);

}  // namespace fmatch
