#pragma once

/** @file
 * Multi-step prediction-error criteria for AR(p) models.
 *
 * For a model phi of order p and maximal horizon m the empirical criterion is
 *
 *     Q(phi) = (1/m) sum_{k=1..m} (1/N_k) sum_t (y_{t+k} - alpha_k' y_{t,p})^2,
 *
 * with alpha_k the first row of C(phi)^k, y_{t,p} = (y_t, ..., y_{t-p+1}) and
 * t running over the N_k = n - k - p + 1 positions where both the window and
 * the target exist. When p = 0 the predictor is zero and the k-th sum covers
 * y_k..y_n. The series is used as given; it is never centered here.
 *
 * The population criterion replaces each inner average by its expectation
 * under a known autocovariance sequence.
 */

#include <cstddef>
#include <span>
#include <vector>

#include "fmatch/acvf.hpp"

namespace fmatch {

/// Observed series y_1..y_n; n >= 2 and all values finite.
class SeriesSample {
public:
    /// Throws InvalidArgument when the invariants fail.
    explicit SeriesSample(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

/// Smallest n for which Q with order p and horizon m has a term at every k.
[[nodiscard]] constexpr std::size_t min_length(std::size_t p, std::size_t m) noexcept {
    return p + m;
}

[[nodiscard]] double empirical_q(const SeriesSample& series, std::span<const double> phi, std::size_t m);
[[nodiscard]] double empirical_q(const SeriesSample& series, const ArParams& model, std::size_t m);

/// Analytic dQ/dphi, differentiating alpha_k(phi) through the k companion
/// factors. Requires p >= 1.
[[nodiscard]] std::vector<double> empirical_q_gradient(const SeriesSample& series,
                                                       std::span<const double> phi, std::size_t m);

/// Q and its gradient in one pass; `gradient` is resized to p.
double empirical_q_with_gradient(const SeriesSample& series, std::span<const double> phi,
                                 std::size_t m, std::vector<double>& gradient);

/// Population criterion under the true autocovariances.
[[nodiscard]] double population_q(const AcvfSeq& truth, std::span<const double> phi, std::size_t m);
[[nodiscard]] double population_q(const AcvfSeq& truth, const ArParams& model, std::size_t m);

/// (1/m) sum_k [gamma(0) - gamma_{k,p}' Gamma_p^{-1} gamma_{k,p}]: the best any
/// order-p linear predictor can achieve against this truth.
[[nodiscard]] double population_q_floor(const AcvfSeq& truth, std::size_t p, std::size_t m);

}  // namespace fmatch
