#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fmatch/acvf.hpp"

namespace fmatch {

/// Horizon-k linear predictor weights on the lag window
/// (y_t, y_{t-1}, ..., y_{t-p+1}), in that order.
struct PredictorCoeffs {
    std::vector<double> alpha;
    std::size_t horizon = 1;

    [[nodiscard]] std::size_t order() const noexcept { return alpha.size(); }
};

/// First row of C^k for the companion matrix C of the model. Throws
/// NonStationary; p = 0 yields an empty predictor.
[[nodiscard]] PredictorCoeffs predictor_from_model(const ArParams& model, std::size_t k);

/// Gamma_p^{-1} gamma_{k,p} for an arbitrary stationary truth, where
/// gamma_{k,p} = (gamma(k), ..., gamma(k+p-1)).
[[nodiscard]] PredictorCoeffs predictor_from_acvf(const AcvfSeq& truth, std::size_t p, std::size_t k);

/// Top row phi, ones on the subdiagonal.
[[nodiscard]] Eigen::MatrixXd companion_matrix(std::span<const double> phi);

/// Spectral radius by the power method. The iteration runs on the identity
/// as start block and squares the iterate each step, so the estimate
/// ||A^(2^j)||^(1/2^j) approaches the radius from above; it stops when two
/// consecutive estimates agree to 1e-10 relative.
[[nodiscard]] double spectral_radius(const Eigen::MatrixXd& matrix);

namespace detail {

/// Row-major m x p table: row k-1 holds alpha_k for k = 1..m. No
/// stationarity check; the recursion is defined for any phi.
[[nodiscard]] std::vector<double> horizon_predictors(std::span<const double> phi, std::size_t m);

/// Same table plus d alpha_{k,i} / d phi_j, stored as m blocks of p x p
/// (block k-1, row i, column j), row-major.
void horizon_predictors_with_jacobian(std::span<const double> phi, std::size_t m,
                                      std::vector<double>& alpha, std::vector<double>& jacobian);

}  // namespace detail
}  // namespace fmatch
