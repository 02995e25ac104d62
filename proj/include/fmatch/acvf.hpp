#pragma once

/** @file
 * Autocovariance sequences of stationary AR/ARMA processes, the
 * Levinson-Durbin Toeplitz solvers, and the partial-autocorrelation
 * reparametrization of the stationary AR region.
 */

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fmatch {

/// Autocovariances gamma(0..K) of a mean-zero stationary process.
struct AcvfSeq {
    std::vector<double> gamma;

    [[nodiscard]] std::size_t max_lag() const noexcept {
        return gamma.empty() ? 0 : gamma.size() - 1;
    }
    [[nodiscard]] double operator[](std::size_t lag) const { return gamma[lag]; }
};

/// AR(p) coefficients phi_1..phi_p and innovation variance. p = 0 is white noise.
struct ArParams {
    std::vector<double> phi;
    double sigma2 = 1.0;

    [[nodiscard]] std::size_t order() const noexcept { return phi.size(); }
};

/// Reflection coefficients r_1..r_p, each in (-1, 1).
struct PacfParams {
    std::vector<double> r;
};

/// ARMA(p, q) with y_t = sum phi_i y_{t-i} + e_t + sum theta_j e_{t-j}.
struct ArmaSpec {
    std::vector<double> ar;
    std::vector<double> ma;
    double sigma2 = 1.0;
};

struct LevinsonResult {
    std::vector<double> phi;        ///< solves Gamma_p phi = (gamma(1)..gamma(p))
    std::vector<double> pacf;       ///< reflection coefficient at each order
    std::vector<double> variances;  ///< one-step error variance at orders 0..p
};

/// Throws InvalidArgument unless gamma(0) > 0, |gamma(k)| <= gamma(0) and
/// the leading Toeplitz blocks (up to order 12) are positive semidefinite.
void validate_acvf(const AcvfSeq& acvf);

/// Durbin's recursion for the order-p one-step predictor.
///
/// Throws SingularToeplitz when an intermediate error variance drops to
/// 1e-12 * gamma(0) or below (Gamma_p not positive definite), and
/// InsufficientLags when acvf.max_lag() < p.
[[nodiscard]] LevinsonResult levinson_solve(const AcvfSeq& acvf, std::size_t p);

/// Solves Gamma_p x = rhs for arbitrary rhs (p = rhs.size()) with
/// Levinson's bordering recursion. Needs acvf.max_lag() >= p - 1.
[[nodiscard]] std::vector<double> toeplitz_solve(const AcvfSeq& acvf, std::span<const double> rhs);

/// True iff every reflection coefficient recovered by the step-down
/// recursion lies strictly inside (-1, 1); equivalently the companion
/// matrix of phi has spectral radius < 1.
[[nodiscard]] bool is_stationary(std::span<const double> phi);

/// Autocovariances implied by a stationary AR model. Throws NonStationary.
[[nodiscard]] AcvfSeq ar_acvf(const ArParams& model, std::size_t max_lag);

/// Autocovariances of an ARMA process from its psi-weight expansion. The
/// expansion is cut once a geometric bound on the remaining tail falls below
/// 1e-12 * gamma(0); pure MA specs are summed exactly. Throws NonStationary.
[[nodiscard]] AcvfSeq arma_acvf(const ArmaSpec& spec, std::size_t max_lag);

/// Step-up recursion. Throws InvalidArgument if some |r_j| >= 1.
[[nodiscard]] std::vector<double> pacf_to_ar(std::span<const double> r);

/// Step-down recursion. Throws NonStationary if some recovered |r_j| >= 1.
[[nodiscard]] std::vector<double> ar_to_pacf(std::span<const double> phi);

/// d phi_i / d r_j of the step-up map, as a p x p matrix.
[[nodiscard]] Eigen::MatrixXd pacf_to_ar_jacobian(std::span<const double> r);

}  // namespace fmatch
