#include "fmatch/predictor.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "fmatch/error.hpp"

namespace fmatch {

PredictorCoeffs predictor_from_model(const ArParams& model, std::size_t k) {
    if (k == 0) {
        throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
    }
    if (!is_stationary(model.phi)) {
        throw Error(ErrorKind::NonStationary, "AR coefficients are outside the stationary region");
    }
    PredictorCoeffs out;
    out.horizon = k;
    const std::size_t p = model.order();
    if (p == 0) return out;
    const auto table = detail::horizon_predictors(model.phi, k);
    out.alpha.assign(table.end() - static_cast<std::ptrdiff_t>(p), table.end());
    return out;
}

PredictorCoeffs predictor_from_acvf(const AcvfSeq& truth, std::size_t p, std::size_t k) {
    if (k == 0 || p == 0) {
        throw Error(ErrorKind::InvalidArgument, "predictor_from_acvf requires p >= 1 and k >= 1");
    }
    const std::size_t needed = p + k - 1;
    if (truth.gamma.empty() || truth.max_lag() < needed) {
        throw Error(ErrorKind::InsufficientLags,
                    "horizon-" + std::to_string(k) + " predictor of order " + std::to_string(p) +
                        " needs lags up to " + std::to_string(needed),
                    needed);
    }
    std::vector<double> rhs(p);
    for (std::size_t i = 0; i < p; ++i) rhs[i] = truth.gamma[k + i];
    return PredictorCoeffs{toeplitz_solve(truth, rhs), k};
}

Eigen::MatrixXd companion_matrix(std::span<const double> phi) {
    const auto p = static_cast<Eigen::Index>(phi.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) c(0, j) = phi[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < p; ++i) c(i, i - 1) = 1.0;
    return c;
}

double spectral_radius(const Eigen::MatrixXd& matrix) {
    if (matrix.size() == 0) return 0.0;
    constexpr double kTolerance = 1e-10;
    constexpr int kMaxSquarings = 60;

    // invariant: matrix^(2^j) == exp(log_scale) * a
    Eigen::MatrixXd a = matrix;
    double log_scale = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    double exponent = 1.0;
    for (int j = 0; j <= kMaxSquarings; ++j) {
        const double c = a.norm();
        if (c == 0.0) return 0.0;
        if (!std::isfinite(c)) return std::numeric_limits<double>::infinity();
        const double est = std::exp((log_scale + std::log(c)) / exponent);
        if (std::abs(est - prev) <= kTolerance * est) return est;
        prev = est;
        a /= c;
        log_scale = 2.0 * (log_scale + std::log(c));
        a = (a * a).eval();
        exponent *= 2.0;
    }
    return prev;
}

namespace detail {

std::vector<double> horizon_predictors(std::span<const double> phi, std::size_t m) {
    const std::size_t p = phi.size();
    std::vector<double> table(m * p);
    if (p == 0 || m == 0) return table;
    std::copy(phi.begin(), phi.end(), table.begin());
    for (std::size_t k = 1; k < m; ++k) {
        const double* prev = table.data() + (k - 1) * p;
        double* cur = table.data() + k * p;
        const double lead = prev[0];
        for (std::size_t i = 0; i + 1 < p; ++i) cur[i] = lead * phi[i] + prev[i + 1];
        cur[p - 1] = lead * phi[p - 1];
    }
    return table;
}

void horizon_predictors_with_jacobian(std::span<const double> phi, std::size_t m,
                                      std::vector<double>& alpha, std::vector<double>& jacobian) {
    const std::size_t p = phi.size();
    alpha = horizon_predictors(phi, m);
    jacobian.assign(m * p * p, 0.0);
    if (p == 0 || m == 0) return;
    for (std::size_t i = 0; i < p; ++i) jacobian[i * p + i] = 1.0;
    // alpha_{k+1} = alpha_k C: product rule over one more companion factor
    for (std::size_t k = 1; k < m; ++k) {
        const double* d_prev = jacobian.data() + (k - 1) * p * p;
        double* d_cur = jacobian.data() + k * p * p;
        const double lead = alpha[(k - 1) * p];
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                double v = d_prev[j] * phi[i];
                if (i + 1 < p) v += d_prev[(i + 1) * p + j];
                d_cur[i * p + j] = v;
            }
            d_cur[i * p + i] += lead;
        }
    }
}

}  // namespace detail
}  // namespace fmatch
