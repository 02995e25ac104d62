#include "fmatch/loss.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "fmatch/error.hpp"
#include "fmatch/predictor.hpp"

namespace fmatch {
namespace {

void require_length(std::size_t n, std::size_t p, std::size_t m) {
    if (m == 0) {
        throw Error(ErrorKind::InvalidArgument, "maximal horizon m must be >= 1");
    }
    const std::size_t need = min_length(p, m);
    if (n < need) {
        throw Error(ErrorKind::TooShort,
                    "order " + std::to_string(p) + " with horizon " + std::to_string(m) +
                        " needs at least " + std::to_string(need) + " observations, got " +
                        std::to_string(n),
                    need);
    }
}

void require_truth_lags(const AcvfSeq& truth, std::size_t p, std::size_t m) {
    if (m == 0) {
        throw Error(ErrorKind::InvalidArgument, "maximal horizon m must be >= 1");
    }
    const std::size_t need = p == 0 ? 0 : p + m - 1;
    if (truth.gamma.empty() || truth.max_lag() < need) {
        throw Error(ErrorKind::InsufficientLags,
                    "population criterion needs autocovariances up to lag " + std::to_string(need),
                    need);
    }
}

// Residual sum over one horizon. Targets are y[s + k] for window ends
// s = p-1 .. n-k-1 (0-based); s = -1 is the empty window when p = 0.
template <typename Visit>
double horizon_sum(std::span<const double> y, const double* alpha, std::size_t p, std::size_t k,
                   Visit&& visit) {
    const auto n = static_cast<std::ptrdiff_t>(y.size());
    const auto pp = static_cast<std::ptrdiff_t>(p);
    const auto kk = static_cast<std::ptrdiff_t>(k);
    double sum = 0.0;
    for (std::ptrdiff_t s = pp - 1; s <= n - kk - 1; ++s) {
        double pred = 0.0;
        for (std::ptrdiff_t i = 0; i < pp; ++i) pred += alpha[i] * y[static_cast<std::size_t>(s - i)];
        const double e = y[static_cast<std::size_t>(s + kk)] - pred;
        visit(s, e);
        sum += e * e;
    }
    return sum;
}

}  // namespace

SeriesSample::SeriesSample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "a series needs at least 2 observations");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorKind::InvalidArgument,
                        "observation " + std::to_string(i + 1) + " is not finite");
        }
    }
}

double empirical_q(const SeriesSample& series, std::span<const double> phi, std::size_t m) {
    const std::size_t n = series.size();
    const std::size_t p = phi.size();
    require_length(n, p, m);
    const auto alpha = detail::horizon_predictors(phi, m);
    double total = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double terms = static_cast<double>(n - k - p + 1);
        total += horizon_sum(series.values(), alpha.data() + (k - 1) * p, p, k,
                             [](std::ptrdiff_t, double) {}) /
                 terms;
    }
    return total / static_cast<double>(m);
}

double empirical_q(const SeriesSample& series, const ArParams& model, std::size_t m) {
    return empirical_q(series, std::span<const double>(model.phi), m);
}

double empirical_q_with_gradient(const SeriesSample& series, std::span<const double> phi,
                                 std::size_t m, std::vector<double>& gradient) {
    const std::size_t n = series.size();
    const std::size_t p = phi.size();
    require_length(n, p, m);
    std::vector<double> alpha;
    std::vector<double> jac;
    detail::horizon_predictors_with_jacobian(phi, m, alpha, jac);

    const auto y = series.values();
    gradient.assign(p, 0.0);
    std::vector<double> cross(p);
    double total = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double terms = static_cast<double>(n - k - p + 1);
        std::fill(cross.begin(), cross.end(), 0.0);
        // cross_i = sum_t e_t y_{t-i}
        const double sum = horizon_sum(y, alpha.data() + (k - 1) * p, p, k, [&](std::ptrdiff_t s, double e) {
            for (std::size_t i = 0; i < p; ++i) {
                cross[i] += e * y[static_cast<std::size_t>(s - static_cast<std::ptrdiff_t>(i))];
            }
        });
        total += sum / terms;
        const double* d = jac.data() + (k - 1) * p * p;
        for (std::size_t j = 0; j < p; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < p; ++i) acc += d[i * p + j] * cross[i];
            gradient[j] -= 2.0 * acc / terms;
        }
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    for (double& g : gradient) g *= inv_m;
    return total * inv_m;
}

std::vector<double> empirical_q_gradient(const SeriesSample& series, std::span<const double> phi,
                                         std::size_t m) {
    if (phi.empty()) {
        throw Error(ErrorKind::InvalidArgument, "gradient requires p >= 1");
    }
    std::vector<double> g;
    empirical_q_with_gradient(series, phi, m, g);
    return g;
}

double population_q(const AcvfSeq& truth, std::span<const double> phi, std::size_t m) {
    const std::size_t p = phi.size();
    require_truth_lags(truth, p, m);
    const auto& g = truth.gamma;
    if (p == 0) return g[0];
    const auto alpha = detail::horizon_predictors(phi, m);
    double total = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double* a = alpha.data() + (k - 1) * p;
        double cross = 0.0;
        double quad = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            cross += a[i] * g[k + i];
            double row = 0.0;
            for (std::size_t j = 0; j < p; ++j) row += g[i > j ? i - j : j - i] * a[j];
            quad += a[i] * row;
        }
        total += g[0] - 2.0 * cross + quad;
    }
    return total / static_cast<double>(m);
}

double population_q(const AcvfSeq& truth, const ArParams& model, std::size_t m) {
    return population_q(truth, std::span<const double>(model.phi), m);
}

double population_q_floor(const AcvfSeq& truth, std::size_t p, std::size_t m) {
    require_truth_lags(truth, p, m);
    if (p == 0) return truth.gamma[0];
    double total = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const auto best = predictor_from_acvf(truth, p, k);
        double explained = 0.0;
        for (std::size_t i = 0; i < p; ++i) explained += best.alpha[i] * truth.gamma[k + i];
        total += truth.gamma[0] - explained;
    }
    return total / static_cast<double>(m);
}

}  // namespace fmatch
