#include "fmatch/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "fmatch/error.hpp"
#include "fmatch/predictor.hpp"

namespace fmatch {
namespace {

constexpr double kShrink = 0.95;
constexpr double kTargetRadius = 0.99;

// Offsets for the jittered starts, cycled over coordinates.
constexpr std::array<double, 8> kJitter{0.30, -0.20, 0.15, -0.35, 0.25, -0.10, 0.20, -0.30};

std::vector<double> jittered(const std::vector<double>& s, std::size_t copy) {
    std::vector<double> out(s);
    const double sign = copy % 2 == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] += sign * kJitter[(j + 3 * copy) % kJitter.size()];
    }
    return out;
}

// tanh -> reflection coefficients -> AR; false when tanh saturates.
bool phi_from_unconstrained(std::span<const double> s, std::vector<double>& r, std::vector<double>& phi) {
    r.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        r[j] = std::tanh(s[j]);
        if (!(std::abs(r[j]) < 1.0)) return false;
    }
    phi = pacf_to_ar(r);
    return true;
}

std::vector<double> unconstrained_from_phi(std::span<const double> phi) {
    auto r = ar_to_pacf(phi);
    for (double& v : r) v = std::atanh(v);
    return r;
}

struct MultiStartOutcome {
    MinimizeResult best;
    FitDiagnostics diag;
};

MultiStartOutcome minimize_multistart(const SmoothObjective& smooth, const PlainObjective& plain,
                                      const std::vector<std::vector<double>>& starts,
                                      const OptimizerOptions& opts) {
    MultiStartOutcome out;
    bool have = false;
    for (const auto& start : starts) {
        MinimizeResult run = bfgs_minimize(smooth, start, opts);
        out.diag.iterations += run.iterations;
        if (!run.converged) {
            // gradient path stalled or ran out of iterations
            out.diag.fallback_used = true;
            const MinimizeResult nm = nelder_mead_minimize(plain, run.x, opts);
            out.diag.iterations += nm.iterations;
            MinimizeResult polish = bfgs_minimize(smooth, nm.x, opts);
            out.diag.iterations += polish.iterations;
            if (polish.value <= run.value) {
                polish.converged = polish.converged || nm.converged;
                run = std::move(polish);
            }
        }
        ++out.diag.restarts;
        if (!have || run.value < out.best.value) {
            out.best = std::move(run);
            have = true;
        }
    }
    out.diag.converged = out.best.converged;
    out.diag.gradient_norm = out.best.gradient_norm;
    return out;
}

std::vector<std::vector<double>> with_jitter(std::vector<double> primary, std::size_t extra) {
    std::vector<std::vector<double>> starts;
    starts.reserve(extra + 1);
    starts.push_back(primary);
    for (std::size_t c = 1; c <= extra; ++c) starts.push_back(jittered(primary, c));
    return starts;
}

}  // namespace

OlsFit fit_ols(const SeriesSample& series, std::size_t p) {
    const std::size_t n = series.size();
    if (n < 2 * p + 1) {
        throw Error(ErrorKind::TooShort,
                    "least squares of order " + std::to_string(p) + " needs at least " +
                        std::to_string(2 * p + 1) + " observations, got " + std::to_string(n),
                    2 * p + 1);
    }
    const auto y = series.values();
    OlsFit out;
    if (p == 0) {
        double ss = 0.0;
        for (double v : y) ss += v * v;
        out.model.sigma2 = ss / static_cast<double>(n);
        return out;
    }

    const auto pp = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(pp, pp);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(pp);
    Eigen::VectorXd w(pp);
    for (std::size_t s = p - 1; s + 1 < n; ++s) {
        for (std::size_t i = 0; i < p; ++i) w(static_cast<Eigen::Index>(i)) = y[s - i];
        gram.selfadjointView<Eigen::Lower>().rankUpdate(w);
        rhs += w * y[s + 1];
    }
    gram = gram.selfadjointView<Eigen::Lower>();
    const double scale = gram.diagonal().maxCoeff();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (!(scale > 0.0) || ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= 1e-12 * scale) {
        throw Error(ErrorKind::SingularDesign, "conditional least-squares Gram matrix is singular");
    }
    const Eigen::VectorXd phi = ldlt.solve(rhs);
    out.model.phi.assign(phi.data(), phi.data() + p);

    double ss = 0.0;
    for (std::size_t s = p - 1; s + 1 < n; ++s) {
        double pred = 0.0;
        for (std::size_t i = 0; i < p; ++i) pred += out.model.phi[i] * y[s - i];
        const double e = y[s + 1] - pred;
        ss += e * e;
    }
    out.model.sigma2 = ss / static_cast<double>(n - p);
    out.stationary = is_stationary(out.model.phi);
    return out;
}

std::vector<double> shrink_to_stationary(std::vector<double> phi) {
    if (phi.empty()) return phi;
    for (double& v : phi) {
        if (!std::isfinite(v)) v = 0.0;
    }
    for (int guard = 0; guard < 10'000; ++guard) {
        if (spectral_radius(companion_matrix(phi)) < kTargetRadius && is_stationary(phi)) return phi;
        for (double& v : phi) v *= kShrink;
    }
    return std::vector<double>(phi.size(), 0.0);
}

FitResult fit_match(const SeriesSample& series, std::size_t p, std::size_t m,
                    const OptimizerOptions& opts) {
    FitResult out;
    out.m = m;
    out.order = p;
    // precondition check (TooShort) comes from the criterion itself
    out.q_value = empirical_q(series, std::vector<double>(p, 0.0), m);
    if (p == 0) {
        out.model.sigma2 = empirical_q(series, std::span<const double>{}, 1);
        out.diagnostics.converged = true;
        return out;
    }

    std::vector<double> start_phi(p, 0.0);
    try {
        start_phi = fit_ols(series, p).model.phi;
    } catch (const Error&) {
        // too short or singular for least squares: start from white noise
    }
    start_phi = shrink_to_stationary(std::move(start_phi));
    const auto starts = with_jitter(unconstrained_from_phi(start_phi), opts.extra_starts);

    std::vector<double> r;
    std::vector<double> phi;
    std::vector<double> grad_phi;
    const SmoothObjective smooth = [&](std::span<const double> s, std::span<double> grad) {
        if (!phi_from_unconstrained(s, r, phi)) {
            std::fill(grad.begin(), grad.end(), 0.0);
            return std::numeric_limits<double>::infinity();
        }
        const double q = empirical_q_with_gradient(series, phi, m, grad_phi);
        const Eigen::MatrixXd jac = pacf_to_ar_jacobian(r);
        for (std::size_t j = 0; j < p; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < p; ++i) {
                acc += grad_phi[i] * jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            grad[j] = acc * (1.0 - r[j] * r[j]);
        }
        return q;
    };
    const PlainObjective plain = [&](std::span<const double> s) {
        if (!phi_from_unconstrained(s, r, phi)) return std::numeric_limits<double>::infinity();
        return empirical_q(series, phi, m);
    };

    auto outcome = minimize_multistart(smooth, plain, starts, opts);
    std::vector<double> best_r;
    std::vector<double> best_phi;
    if (!phi_from_unconstrained(outcome.best.x, best_r, best_phi)) {
        best_phi = start_phi;  // unreachable: the start itself is finite
    }
    out.model.phi = std::move(best_phi);
    out.q_value = empirical_q(series, out.model, m);
    out.model.sigma2 = empirical_q(series, out.model, 1);
    out.diagnostics = outcome.diag;
    return out;
}

std::vector<IdealFit> fit_ideal_path(const AcvfSeq& truth, std::size_t p_max, std::size_t m,
                                     const OptimizerOptions& opts) {
    if (m == 0) {
        throw Error(ErrorKind::InvalidArgument, "maximal horizon m must be >= 1");
    }
    const std::size_t need = p_max + m - 1;
    if (truth.gamma.empty() || truth.max_lag() < need) {
        throw Error(ErrorKind::InsufficientLags,
                    "ideal fit needs autocovariances up to lag " + std::to_string(need), need);
    }
    validate_acvf(truth);

    std::vector<IdealFit> path;
    path.reserve(p_max + 1);
    IdealFit white;
    white.m = m;
    white.order = 0;
    white.q_star = population_q(truth, std::span<const double>{}, m);
    white.model.sigma2 = truth.gamma[0];
    white.diagnostics.converged = true;
    path.push_back(white);

    std::vector<double> prev_s;
    std::vector<double> r;
    std::vector<double> phi;
    for (std::size_t p = 1; p <= p_max; ++p) {
        std::vector<double> yw(p, 0.0);
        try {
            yw = levinson_solve(truth, p).phi;
        } catch (const Error&) {
            // singular truth at this order; fall back to white noise
        }
        yw = shrink_to_stationary(std::move(yw));
        auto starts = with_jitter(unconstrained_from_phi(yw), opts.extra_starts);
        std::vector<double> nested = prev_s;
        nested.push_back(0.0);
        starts.insert(starts.begin() + 1, nested);

        const PlainObjective plain = [&](std::span<const double> s) {
            if (!phi_from_unconstrained(s, r, phi)) return std::numeric_limits<double>::infinity();
            return population_q(truth, phi, m);
        };
        const SmoothObjective smooth = [&](std::span<const double> s, std::span<double> grad) {
            const double v = plain(s);
            if (!std::isfinite(v)) {
                std::fill(grad.begin(), grad.end(), 0.0);
                return v;
            }
            central_difference_gradient(plain, s, grad);
            return v;
        };
        auto outcome = minimize_multistart(smooth, plain, starts, opts);
        IdealFit fit;
        fit.m = m;
        fit.order = p;
        std::vector<double> best_r;
        std::vector<double> best_phi;
        phi_from_unconstrained(outcome.best.x, best_r, best_phi);
        fit.model.phi = best_phi;
        fit.q_star = population_q(truth, fit.model, m);
        fit.model.sigma2 = population_q(truth, fit.model, 1);
        fit.diagnostics = outcome.diag;
        path.push_back(std::move(fit));
        prev_s = std::move(outcome.best.x);
    }
    return path;
}

IdealFit fit_ideal(const AcvfSeq& truth, std::size_t p, std::size_t m, const OptimizerOptions& opts) {
    auto path = fit_ideal_path(truth, p, m, opts);
    return std::move(path.back());
}

}  // namespace fmatch
