#include "fmatch/acvf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "fmatch/error.hpp"
#include "fmatch/predictor.hpp"

namespace fmatch {
namespace {

constexpr double kSingularFloor = 1e-12;
constexpr std::size_t kPsdCheckOrder = 12;
// Relative size of the dropped psi tail; well inside the 1e-12 * gamma(0) target.
constexpr double kPsiTailRelative = 1e-14;
constexpr std::size_t kMaxPsiTerms = 2'000'000;

void require_lags(const AcvfSeq& acvf, std::size_t needed, const char* what) {
    if (acvf.gamma.empty() || acvf.max_lag() < needed) {
        throw Error(ErrorKind::InsufficientLags,
                    std::string(what) + " needs autocovariances up to lag " + std::to_string(needed),
                    needed);
    }
}

}  // namespace

void validate_acvf(const AcvfSeq& acvf) {
    if (acvf.gamma.empty()) {
        throw Error(ErrorKind::InvalidArgument, "empty autocovariance sequence");
    }
    const double g0 = acvf.gamma[0];
    if (!(g0 > 0.0) || !std::isfinite(g0)) {
        throw Error(ErrorKind::InvalidArgument, "gamma(0) must be positive and finite");
    }
    for (std::size_t k = 1; k < acvf.gamma.size(); ++k) {
        if (!std::isfinite(acvf.gamma[k]) || std::abs(acvf.gamma[k]) > g0 * (1.0 + 1e-12)) {
            throw Error(ErrorKind::InvalidArgument,
                        "|gamma(" + std::to_string(k) + ")| exceeds gamma(0)");
        }
    }
    // Durbin's recursion: leading blocks are PSD iff the error variances stay >= 0.
    const std::size_t top = std::min(acvf.max_lag(), kPsdCheckOrder - 1);
    std::vector<double> f;
    double v = g0;
    for (std::size_t j = 1; j <= top; ++j) {
        if (v <= kSingularFloor * g0) {
            return;  // singular but PSD so far; higher blocks inherit the rank deficit
        }
        double acc = acvf.gamma[j];
        for (std::size_t i = 1; i < j; ++i) acc -= f[i - 1] * acvf.gamma[j - i];
        const double r = acc / v;
        std::vector<double> next(j);
        for (std::size_t i = 1; i < j; ++i) next[i - 1] = f[i - 1] - r * f[j - i - 1];
        next[j - 1] = r;
        f = std::move(next);
        v *= (1.0 - r * r);
        if (v < -1e-10 * g0) {
            throw Error(ErrorKind::InvalidArgument,
                        "Toeplitz block of order " + std::to_string(j + 1) +
                            " is not positive semidefinite");
        }
    }
}

LevinsonResult levinson_solve(const AcvfSeq& acvf, std::size_t p) {
    if (p == 0) {
        throw Error(ErrorKind::InvalidArgument, "levinson_solve requires p >= 1");
    }
    require_lags(acvf, p, "levinson_solve");
    const double g0 = acvf.gamma[0];
    const double floor = kSingularFloor * std::abs(g0);

    LevinsonResult out;
    out.pacf.reserve(p);
    out.variances.reserve(p + 1);
    out.variances.push_back(g0);

    std::vector<double>& f = out.phi;
    std::vector<double> next;
    double v = g0;
    for (std::size_t j = 1; j <= p; ++j) {
        if (!(v > floor)) {
            throw Error(ErrorKind::SingularToeplitz,
                        "prediction-error variance at order " + std::to_string(j - 1) +
                            " fell below the singularity floor");
        }
        double acc = acvf.gamma[j];
        for (std::size_t i = 1; i < j; ++i) acc -= f[i - 1] * acvf.gamma[j - i];
        const double r = acc / v;
        next.assign(j, 0.0);
        for (std::size_t i = 1; i < j; ++i) next[i - 1] = f[i - 1] - r * f[j - i - 1];
        next[j - 1] = r;
        f.swap(next);
        v *= (1.0 - r * r);
        out.pacf.push_back(r);
        out.variances.push_back(v);
    }
    return out;
}

std::vector<double> toeplitz_solve(const AcvfSeq& acvf, std::span<const double> rhs) {
    const std::size_t p = rhs.size();
    if (p == 0) return {};
    require_lags(acvf, p - 1, "toeplitz_solve");
    const auto& g = acvf.gamma;
    const double floor = kSingularFloor * std::abs(g[0]);
    if (!(g[0] > floor)) {
        throw Error(ErrorKind::SingularToeplitz, "gamma(0) is not positive");
    }

    std::vector<double> x{rhs[0] / g[0]};
    std::vector<double> f;  // order-j forward predictor
    std::vector<double> next;
    double v = g[0];
    x.reserve(p);
    for (std::size_t j = 1; j < p; ++j) {
        double acc = g[j];
        for (std::size_t i = 1; i < j; ++i) acc -= f[i - 1] * g[j - i];
        const double r = acc / v;
        next.assign(j, 0.0);
        for (std::size_t i = 1; i < j; ++i) next[i - 1] = f[i - 1] - r * f[j - i - 1];
        next[j - 1] = r;
        f.swap(next);
        v *= (1.0 - r * r);
        if (!(v > floor)) {
            throw Error(ErrorKind::SingularToeplitz,
                        "Toeplitz block of order " + std::to_string(j + 1) + " is singular");
        }
        // Gamma_{j+1} [-f_j .. -f_1, 1]' = [0 .. 0, v]'
        double e = 0.0;
        for (std::size_t i = 1; i <= j; ++i) e += g[j + 1 - i] * x[i - 1];
        const double mu = (rhs[j] - e) / v;
        for (std::size_t i = 1; i <= j; ++i) x[i - 1] -= mu * f[j - i];
        x.push_back(mu);
    }
    return x;
}

bool is_stationary(std::span<const double> phi) {
    std::vector<double> a(phi.begin(), phi.end());
    for (double c : a) {
        if (!std::isfinite(c)) return false;
    }
    for (std::size_t j = a.size(); j >= 1; --j) {
        const double r = a[j - 1];
        if (!(std::abs(r) < 1.0)) return false;
        const double denom = 1.0 - r * r;
        std::vector<double> lower(j - 1);
        for (std::size_t i = 1; i < j; ++i) lower[i - 1] = (a[i - 1] + r * a[j - i - 1]) / denom;
        a.swap(lower);
    }
    return true;
}

AcvfSeq ar_acvf(const ArParams& model, std::size_t max_lag) {
    const std::size_t p = model.order();
    if (!(model.sigma2 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "sigma2 must be positive");
    }
    if (!is_stationary(model.phi)) {
        throw Error(ErrorKind::NonStationary, "AR coefficients are outside the stationary region");
    }
    AcvfSeq out;
    out.gamma.assign(max_lag + 1, 0.0);
    if (p == 0) {
        out.gamma[0] = model.sigma2;
        return out;
    }

    // gamma(k) - sum_j phi_j gamma(|k-j|) = sigma2 [k == 0], k = 0..p
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p + 1),
                                                  static_cast<Eigen::Index>(p + 1));
    for (std::size_t k = 0; k <= p; ++k) {
        for (std::size_t j = 1; j <= p; ++j) {
            const std::size_t lag = k >= j ? k - j : j - k;
            a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(lag)) -= model.phi[j - 1];
        }
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p + 1));
    b(0) = model.sigma2;
    const Eigen::VectorXd g = a.partialPivLu().solve(b);

    std::vector<double> full(std::max(max_lag, p) + 1, 0.0);
    for (std::size_t k = 0; k <= p; ++k) full[k] = g(static_cast<Eigen::Index>(k));
    for (std::size_t k = p + 1; k < full.size(); ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= p; ++j) acc += model.phi[j - 1] * full[k - j];
        full[k] = acc;
    }
    std::copy_n(full.begin(), max_lag + 1, out.gamma.begin());
    return out;
}

AcvfSeq arma_acvf(const ArmaSpec& spec, std::size_t max_lag) {
    if (!(spec.sigma2 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "sigma2 must be positive");
    }
    for (double t : spec.ma) {
        if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "MA coefficient not finite");
    }
    if (!is_stationary(spec.ar)) {
        throw Error(ErrorKind::NonStationary, "AR part is outside the stationary region");
    }
    const std::size_t p = spec.ar.size();
    const std::size_t q = spec.ma.size();

    std::vector<double> psi{1.0};
    psi.insert(psi.end(), spec.ma.begin(), spec.ma.end());

    if (p > 0) {
        const double rho = spectral_radius(companion_matrix(spec.ar));
        const double decay = 0.5 * (1.0 + std::min(rho, 1.0));
        const double tail_factor = 1.0 / (1.0 - decay * decay);
        auto psi_at = [&](std::size_t j) {
            double v = j <= q ? (j == 0 ? 1.0 : spec.ma[j - 1]) : 0.0;
            for (std::size_t i = 1; i <= std::min(j, p); ++i) v += spec.ar[i - 1] * psi[j - i];
            return v;
        };
        for (std::size_t j = 1; j <= q; ++j) psi[j] = psi_at(j);

        double sum_sq = 0.0;
        for (double w : psi) sum_sq += w * w;
        const std::size_t start = std::max(p, q) + 1;
        for (std::size_t j = q + 1;; ++j) {
            if (j >= kMaxPsiTerms) {
                throw Error(ErrorKind::NoConvergence, "psi-weight expansion did not settle");
            }
            psi.push_back(psi_at(j));
            sum_sq += psi.back() * psi.back();
            if (j < start) continue;
            // state (psi_j .. psi_{j-p+1}) drives every later weight
            double state = 0.0;
            for (std::size_t i = 0; i < p; ++i) state += psi[j - i] * psi[j - i];
            if (state * tail_factor <= kPsiTailRelative * sum_sq) break;
        }
    }
    // weights beyond the cut are dropped; lags need psi_{j+k} for j over the kept range
    const std::size_t kept = psi.size();
    if (p > 0) {
        for (std::size_t j = kept; j < kept + max_lag; ++j) {
            double v = 0.0;
            for (std::size_t i = 1; i <= p; ++i) v += spec.ar[i - 1] * psi[j - i];
            psi.push_back(v);
        }
    }

    AcvfSeq out;
    out.gamma.assign(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < kept && j + k < psi.size(); ++j) acc += psi[j] * psi[j + k];
        out.gamma[k] = spec.sigma2 * acc;
    }
    return out;
}

std::vector<double> pacf_to_ar(std::span<const double> r) {
    std::vector<double> phi;
    phi.reserve(r.size());
    std::vector<double> next;
    for (std::size_t j = 1; j <= r.size(); ++j) {
        const double rj = r[j - 1];
        if (!(std::abs(rj) < 1.0)) {
            throw Error(ErrorKind::InvalidArgument,
                        "reflection coefficient " + std::to_string(j) + " is outside (-1, 1)");
        }
        next.assign(j, 0.0);
        for (std::size_t i = 1; i < j; ++i) next[i - 1] = phi[i - 1] - rj * phi[j - i - 1];
        next[j - 1] = rj;
        phi.swap(next);
    }
    return phi;
}

std::vector<double> ar_to_pacf(std::span<const double> phi) {
    const std::size_t p = phi.size();
    std::vector<double> r(p);
    std::vector<double> a(phi.begin(), phi.end());
    std::vector<double> lower;
    for (std::size_t j = p; j >= 1; --j) {
        const double rj = a[j - 1];
        if (!(std::abs(rj) < 1.0)) {
            throw Error(ErrorKind::NonStationary,
                        "reflection coefficient " + std::to_string(j) + " has modulus >= 1");
        }
        r[j - 1] = rj;
        const double denom = 1.0 - rj * rj;
        lower.assign(j - 1, 0.0);
        for (std::size_t i = 1; i < j; ++i) lower[i - 1] = (a[i - 1] + rj * a[j - i - 1]) / denom;
        a.swap(lower);
    }
    return r;
}

Eigen::MatrixXd pacf_to_ar_jacobian(std::span<const double> r) {
    const auto p = static_cast<Eigen::Index>(r.size());
    // row i holds d phi^{(j)}_i / d r at the current order j
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(p, p);
    std::vector<double> phi;
    std::vector<double> phi_next;
    for (Eigen::Index j = 1; j <= p; ++j) {
        const double rj = r[static_cast<std::size_t>(j - 1)];
        next.setZero();
        for (Eigen::Index i = 1; i < j; ++i) {
            next.row(i - 1) = d.row(i - 1) - rj * d.row(j - i - 1);
            next(i - 1, j - 1) -= phi[static_cast<std::size_t>(j - i - 1)];
        }
        next(j - 1, j - 1) = 1.0;
        d.swap(next);

        phi_next.assign(static_cast<std::size_t>(j), 0.0);
        for (Eigen::Index i = 1; i < j; ++i) {
            phi_next[static_cast<std::size_t>(i - 1)] =
                phi[static_cast<std::size_t>(i - 1)] - rj * phi[static_cast<std::size_t>(j - i - 1)];
        }
        phi_next[static_cast<std::size_t>(j - 1)] = rj;
        phi.swap(phi_next);
    }
    return d;
}

}  // namespace fmatch
