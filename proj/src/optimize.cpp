#include "fmatch/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace fmatch {
namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

}  // namespace

MinimizeResult bfgs_minimize(const SmoothObjective& f, std::vector<double> x0,
                             const OptimizerOptions& opts) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    MinimizeResult res;
    res.x = std::move(x0);
    std::vector<double> g(res.x.size());
    res.value = f(res.x, g);
    if (n == 0) {
        res.converged = true;
        return res;
    }

    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;
    std::vector<double> xn(res.x.size());
    std::vector<double> gn(res.x.size());
    Eigen::VectorXd s(n);
    Eigen::VectorXd y(n);
    Eigen::VectorXd d(n);

    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        if (inf_norm(g) <= opts.gradient_tolerance * std::max(1.0, std::abs(res.value))) {
            res.converged = true;
            break;
        }
        const Eigen::Map<const Eigen::VectorXd> gv(g.data(), n);
        d = -h * gv;
        double slope = gv.dot(d);
        if (!(slope < 0.0)) {
            h.setIdentity();
            scaled = false;
            d = -gv;
            slope = gv.dot(d);
        }
        double step = 1.0;
        if (!scaled) step = std::min(1.0, 1.0 / std::max(d.cwiseAbs().maxCoeff(), 1e-300));

        bool accepted = false;
        double fn = 0.0;
        for (int ls = 0; ls < kMaxBacktracks; ++ls) {
            for (Eigen::Index i = 0; i < n; ++i) {
                xn[static_cast<std::size_t>(i)] = res.x[static_cast<std::size_t>(i)] + step * d(i);
            }
            fn = f(xn, gn);
            if (std::isfinite(fn) && fn <= res.value + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++res.iterations;
        if (!accepted) {
            res.stalled = true;
            break;
        }

        for (Eigen::Index i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            s(i) = xn[u] - res.x[u];
            y(i) = gn[u] - g[u];
        }
        res.x.swap(xn);
        g.swap(gn);
        res.value = fn;
        if (s.cwiseAbs().maxCoeff() < opts.step_tolerance) {
            res.converged = true;
            break;
        }

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                h *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = h * y;
            const double yhy = y.dot(hy);
            h += ((1.0 + rho * yhy) * rho) * (s * s.transpose()) -
                 rho * (hy * s.transpose() + s * hy.transpose());
        }
    }
    res.gradient_norm = inf_norm(g);
    if (!res.converged &&
        res.gradient_norm <= opts.gradient_tolerance * std::max(1.0, std::abs(res.value))) {
        res.converged = true;
    }
    return res;
}

MinimizeResult nelder_mead_minimize(const PlainObjective& f, std::vector<double> x0,
                                    const OptimizerOptions& opts, double scale) {
    const std::size_t n = x0.size();
    MinimizeResult res;
    if (n == 0) {
        res.x = std::move(x0);
        res.value = f(res.x);
        res.converged = true;
        res.gradient_norm = std::numeric_limits<double>::quiet_NaN();
        return res;
    }

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += scale;
    std::vector<double> vals(n + 1);
    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n);
    std::vector<double> trial(n);
    std::vector<double> trial2(n);
    const std::size_t max_iter = opts.max_iterations * (n + 1);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double size = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(pts[i][j] - pts[best][j]));
        }
        const double spread = vals[worst] - vals[best];
        if (size < opts.step_tolerance ||
            (spread <= 1e-15 * std::max(1.0, std::abs(vals[best])) && size < 1e-6)) {
            res.converged = true;
            break;
        }
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
        }
        for (std::size_t j = 0; j < n; ++j) trial[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        const double fr = eval(trial);
        if (fr < vals[best]) {
            for (std::size_t j = 0; j < n; ++j) trial2[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[worst] = trial2;
                vals[worst] = fe;
            } else {
                pts[worst] = trial;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = trial;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        for (std::size_t j = 0; j < n; ++j) {
            trial2[j] = outside ? centroid[j] + 0.5 * (trial[j] - centroid[j])
                                : centroid[j] + 0.5 * (pts[worst][j] - centroid[j]);
        }
        const double fc = eval(trial2);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = trial2;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
            vals[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const auto idx = static_cast<std::size_t>(it - vals.begin());
    res.x = pts[idx];
    res.value = vals[idx];
    res.gradient_norm = std::numeric_limits<double>::quiet_NaN();
    return res;
}

void central_difference_gradient(const PlainObjective& f, std::span<const double> x,
                                 std::span<double> grad, double h) {
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + step;
        const double up = f(probe);
        probe[i] = x[i] - step;
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
}

}  // namespace fmatch
