#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fmatch {

struct OptimizerOptions {
    std::size_t max_iterations = 500;     ///< per start
    double gradient_tolerance = 1e-8;     ///< on ||grad||_inf, scaled by max(1, |f|)
    double step_tolerance = 1e-10;        ///< on ||x_{k+1} - x_k||_inf
    std::size_t extra_starts = 2;         ///< jittered copies of the primary start
};

/// Returns f(x) and writes the gradient into `grad` (same size as x).
using SmoothObjective = std::function<double(std::span<const double> x, std::span<double> grad)>;
using PlainObjective = std::function<double(std::span<const double> x)>;

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    double gradient_norm = 0.0;  ///< inf-norm at x (NaN for Nelder-Mead)
    std::size_t iterations = 0;
    bool converged = false;
    bool stalled = false;  ///< line search could not find descent
};

/// Quasi-Newton minimization with BFGS inverse-Hessian updates and an
/// Armijo backtracking line search.
[[nodiscard]] MinimizeResult bfgs_minimize(const SmoothObjective& f, std::vector<double> x0,
                                           const OptimizerOptions& opts);

/// Nelder-Mead simplex search started from x0 with edge length `scale`.
[[nodiscard]] MinimizeResult nelder_mead_minimize(const PlainObjective& f, std::vector<double> x0,
                                                  const OptimizerOptions& opts, double scale = 0.1);

/// Central differences with step h * max(1, |x_i|).
void central_difference_gradient(const PlainObjective& f, std::span<const double> x,
                                 std::span<double> grad, double h = 1e-6);

}  // namespace fmatch
