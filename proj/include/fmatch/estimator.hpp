#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fmatch/acvf.hpp"
#include "fmatch/loss.hpp"
#include "fmatch/optimize.hpp"

namespace fmatch {

struct FitDiagnostics {
    std::size_t iterations = 0;
    std::size_t restarts = 0;  ///< starting points tried
    bool converged = false;
    bool fallback_used = false;  ///< Nelder-Mead ran after a stalled gradient path
    double gradient_norm = 0.0;
};

/// Feature-matching fit: phi minimizes Q over the stationary region, sigma2
/// is the mean squared one-step residual of that phi.
struct FitResult {
    ArParams model;
    double q_value = 0.0;
    std::size_t m = 1;
    std::size_t order = 0;
    FitDiagnostics diagnostics;
};

struct OlsFit {
    ArParams model;
    bool stationary = true;
};

/// Minimizer of the population criterion for a known truth; sigma2 is the
/// attained one-step population error.
struct IdealFit {
    ArParams model;
    double q_star = 0.0;
    std::size_t m = 1;
    std::size_t order = 0;
    FitDiagnostics diagnostics;
};

/// Conditional least squares on the one-step regression of y_{t+1} on
/// y_{t,p}, t = p..n-1. The solution is not forced to be stationary.
/// Throws TooShort (n < 2p + 1) or SingularDesign.
[[nodiscard]] OlsFit fit_ols(const SeriesSample& series, std::size_t p);

/// Scales phi by 0.95 until the companion spectral radius drops below 0.99.
[[nodiscard]] std::vector<double> shrink_to_stationary(std::vector<double> phi);

/// Minimizes the empirical criterion over the stationary region. The search
/// runs over unconstrained s with reflection coefficients r = tanh(s).
/// A run that fails to converge is returned with converged = false.
[[nodiscard]] FitResult fit_match(const SeriesSample& series, std::size_t p, std::size_t m,
                                  const OptimizerOptions& opts = {});

/// Ideal-world fit of order p.
[[nodiscard]] IdealFit fit_ideal(const AcvfSeq& truth, std::size_t p, std::size_t m,
                                 const OptimizerOptions& opts = {});

/// Ideal-world fits for orders 0..p_max. Each order is also started from the
/// previous optimum with a zero appended reflection coefficient, so the
/// attained criterion never increases with the order.
[[nodiscard]] std::vector<IdealFit> fit_ideal_path(const AcvfSeq& truth, std::size_t p_max,
                                                   std::size_t m, const OptimizerOptions& opts = {});

}  // namespace fmatch
