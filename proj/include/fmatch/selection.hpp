#pragma once

/** @file
 * Order selection by the log multi-step loss L(p) = log Q(phi_hat_p),
 * penalized with a parametric-bootstrap estimate of its optimism
 * E{L*(p) - L(p)}.
 *
 * Bootstrap world for order p: the fitted phi_hat_p driven by i.i.d. draws
 * from its centered one-step residuals. Its autocovariances are known
 * exactly (ar_acvf of phi_hat_p with the pool variance), so the ideal-world
 * loss L* of every refit is computable inside that world.
 *
 * Each replicate contributes D_b = L*_b - L_b. By default the estimate is the
 * mean of D_b + W_b, where W_b = (mean of the drawn one-step innovations
 * squared) / (pool variance) - 1 has expectation exactly zero. W_b cancels
 * most of the sampling noise in L_b without moving the expectation.
 */

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fmatch/acvf.hpp"
#include "fmatch/estimator.hpp"
#include "fmatch/loss.hpp"

namespace fmatch {

struct LogLoss {
    double value = 0.0;
    FitResult fit;
};

/// log of the fitted criterion. Throws DegenerateFit when Q <= 1e-300.
[[nodiscard]] LogLoss log_loss(const SeriesSample& series, std::size_t p, std::size_t m,
                               const OptimizerOptions& opts = {});

/// log Q*(phi_tilde_p) under a known truth.
[[nodiscard]] double ideal_log_loss(const AcvfSeq& truth, std::size_t p, std::size_t m,
                                    const OptimizerOptions& opts = {});

struct DecreaseApprox {
    double lhs = 0.0;  ///< L*(p) - L*(p+1)
    double rhs = 0.0;  ///< (Q*_p - Q*_{p+1}) / Q*_{p+1}
};

[[nodiscard]] DecreaseApprox approx_decrease(const AcvfSeq& truth, std::size_t p, std::size_t m,
                                             const OptimizerOptions& opts = {});

struct BootstrapWorld {
    std::size_t order = 0;
    std::size_t m = 1;
    std::size_t n = 0;
    std::vector<double> phi;
    std::vector<double> residuals;  ///< centered resampling pool
    double pool_variance = 0.0;
    AcvfSeq truth;                  ///< lags 0..p+m
};

/// Builds the world from a fit of `series`. Throws DegenerateFit when the
/// residual pool has no spread.
[[nodiscard]] BootstrapWorld make_bootstrap_world(const SeriesSample& series, const FitResult& fit);

struct BootstrapDraw {
    std::vector<double> series;
    double innovation_ratio = 0.0;  ///< W_b
};

/// Length-n series from the world, burn-in 200 + p, stream key `key`.
[[nodiscard]] BootstrapDraw bootstrap_series(const BootstrapWorld& world, std::uint64_t key);

struct ReplicateOutcome {
    double log_loss = 0.0;          ///< L of the refit on the bootstrap series
    double ideal_log_loss = 0.0;    ///< L* of the refit under the world's truth
    double innovation_ratio = 0.0;  ///< W_b, zero-mean control variate
    bool skipped = false;           ///< degenerate replicate
};

struct BootstrapOptions {
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool control_variate = true;
    OptimizerOptions fit;
};

/// Replicates b = 1..B for each world; world w uses stream
/// mix_seed(seed, order_w, b). Result is indexed [w * B + b - 1].
/// OpenMP over the flattened (world, b) range with `jobs` threads.
[[nodiscard]] std::vector<ReplicateOutcome> bootstrap_replicates(const std::vector<BootstrapWorld>& worlds,
                                                                 std::size_t replicates, std::uint64_t seed,
                                                                 const OptimizerOptions& opts, int jobs);

/// Single-threaded reference for bootstrap_replicates.
[[nodiscard]] std::vector<ReplicateOutcome> bootstrap_replicates_serial(
    const std::vector<BootstrapWorld>& worlds, std::size_t replicates, std::uint64_t seed,
    const OptimizerOptions& opts);

struct BootstrapEstimate {
    double bias = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;
};

/// Mean of L* - L (+ W with the control variate) over the non-skipped
/// replicates, in index order. Throws DegenerateFit if more than 20% are
/// skipped.
[[nodiscard]] BootstrapEstimate summarize_bootstrap(const ReplicateOutcome* outcomes, std::size_t replicates,
                                                    bool control_variate);

[[nodiscard]] BootstrapEstimate bootstrap_bias(const SeriesSample& series, std::size_t p, std::size_t m,
                                               const BootstrapOptions& opts);

struct SelectionRow {
    std::size_t order = 0;
    double log_loss = 0.0;
    double bias = 0.0;
    double criterion = 0.0;  ///< log_loss + bias
    std::size_t replicates_used = 0;
    std::size_t replicates_skipped = 0;
    FitResult fit;
};

struct SelectionResult {
    std::vector<SelectionRow> rows;  ///< orders 0..p_max
    std::size_t chosen_p = 0;
    std::size_t m = 1;
    std::size_t replicates = 0;
    std::string tie_break;
};

/// Throws TooShort with required() = largest feasible p_max when n < p_max + m.
[[nodiscard]] SelectionResult select_order(const SeriesSample& series, std::size_t p_max, std::size_t m,
                                           const BootstrapOptions& opts);

struct AicResult {
    std::vector<double> aic;  ///< log sigma2_p + 2p/n, p = 0..p_max
    std::size_t chosen_p = 0;
};

[[nodiscard]] AicResult aic_baseline(const SeriesSample& series, std::size_t p_max);

}  // namespace fmatch
