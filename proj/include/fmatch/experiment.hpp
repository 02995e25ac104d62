#pragma once

/** @file
 * Replicated Monte-Carlo comparison of AR estimators against a known truth.
 *
 * Replicate r simulates its series from seed mix_seed(base_seed, r). ARMA
 * truths score every fitted model by the population criterion at horizons
 * 1..H under the true autocovariances. TAR truths score by the empirical
 * criterion on an independent evaluation series of length 10n drawn from
 * mix_seed(base_seed, r, kEvalStream).
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fmatch/acvf.hpp"
#include "fmatch/optimize.hpp"
#include "fmatch/simulation.hpp"

namespace fmatch {

inline constexpr std::uint64_t kEvalStream = 0xE7A1;
inline constexpr std::uint64_t kBootstrapStream = 0xB007;

using TruthSpec = std::variant<ArmaSpec, TarSpec>;

enum class EstimatorKind { Match, Ols, Select, Aic };

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Match;
    std::size_t p = 1;
    std::size_t m = 1;

    /// match_p1_m5, ols_p1, select, aic. Select and Aic take p and m from
    /// the plan's selection settings.
    [[nodiscard]] std::string label() const;
};

struct SelectionSettings {
    std::size_t max_order = 5;
    std::size_t m = 1;
    std::size_t replicates = 100;
    bool control_variate = true;
};

struct ExperimentPlan {
    TruthSpec truth = ArmaSpec{};
    Innovations innovations;
    std::size_t n = 400;
    std::size_t replicates = 1;
    std::vector<EstimatorSpec> estimators;
    std::optional<SelectionSettings> selection;  ///< settings for Select and Aic
    std::uint64_t base_seed = 0;
    std::size_t eval_horizon = 5;
    OptimizerOptions fit;
};

/// Throws InvalidArgument naming the first infeasible setting.
void validate_plan(const ExperimentPlan& plan);

struct ExperimentRow {
    std::size_t replicate = 0;
    std::string estimator;
    std::size_t p = 0;
    std::size_t m = 1;
    bool converged = true;  ///< OLS rows: stationary
    ArParams model;
    double q_fit = 0.0;
    double score = 0.0;
};

struct EstimatorSummary {
    std::string estimator;
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
};

/// Fraction of replicates where `first` scores strictly lower, ties half.
struct WinRate {
    std::string first;
    std::string second;
    double rate = 0.0;
};

struct ReplicateFailure {
    std::size_t replicate = 0;
    std::string message;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;  ///< sorted by (replicate, estimator order)
    std::vector<EstimatorSummary> summary;
    std::vector<WinRate> win_rates;  ///< every pair (i < j) in estimator order
    std::vector<ReplicateFailure> failures;
    std::size_t replicates = 0;
};

/// Replicates run under OpenMP with `jobs` threads; the report does not
/// depend on `jobs`. A failed replicate drops all of its rows. Throws the
/// first failure, tagged with its replicate, when more than 10% fail.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentPlan& plan, int jobs = 1);

/// Single-threaded reference for run_experiment.
[[nodiscard]] ExperimentReport run_experiment_serial(const ExperimentPlan& plan);

}  // namespace fmatch
