#pragma once

#include <optional>
#include <ostream>

#include "fmatch/estimator.hpp"
#include "fmatch/experiment.hpp"
#include "fmatch/selection.hpp"
#include "json.hpp"

namespace fmatch::cli {

inline constexpr const char* kFitCsvHeader = "p,m,sigma2,q_value,converged,centered_mean,phi";
inline constexpr const char* kSelectCsvHeader =
    "p,log_loss,bias,criterion,aic,replicates_used,replicates_skipped,converged,chosen,aic_chosen,centered_mean,phi";
inline constexpr const char* kExperimentCsvHeader = "replicate,estimator,p,m,converged,sigma2,q_fit,score,phi";

/// `centered_mean` is empty when the series was not centered.
[[nodiscard]] nlohmann::ordered_json fit_json(const FitResult& fit, std::optional<double> centered_mean);
void write_fit_csv(std::ostream& out, const FitResult& fit, std::optional<double> centered_mean);

struct SelectionReport {
    SelectionResult result;
    std::optional<AicResult> aic;  ///< empty when OLS is infeasible at max order
    std::size_t max_order = 0;
    std::uint64_t seed = 0;
    bool control_variate = true;
    std::optional<double> centered_mean;
};

[[nodiscard]] nlohmann::ordered_json selection_json(const SelectionReport& rep);
void write_selection_csv(std::ostream& out, const SelectionReport& rep);

void write_experiment_csv(std::ostream& out, const ExperimentReport& rep);
[[nodiscard]] nlohmann::ordered_json experiment_summary_json(const ExperimentPlan& plan, const ExperimentReport& rep);

}  // namespace fmatch::cli
