#include "report.hpp"

#include "io.hpp"

namespace fmatch::cli {
namespace {

using nlohmann::ordered_json;

ordered_json optional_number(std::optional<double> v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string optional_cell(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

ordered_json truth_json(const TruthSpec& truth) {
    if (const auto* arma = std::get_if<ArmaSpec>(&truth)) {
        return {{"model", "arma"}, {"ar", arma->ar}, {"ma", arma->ma}, {"sigma2", arma->sigma2}};
    }
    const auto& tar = std::get<TarSpec>(truth);
    return {{"model", "tar"},
            {"ar_low", tar.phi_low},
            {"ar_high", tar.phi_high},
            {"threshold", tar.threshold},
            {"delay", tar.delay},
            {"sigma2", tar.sigma2}};
}

}  // namespace

ordered_json fit_json(const FitResult& fit, std::optional<double> centered_mean) {
    return {{"phi", fit.model.phi},
            {"sigma2", fit.model.sigma2},
            {"q_value", fit.q_value},
            {"m", fit.m},
            {"p", fit.order},
            {"converged", fit.diagnostics.converged},
            {"centered_mean", optional_number(centered_mean)},
            {"diagnostics",
             {{"iterations", fit.diagnostics.iterations},
              {"restarts", fit.diagnostics.restarts},
              {"fallback_used", fit.diagnostics.fallback_used},
              {"gradient_norm", fit.diagnostics.gradient_norm}}}};
}

void write_fit_csv(std::ostream& out, const FitResult& fit, std::optional<double> centered_mean) {
    out << kFitCsvHeader << '\n'
        << fit.order << ',' << fit.m << ',' << format_double(fit.model.sigma2) << ',' << format_double(fit.q_value)
        << ',' << (fit.diagnostics.converged ? "true" : "false") << ',' << optional_cell(centered_mean) << ','
        << join_reals(fit.model.phi, ';') << '\n';
}

ordered_json selection_json(const SelectionReport& rep) {
    const auto& res = rep.result;
    ordered_json rows = ordered_json::array();
    for (const auto& row : res.rows) {
        rows.push_back({{"p", row.order},
                        {"log_loss", row.log_loss},
                        {"bias", row.bias},
                        {"criterion", row.criterion},
                        {"aic", rep.aic ? ordered_json(rep.aic->aic[row.order]) : ordered_json(nullptr)},
                        {"replicates_used", row.replicates_used},
                        {"replicates_skipped", row.replicates_skipped},
                        {"converged", row.fit.diagnostics.converged},
                        {"phi", row.fit.model.phi},
                        {"sigma2", row.fit.model.sigma2}});
    }
    return {{"m", res.m},
            {"max_order", rep.max_order},
            {"bootstrap", res.replicates},
            {"seed", rep.seed},
            {"bias_estimator", rep.control_variate ? "control_variate" : "plain"},
            {"centered_mean", optional_number(rep.centered_mean)},
            {"chosen_p", res.chosen_p},
            {"tie_break", res.tie_break},
            {"aic_chosen_p", rep.aic ? ordered_json(rep.aic->chosen_p) : ordered_json(nullptr)},
            {"rows", rows}};
}

void write_selection_csv(std::ostream& out, const SelectionReport& rep) {
    const auto& res = rep.result;
    out << kSelectCsvHeader << '\n';
    for (const auto& row : res.rows) {
        const std::size_t p = row.order;
        out << p << ',' << format_double(row.log_loss) << ',' << format_double(row.bias) << ','
            << format_double(row.criterion) << ','
            << (rep.aic ? format_double(rep.aic->aic[p]) : std::string()) << ',' << row.replicates_used << ','
            << row.replicates_skipped << ',' << (row.fit.diagnostics.converged ? "true" : "false") << ','
            << (p == res.chosen_p ? 1 : 0) << ',' << (rep.aic ? (p == rep.aic->chosen_p ? "1" : "0") : "") << ','
            << optional_cell(rep.centered_mean) << ',' << join_reals(row.fit.model.phi, ';') << '\n';
    }
}

void write_experiment_csv(std::ostream& out, const ExperimentReport& rep) {
    out << kExperimentCsvHeader << '\n';
    for (const auto& row : rep.rows) {
        out << row.replicate << ',' << row.estimator << ',' << row.p << ',' << row.m << ','
            << (row.converged ? "true" : "false") << ',' << format_double(row.model.sigma2) << ','
            << format_double(row.q_fit) << ',' << format_double(row.score) << ',' << join_reals(row.model.phi, ';')
            << '\n';
    }
}

ordered_json experiment_summary_json(const ExperimentPlan& plan, const ExperimentReport& rep) {
    ordered_json estimators = ordered_json::array();
    for (const auto& s : rep.summary) {
        estimators.push_back({{"estimator", s.estimator}, {"count", s.count}, {"mean", s.mean}, {"median", s.median}});
    }
    ordered_json wins = ordered_json::array();
    for (const auto& w : rep.win_rates) {
        wins.push_back({{"first", w.first}, {"second", w.second}, {"win_rate", w.rate}});
    }
    ordered_json failures = ordered_json::array();
    for (const auto& f : rep.failures) failures.push_back({{"replicate", f.replicate}, {"message", f.message}});

    const bool scored_by_population = std::holds_alternative<ArmaSpec>(plan.truth);
    return {{"truth", truth_json(plan.truth)},
            {"innovations", plan.innovations.kind == InnovationKind::Gaussian ? "gaussian" : "student_t"},
            {"n", plan.n},
            {"replicates", rep.replicates},
            {"completed", rep.replicates - rep.failures.size()},
            {"seed", plan.base_seed},
            {"eval_horizon", plan.eval_horizon},
            {"scoring", scored_by_population ? "population" : "held_out"},
            {"estimators", estimators},
            {"win_rates", wins},
            {"failures", failures}};
}

}  // namespace fmatch::cli
