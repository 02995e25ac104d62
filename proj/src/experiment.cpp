#include "fmatch/experiment.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <set>

#include <omp.h>

#include "fmatch/error.hpp"
#include "fmatch/estimator.hpp"
#include "fmatch/loss.hpp"
#include "fmatch/rng.hpp"
#include "fmatch/selection.hpp"

namespace fmatch {
namespace {

std::size_t max_fitted_order(const ExperimentPlan& plan) {
    std::size_t p = 0;
    for (const auto& e : plan.estimators) {
        const bool chooses = e.kind == EstimatorKind::Select || e.kind == EstimatorKind::Aic;
        p = std::max(p, chooses ? plan.selection->max_order : e.p);
    }
    return p;
}

struct Scorer {
    const ExperimentPlan* plan = nullptr;
    std::optional<AcvfSeq> truth_acvf;  ///< ARMA truths only

    double operator()(const ArParams& model, std::size_t r) const {
        if (truth_acvf) return population_q(*truth_acvf, model, plan->eval_horizon);
        const auto& tar = std::get<TarSpec>(plan->truth);
        const SeriesSample eval(simulate_tar(tar, 10 * plan->n, mix_seed(plan->base_seed, r, kEvalStream),
                                             kTarBurnin, plan->innovations));
        return empirical_q(eval, model, plan->eval_horizon);
    }
};

std::vector<double> simulate_truth(const ExperimentPlan& plan, std::uint64_t seed) {
    if (const auto* arma = std::get_if<ArmaSpec>(&plan.truth)) {
        return simulate_arma(*arma, plan.n, seed, kArmaBurnin, plan.innovations);
    }
    return simulate_tar(std::get<TarSpec>(plan.truth), plan.n, seed, kTarBurnin, plan.innovations);
}

std::vector<ExperimentRow> run_replicate(const ExperimentPlan& plan, const Scorer& score, std::size_t r) {
    const SeriesSample series(simulate_truth(plan, mix_seed(plan.base_seed, r)));
    std::vector<ExperimentRow> rows;
    rows.reserve(plan.estimators.size());
    for (const auto& est : plan.estimators) {
        ExperimentRow row;
        row.replicate = r;
        row.estimator = est.label();
        switch (est.kind) {
            case EstimatorKind::Match: {
                const FitResult fit = fit_match(series, est.p, est.m, plan.fit);
                row.p = est.p;
                row.m = est.m;
                row.converged = fit.diagnostics.converged;
                row.model = fit.model;
                row.q_fit = fit.q_value;
                break;
            }
            case EstimatorKind::Ols: {
                const OlsFit fit = fit_ols(series, est.p);
                row.p = est.p;
                row.converged = fit.stationary;
                row.model = fit.model;
                row.q_fit = fit.model.sigma2;
                break;
            }
            case EstimatorKind::Select: {
                const auto& sel = *plan.selection;
                BootstrapOptions opts;
                opts.replicates = sel.replicates;
                opts.seed = mix_seed(plan.base_seed, r, kBootstrapStream);
                opts.control_variate = sel.control_variate;
                opts.fit = plan.fit;
                const SelectionResult res = select_order(series, sel.max_order, sel.m, opts);
                const FitResult& fit = res.rows[res.chosen_p].fit;
                row.p = res.chosen_p;
                row.m = sel.m;
                row.converged = fit.diagnostics.converged;
                row.model = fit.model;
                row.q_fit = fit.q_value;
                break;
            }
            case EstimatorKind::Aic: {
                const AicResult aic = aic_baseline(series, plan.selection->max_order);
                const OlsFit fit = fit_ols(series, aic.chosen_p);
                row.p = aic.chosen_p;
                row.converged = fit.stationary;
                row.model = fit.model;
                row.q_fit = fit.model.sigma2;
                break;
            }
        }
        row.score = score(row.model, r);
        rows.push_back(std::move(row));
    }
    return rows;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

ExperimentReport assemble(const ExperimentPlan& plan, std::vector<std::vector<ExperimentRow>>& per_rep,
                          const std::vector<std::exception_ptr>& errors) {
    ExperimentReport rep;
    rep.replicates = plan.replicates;
    for (std::size_t r = 0; r < plan.replicates; ++r) {
        if (!errors[r]) continue;
        try {
            std::rethrow_exception(errors[r]);
        } catch (const std::exception& e) {
            rep.failures.push_back({r, e.what()});
        }
    }
    if (rep.failures.size() * 10 > plan.replicates) {
        const auto& first = rep.failures.front();
        throw Error(ErrorKind::DegenerateFit, std::to_string(rep.failures.size()) + " of " +
                                                  std::to_string(plan.replicates) +
                                                  " replicates failed (limit 10%); replicate " +
                                                  std::to_string(first.replicate) + ": " + first.message);
    }

    const std::size_t k = plan.estimators.size();
    std::vector<std::vector<double>> scores(k);
    for (std::size_t r = 0; r < plan.replicates; ++r) {
        if (errors[r]) continue;
        for (std::size_t j = 0; j < k; ++j) {
            scores[j].push_back(per_rep[r][j].score);
            rep.rows.push_back(std::move(per_rep[r][j]));
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        EstimatorSummary s;
        s.estimator = plan.estimators[j].label();
        s.count = scores[j].size();
        double sum = 0.0;
        for (double v : scores[j]) sum += v;
        s.mean = sum / static_cast<double>(s.count);
        s.median = median_of(scores[j]);
        rep.summary.push_back(std::move(s));
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            double wins = 0.0;
            for (std::size_t i = 0; i < scores[a].size(); ++i) {
                if (scores[a][i] < scores[b][i]) {
                    wins += 1.0;
                } else if (scores[a][i] == scores[b][i]) {
                    wins += 0.5;
                }
            }
            rep.win_rates.push_back({plan.estimators[a].label(), plan.estimators[b].label(),
                                     wins / static_cast<double>(scores[a].size())});
        }
    }
    return rep;
}

Scorer make_scorer(const ExperimentPlan& plan) {
    Scorer s;
    s.plan = &plan;
    if (const auto* arma = std::get_if<ArmaSpec>(&plan.truth)) {
        s.truth_acvf = arma_acvf(*arma, max_fitted_order(plan) + plan.eval_horizon);
    }
    return s;
}

}  // namespace

std::string EstimatorSpec::label() const {
    switch (kind) {
        case EstimatorKind::Match:
            return "match_p" + std::to_string(p) + "_m" + std::to_string(m);
        case EstimatorKind::Ols:
            return "ols_p" + std::to_string(p);
        case EstimatorKind::Select:
            return "select";
        case EstimatorKind::Aic:
            return "aic";
    }
    return "unknown";
}

void validate_plan(const ExperimentPlan& plan) {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
    if (plan.replicates == 0) fail("replicates must be >= 1");
    if (plan.n == 0) fail("n must be >= 1");
    if (plan.eval_horizon == 0) fail("eval_horizon must be >= 1");
    if (plan.estimators.empty()) fail("at least one estimator is required");

    std::set<std::string> labels;
    for (const auto& e : plan.estimators) {
        const std::string name = e.label();
        if (!labels.insert(name).second) fail("estimator " + name + " is listed twice");
        switch (e.kind) {
            case EstimatorKind::Match:
                if (e.m == 0) fail(name + ": m must be >= 1");
                if (plan.n < min_length(e.p, e.m)) fail(name + ": needs n >= p + m");
                break;
            case EstimatorKind::Ols:
                if (plan.n < 2 * e.p + 1) fail(name + ": needs n >= 2p + 1");
                break;
            case EstimatorKind::Select:
            case EstimatorKind::Aic: {
                if (!plan.selection) fail(name + ": needs selection settings");
                const auto& sel = *plan.selection;
                if (sel.m == 0) fail(name + ": selection m must be >= 1");
                if (sel.replicates == 0) fail(name + ": bootstrap replicates must be >= 1");
                if (e.kind == EstimatorKind::Select && plan.n < min_length(sel.max_order, sel.m)) {
                    fail(name + ": needs n >= max_order + m");
                }
                if (e.kind == EstimatorKind::Aic && plan.n < 2 * sel.max_order + 1) {
                    fail(name + ": needs n >= 2 max_order + 1");
                }
                break;
            }
        }
    }
    if (const auto* arma = std::get_if<ArmaSpec>(&plan.truth)) {
        if (!is_stationary(arma->ar)) fail("truth AR part is not stationary");
        if (!(arma->sigma2 > 0.0)) fail("truth sigma2 must be positive");
    } else {
        const auto& tar = std::get<TarSpec>(plan.truth);
        if (!is_stationary(tar.phi_low) || !is_stationary(tar.phi_high)) fail("a TAR regime is not stationary");
        if (tar.delay == 0) fail("TAR delay must be >= 1");
        if (!(tar.sigma2 > 0.0)) fail("truth sigma2 must be positive");
        if (10 * plan.n < min_length(max_fitted_order(plan), plan.eval_horizon)) {
            fail("evaluation series of length 10n is shorter than max order + eval_horizon");
        }
    }
    if (plan.innovations.kind == InnovationKind::StudentT && !(plan.innovations.df > 2.0)) {
        fail("Student-t innovations need df > 2");
    }
}

ExperimentReport run_experiment(const ExperimentPlan& plan, int jobs) {
    validate_plan(plan);
    const Scorer score = make_scorer(plan);
    const std::size_t reps = plan.replicates;
    std::vector<std::vector<ExperimentRow>> per_rep(reps);
    std::vector<std::exception_ptr> errors(reps);
    const auto count = static_cast<std::int64_t>(reps);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
    for (std::int64_t idx = 0; idx < count; ++idx) {
        const auto r = static_cast<std::size_t>(idx);
        try {
            per_rep[r] = run_replicate(plan, score, r);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    return assemble(plan, per_rep, errors);
}

ExperimentReport run_experiment_serial(const ExperimentPlan& plan) {
    validate_plan(plan);
    const Scorer score = make_scorer(plan);
    std::vector<std::vector<ExperimentRow>> per_rep(plan.replicates);
    std::vector<std::exception_ptr> errors(plan.replicates);
    for (std::size_t r = 0; r < plan.replicates; ++r) {
        try {
            per_rep[r] = run_replicate(plan, score, r);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    return assemble(plan, per_rep, errors);
}

}  // namespace fmatch
