#include "fmatch/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>

#include <omp.h>

#include "fmatch/error.hpp"
#include "fmatch/rng.hpp"

namespace fmatch {
namespace {

constexpr double kDegenerateQ = 1e-300;
constexpr std::size_t kBootstrapBurnin = 200;

ReplicateOutcome run_replicate(const BootstrapWorld& world, std::uint64_t key, const OptimizerOptions& opts) {
    BootstrapDraw draw = bootstrap_series(world, key);
    const SeriesSample sample(std::move(draw.series));
    const FitResult fit = fit_match(sample, world.order, world.m, opts);
    ReplicateOutcome out;
    out.innovation_ratio = draw.innovation_ratio;
    if (!(fit.q_value > kDegenerateQ)) {
        out.skipped = true;
        return out;
    }
    out.log_loss = std::log(fit.q_value);
    out.ideal_log_loss = std::log(population_q(world.truth, fit.model, world.m));
    return out;
}

void rethrow_first(const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

LogLoss log_loss(const SeriesSample& series, std::size_t p, std::size_t m, const OptimizerOptions& opts) {
    LogLoss out{0.0, fit_match(series, p, m, opts)};
    if (!(out.fit.q_value > kDegenerateQ)) {
        throw Error(ErrorKind::DegenerateFit,
                    "fitted criterion is zero at order " + std::to_string(p) + "; the series is perfectly predictable");
    }
    out.value = std::log(out.fit.q_value);
    return out;
}

double ideal_log_loss(const AcvfSeq& truth, std::size_t p, std::size_t m, const OptimizerOptions& opts) {
    return std::log(fit_ideal(truth, p, m, opts).q_star);
}

DecreaseApprox approx_decrease(const AcvfSeq& truth, std::size_t p, std::size_t m, const OptimizerOptions& opts) {
    const auto path = fit_ideal_path(truth, p + 1, m, opts);
    const double lo = path[p].q_star;
    const double hi = path[p + 1].q_star;
    return {std::log(lo) - std::log(hi), (lo - hi) / hi};
}

BootstrapWorld make_bootstrap_world(const SeriesSample& series, const FitResult& fit) {
    BootstrapWorld w;
    w.order = fit.order;
    w.m = fit.m;
    w.n = series.size();
    w.phi = fit.model.phi;

    const auto y = series.values();
    const std::size_t p = w.order;
    // one-step residuals for targets y_{p+1}..y_n
    w.residuals.reserve(w.n - p);
    for (std::size_t target = p; target < w.n; ++target) {
        double pred = 0.0;
        for (std::size_t i = 0; i < p; ++i) pred += w.phi[i] * y[target - 1 - i];
        w.residuals.push_back(y[target] - pred);
    }
    double mean = 0.0;
    for (double e : w.residuals) mean += e;
    mean /= static_cast<double>(w.residuals.size());
    double var = 0.0;
    for (double& e : w.residuals) {
        e -= mean;
        var += e * e;
    }
    var /= static_cast<double>(w.residuals.size());
    if (!(var > kDegenerateQ)) {
        throw Error(ErrorKind::DegenerateFit, "residual pool has zero spread; nothing to resample");
    }
    w.pool_variance = var;
    w.truth = ar_acvf(ArParams{w.phi, var}, p + w.m);
    return w;
}

BootstrapDraw bootstrap_series(const BootstrapWorld& world, std::uint64_t key) {
    CounterRng rng(key);
    const std::size_t p = world.order;
    const std::size_t total = kBootstrapBurnin + p + world.n;
    const std::size_t first_kept = total - world.n;
    const std::size_t pool = world.residuals.size();
    std::vector<double> x(total);
    double innov_ss = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
        const double e = world.residuals[rng.below(pool)];
        // innovations behind the one-step targets of the kept series
        if (t >= first_kept + p) innov_ss += e * e;
        double v = e;
        for (std::size_t i = 1; i <= std::min(p, t); ++i) v += world.phi[i - 1] * x[t - i];
        x[t] = v;
    }
    BootstrapDraw out;
    out.series.assign(x.begin() + static_cast<std::ptrdiff_t>(first_kept), x.end());
    out.innovation_ratio = innov_ss / static_cast<double>(world.n - p) / world.pool_variance - 1.0;
    return out;
}

std::vector<ReplicateOutcome> bootstrap_replicates(const std::vector<BootstrapWorld>& worlds,
                                                   std::size_t replicates, std::uint64_t seed,
                                                   const OptimizerOptions& opts, int jobs) {
    const std::size_t total = worlds.size() * replicates;
    std::vector<ReplicateOutcome> out(total);
    std::vector<std::exception_ptr> errors(total);
    const auto count = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
    for (std::int64_t idx = 0; idx < count; ++idx) {
        const auto i = static_cast<std::size_t>(idx);
        const BootstrapWorld& w = worlds[i / replicates];
        const std::size_t b = i % replicates + 1;
        try {
            out[i] = run_replicate(w, mix_seed(seed, w.order, b), opts);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return out;
}

std::vector<ReplicateOutcome> bootstrap_replicates_serial(const std::vector<BootstrapWorld>& worlds,
                                                          std::size_t replicates, std::uint64_t seed,
                                                          const OptimizerOptions& opts) {
    std::vector<ReplicateOutcome> out;
    out.reserve(worlds.size() * replicates);
    for (const auto& w : worlds) {
        for (std::size_t b = 1; b <= replicates; ++b) {
            out.push_back(run_replicate(w, mix_seed(seed, w.order, b), opts));
        }
    }
    return out;
}

BootstrapEstimate summarize_bootstrap(const ReplicateOutcome* outcomes, std::size_t replicates,
                                      bool control_variate) {
    BootstrapEstimate est;
    double sum = 0.0;
    for (std::size_t b = 0; b < replicates; ++b) {
        if (outcomes[b].skipped) {
            ++est.skipped;
            continue;
        }
        ++est.used;
        sum += outcomes[b].ideal_log_loss - outcomes[b].log_loss;
        if (control_variate) sum += outcomes[b].innovation_ratio;
    }
    if (est.used == 0 || est.skipped * 5 > replicates) {
        throw Error(ErrorKind::DegenerateFit,
                    std::to_string(est.skipped) + " of " + std::to_string(replicates) +
                        " bootstrap replicates were degenerate (limit 20%)");
    }
    est.bias = sum / static_cast<double>(est.used);
    return est;
}

BootstrapEstimate bootstrap_bias(const SeriesSample& series, std::size_t p, std::size_t m,
                                 const BootstrapOptions& opts) {
    if (opts.replicates == 0) {
        throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least one replicate");
    }
    const FitResult fit = fit_match(series, p, m, opts.fit);
    const std::vector<BootstrapWorld> worlds{make_bootstrap_world(series, fit)};
    const auto outcomes = bootstrap_replicates(worlds, opts.replicates, opts.seed, opts.fit, opts.jobs);
    return summarize_bootstrap(outcomes.data(), opts.replicates, opts.control_variate);
}

SelectionResult select_order(const SeriesSample& series, std::size_t p_max, std::size_t m,
                             const BootstrapOptions& opts) {
    const std::size_t replicates = opts.replicates;
    if (replicates == 0) {
        throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least one replicate");
    }
    if (m == 0) {
        throw Error(ErrorKind::InvalidArgument, "maximal horizon m must be >= 1");
    }
    const std::size_t n = series.size();
    if (n < min_length(p_max, m)) {
        if (n >= min_length(0, m)) {
            throw Error(ErrorKind::TooShort,
                        "max order " + std::to_string(p_max) + " is infeasible for n = " + std::to_string(n) +
                            " and m = " + std::to_string(m) + "; largest feasible max order is " +
                            std::to_string(n - m),
                        n - m);
        }
        throw Error(ErrorKind::TooShort,
                    "n = " + std::to_string(n) + " is shorter than the horizon m = " + std::to_string(m));
    }

    SelectionResult res;
    res.m = m;
    res.replicates = replicates;
    std::vector<BootstrapWorld> worlds;
    worlds.reserve(p_max + 1);
    for (std::size_t p = 0; p <= p_max; ++p) {
        LogLoss ll = log_loss(series, p, m, opts.fit);
        worlds.push_back(make_bootstrap_world(series, ll.fit));
        SelectionRow row;
        row.order = p;
        row.log_loss = ll.value;
        row.fit = std::move(ll.fit);
        res.rows.push_back(std::move(row));
    }

    const auto outcomes = bootstrap_replicates(worlds, replicates, opts.seed, opts.fit, opts.jobs);
    for (std::size_t p = 0; p <= p_max; ++p) {
        const auto est =
            summarize_bootstrap(outcomes.data() + p * replicates, replicates, opts.control_variate);
        auto& row = res.rows[p];
        row.bias = est.bias;
        row.replicates_used = est.used;
        row.replicates_skipped = est.skipped;
        row.criterion = row.log_loss + row.bias;
    }

    std::size_t best = 0;
    std::vector<std::size_t> tied{0};
    for (std::size_t p = 1; p <= p_max; ++p) {
        if (res.rows[p].criterion < res.rows[best].criterion) {
            best = p;
            tied = {p};
        } else if (res.rows[p].criterion == res.rows[best].criterion) {
            tied.push_back(p);
        }
    }
    res.chosen_p = best;
    if (tied.size() > 1) {
        res.tie_break = "orders";
        for (std::size_t p : tied) res.tie_break += " " + std::to_string(p);
        res.tie_break += " tie; smallest chosen";
    } else {
        res.tie_break = "none";
    }
    return res;
}

AicResult aic_baseline(const SeriesSample& series, std::size_t p_max) {
    const std::size_t n = series.size();
    if (n < 2 * p_max + 1) {
        throw Error(ErrorKind::TooShort,
                    "AIC up to order " + std::to_string(p_max) + " needs at least " +
                        std::to_string(2 * p_max + 1) + " observations, got " + std::to_string(n),
                    2 * p_max + 1);
    }
    AicResult res;
    res.aic.reserve(p_max + 1);
    for (std::size_t p = 0; p <= p_max; ++p) {
        const OlsFit fit = fit_ols(series, p);
        if (!(fit.model.sigma2 > kDegenerateQ)) {
            throw Error(ErrorKind::DegenerateFit, "zero residual variance at order " + std::to_string(p));
        }
        res.aic.push_back(std::log(fit.model.sigma2) +
                          2.0 * static_cast<double>(p) / static_cast<double>(n));
        if (res.aic.back() < res.aic[res.chosen_p]) res.chosen_p = p;
    }
    return res;
}

}  // namespace fmatch
