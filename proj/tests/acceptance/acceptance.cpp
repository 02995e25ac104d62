// Acceptance checks 1-8. Prints one PASS/FAIL line per check and exits
// nonzero when any check fails.
// Usage: acceptance <path-to-fmatch-binary> [check numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fmatch/acvf.hpp"
#include "fmatch/estimator.hpp"
#include "fmatch/experiment.hpp"
#include "fmatch/loss.hpp"
#include "fmatch/predictor.hpp"
#include "fmatch/rng.hpp"
#include "fmatch/selection.hpp"
#include "fmatch/simulation.hpp"

using namespace fmatch;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<double> random_stationary(CounterRng& rng, std::size_t p, double bound = 0.95) {
    std::vector<double> r(p);
    for (double& v : r) v = bound * (2.0 * rng.uniform() - 1.0);
    return pacf_to_ar(r);
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Verdict predictor_duality() {
    CounterRng rng(0xD0A1);
    double worst = 0.0;
    std::size_t pairs = 0;
    for (int model = 0; model < 1000; ++model) {
        const std::size_t p = 1 + rng.below(6);
        const ArParams m{random_stationary(rng, p), 1.0};
        const auto truth = ar_acvf(m, p + 10);
        for (std::size_t k = 1; k <= 10; ++k) {
            const auto a = predictor_from_model(m, k).alpha;
            const auto b = predictor_from_acvf(truth, p, k).alpha;
            std::vector<double> d(p);
            for (std::size_t i = 0; i < p; ++i) d[i] = a[i] - b[i];
            worst = std::max(worst, max_abs(d) / std::max(max_abs(a), 1e-300));
            ++pairs;
        }
    }
    return {worst < 1e-8, "max relative error " + fmt("%.2e", worst) + " over " + std::to_string(pairs) +
                              " (model, horizon) pairs, limit 1e-8"};
}

Verdict one_step_reduction() {
    double worst = 0.0;
    int compared = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        const SeriesSample s(simulate_arma(ArmaSpec{{0.75, -0.5}, {}, 1.0}, 300, mix_seed(0xA2, r)));
        const auto ols = fit_ols(s, 2);
        if (!ols.stationary) continue;
        ++compared;
        const auto fit = fit_match(s, 2, 1);
        for (std::size_t i = 0; i < 2; ++i) worst = std::max(worst, std::abs(fit.model.phi[i] - ols.model.phi[i]));
    }
    return {worst < 1e-5, "max |phi_match - phi_ols| " + fmt("%.2e", worst) + " on " + std::to_string(compared) +
                              "/100 datasets with stationary OLS, limit 1e-5"};
}

Verdict gradient_check() {
    CounterRng rng(0x6AD);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t p = 1 + rng.below(4);
        const std::size_t m = 1 + rng.below(5);
        const std::size_t n = 30 + rng.below(200);
        std::vector<double> y(n);
        for (double& v : y) v = rng.normal();
        const SeriesSample s(y);
        const auto phi = random_stationary(rng, p, 0.9);
        const auto grad = empirical_q_gradient(s, phi, m);
        std::vector<double> fd(p);
        for (std::size_t j = 0; j < p; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(phi[j]));
            auto up = phi;
            auto dn = phi;
            up[j] += h;
            dn[j] -= h;
            fd[j] = (empirical_q(s, up, m) - empirical_q(s, dn, m)) / (2.0 * h);
        }
        std::vector<double> d(p);
        for (std::size_t j = 0; j < p; ++j) d[j] = grad[j] - fd[j];
        worst = std::max(worst, max_abs(d) / std::max(max_abs(fd), 1e-300));
    }
    return {worst < 1e-5, "max relative error " + fmt("%.2e", worst) + " over 200 instances, limit 1e-5"};
}

Verdict ideal_monotonicity() {
    const std::vector<std::pair<std::string, AcvfSeq>> truths{
        {"MA(1)", arma_acvf(ArmaSpec{{}, {0.5}, 1.0}, 16)},
        {"ARMA(1,1)", arma_acvf(ArmaSpec{{0.8}, {-0.5}, 1.0}, 16)}};
    double worst_rise = 0.0;
    double worst_rel = 0.0;
    int approx_checked = 0;
    for (const auto& [name, truth] : truths) {
        for (std::size_t m = 1; m <= 5; ++m) {
            const auto path = fit_ideal_path(truth, 5, m);
            for (std::size_t p = 0; p < 5; ++p) {
                worst_rise = std::max(worst_rise, path[p + 1].q_star - path[p].q_star);
                const double lhs = std::log(path[p].q_star) - std::log(path[p + 1].q_star);
                const double rhs = (path[p].q_star - path[p + 1].q_star) / path[p + 1].q_star;
                if (lhs < 0.05 && lhs > 1e-12) {
                    ++approx_checked;
                    worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / lhs);
                }
            }
        }
    }
    return {worst_rise <= 1e-9 && worst_rel <= 0.1,
            "largest increase " + fmt("%.2e", worst_rise) + " (limit 1e-9); relative-decrease error " +
                fmt("%.4f", worst_rel) + " on " + std::to_string(approx_checked) + " small decreases (limit 0.1)"};
}

double population_q_mc_check() {
    // population_q against a 1e6-step simulation, scored in standard errors
    const ArmaSpec truth{{0.8}, {-0.5}, 1.0};
    const std::vector<double> phi{0.6};
    const std::size_t m = 5;
    const std::size_t n = 1000000;
    const auto y = simulate_arma(truth, n + m, 0x10C);
    std::vector<double> loss(n);
    for (std::size_t t = 0; t < n; ++t) {
        double s = 0.0;
        double a = 1.0;
        for (std::size_t k = 1; k <= m; ++k) {
            a *= phi[0];
            const double e = y[t + k] - a * y[t];
            s += e * e;
        }
        loss[t] = s / static_cast<double>(m);
    }
    const std::size_t batches = 200;
    const std::size_t len = n / batches;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        for (std::size_t i = 0; i < len; ++i) means[b] += loss[b * len + i];
        means[b] /= static_cast<double>(len);
    }
    double mean = 0.0;
    for (double v : means) mean += v / batches;
    double var = 0.0;
    for (double v : means) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (batches - 1.0) / batches);
    return std::abs(mean - population_q(arma_acvf(truth, 6), phi, m)) / se;
}

Verdict headline_experiment() {
    const double z = population_q_mc_check();
    ExperimentPlan plan;
    plan.truth = ArmaSpec{{0.8}, {-0.5}, 1.0};
    plan.n = 400;
    plan.replicates = 200;
    plan.base_seed = 2024;
    plan.eval_horizon = 5;
    plan.estimators = {{EstimatorKind::Match, 1, 1}, {EstimatorKind::Match, 1, 5}};
    const auto rep = run_experiment(plan, 4);
    const double m5_wins = 1.0 - rep.win_rates[0].rate;
    const double mean1 = rep.summary[0].mean;
    const double mean5 = rep.summary[1].mean;
    return {m5_wins >= 0.70 && mean5 < mean1 && z < 3.0 && rep.failures.empty(),
            "m=5 wins " + fmt("%.1f%%", 100.0 * m5_wins) + " of " + std::to_string(rep.summary[0].count) +
                " replicates (limit 70%), mean score m=1 " + fmt("%.5f", mean1) + " vs m=5 " + fmt("%.5f", mean5) +
                "; population_q oracle within " + fmt("%.2f", z) + " SE (limit 3)"};
}

Verdict selection_sanity() {
    struct Truth {
        ArmaSpec spec;
        std::size_t target;
    };
    const std::vector<Truth> truths{{ArmaSpec{{0.75, -0.5}, {}, 1.0}, 2}, {ArmaSpec{{}, {}, 1.0}, 0}};
    std::vector<std::map<std::size_t, int>> chosen(2);
    std::vector<int> aic_hits(2, 0);
    for (std::size_t t = 0; t < truths.size(); ++t) {
        for (std::uint64_t r = 0; r < 100; ++r) {
            const SeriesSample s(simulate_arma(truths[t].spec, 500, mix_seed(0x5e1ec7 + t, r)));
            BootstrapOptions opts;
            opts.replicates = 100;
            opts.seed = mix_seed(0xb007 + t, r);
            opts.jobs = 4;
            ++chosen[t][select_order(s, 6, 1, opts).chosen_p];
            aic_hits[t] += aic_baseline(s, 6).chosen_p == truths[t].target;
        }
    }
    auto mode = [](const std::map<std::size_t, int>& c) {
        return std::max_element(c.begin(), c.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
    };
    const std::size_t ar2_mode = mode(chosen[0]);
    const int ar2_hits = chosen[0][2];
    const int wn_hits = chosen[1][0];
    return {ar2_mode == 2 && ar2_hits >= 60 && wn_hits >= 70,
            "AR(2): modal order " + std::to_string(ar2_mode) + ", p=2 in " + std::to_string(ar2_hits) +
                "% (limit 60%); white noise: p=0 in " + std::to_string(wn_hits) + "% (limit 70%); AIC for reference " +
                std::to_string(aic_hits[0]) + "% and " + std::to_string(aic_hits[1]) + "%"};
}

Verdict bias_calibration() {
    const ArmaSpec truth{{0.5}, {}, 1.0};
    const auto gamma = ar_acvf(ArParams{truth.ar, 1.0}, 2);
    double sum = 0.0;
    for (std::uint64_t r = 0; r < 2000; ++r) {
        const SeriesSample s(simulate_arma(truth, 500, mix_seed(99, r)));
        const auto fit = fit_match(s, 1, 1);
        sum += std::log(population_q(gamma, fit.model, 1)) - std::log(fit.q_value);
    }
    const double c = sum / 2000.0;
    int inside = 0;
    double lo = 1e300;
    double hi = -1e300;
    for (std::uint64_t d = 0; d < 10; ++d) {
        const SeriesSample s(simulate_arma(truth, 500, mix_seed(7, d)));
        BootstrapOptions opts;
        opts.replicates = 200;
        opts.seed = mix_seed(11, d);
        opts.jobs = 4;
        const double est = bootstrap_bias(s, 1, 1, opts).bias;
        inside += est > 0.3 * c && est < 3.0 * c;
        lo = std::min(lo, est);
        hi = std::max(hi, est);
    }
    return {c > 0.0 && inside == 10,
            "Monte-Carlo c = " + fmt("%.5f", c) + "; bootstrap estimates on 10 datasets span [" + fmt("%.5f", lo) +
                ", " + fmt("%.5f", hi) + "], " + std::to_string(inside) + "/10 inside (0.3c, 3c)"};
}

std::string run_capture(const std::string& cmd) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return "<popen failed>";
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    return out + "\n<status " + std::to_string(status) + ">";
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Verdict cli_determinism(const std::string& exe) {
    const fs::path dir = fs::temp_directory_path() / "fmatch_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string bin = "\"" + exe + "\"";
    const std::string data = (dir / "data.txt").string();
    {
        std::ofstream cfg(dir / "plan.ini");
        cfg << "[truth]\nmodel = arma\nar = 0.8\nma = -0.5\n\n[experiment]\nn = 300\nreplicates = 8\nseed = 5\n\n"
               "[estimators]\nmatch = 1:1, 2:5\nols = 2\nselect = true\naic = true\n\n"
               "[selection]\nmax_order = 3\nsteps = 2\nbootstrap = 20\n";
    }
    std::vector<std::string> mismatched;
    std::size_t compared = 0;
    // command captures end with "<status N>"; a failing command never counts as reproducible
    auto same = [&](const std::string& label, const std::string& a, const std::string& b) {
        ++compared;
        if (a != b || a.empty()) mismatched.push_back(label);
    };
    auto same_run = [&](const std::string& label, const std::string& a, const std::string& b) {
        same(label, a, b);
        if (a.find("<status 0>") == std::string::npos) mismatched.push_back(label + " exit status");
    };

    const std::string sim = bin + " simulate --model arma --ar 0.75,-0.5 --ma 0.3 --n 400 --seed 9";
    same_run("simulate", run_capture(sim), run_capture(sim));
    run_capture(sim + " --output \"" + data + "\"");
    const std::string tar = bin + " simulate --model tar --ar-low 0.9 --ar-high -0.5 --n 200 --seed 4 "
                                  "--innovations student_t --df 5";
    same_run("simulate tar", run_capture(tar), run_capture(tar));
    for (const char* fmtflag : {"json", "csv"}) {
        const std::string fit = bin + " fit --input \"" + data + "\" --order 2 --steps 3 --center --format " + fmtflag;
        same_run(std::string("fit ") + fmtflag, run_capture(fit), run_capture(fit));
        const std::string sel = bin + " select --input \"" + data + "\" --max-order 4 --steps 2 --bootstrap 30 "
                                      "--seed 17 --format " + fmtflag;
        const std::string base = run_capture(sel + " --jobs 1");
        for (int jobs : {1, 2, 4, 8}) {
            same_run(std::string("select ") + fmtflag + " jobs " + std::to_string(jobs), base,
                 run_capture(sel + " --jobs " + std::to_string(jobs)));
        }
    }
    std::string reference_csv;
    std::string reference_json;
    for (int jobs : {1, 8}) {
        const fs::path out = dir / ("exp" + std::to_string(jobs));
        const std::string status = run_capture(bin + " experiment --config \"" + (dir / "plan.ini").string() +
                                               "\" --output \"" + out.string() + "\" --jobs " + std::to_string(jobs));
        const std::string csv = slurp(out / "report.csv");
        const std::string json = slurp(out / "summary.json");
        if (jobs == 1) {
            reference_csv = csv;
            reference_json = json;
            if (status.find("<status 0>") == std::string::npos) mismatched.push_back("experiment exit status");
        } else {
            same("experiment report.csv jobs 8", reference_csv, csv);
            same("experiment summary.json jobs 8", reference_json, json);
        }
    }
    if (mismatched.empty()) fs::remove_all(dir);
    std::string detail = std::to_string(compared) + " output comparisons";
    if (mismatched.empty()) return {true, detail + ", all byte-identical"};
    detail += "; differing:";
    for (const auto& m : mismatched) detail += " [" + m + "]";
    return {false, detail};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <fmatch-binary>\n", argv[0]);
        return 2;
    }
    const std::string exe = argv[1];
    struct Check {
        int id;
        const char* name;
        double budget_s;
        std::function<Verdict()> run;
    };
    const std::vector<Check> checks{
        {1, "predictor duality", 5.0, predictor_duality},
        {2, "m=1 reduces to OLS", 30.0, one_step_reduction},
        {3, "gradient vs finite differences", 10.0, gradient_check},
        {4, "ideal-world monotonicity", 10.0, ideal_monotonicity},
        {5, "multi-step advantage under misspecification", 180.0, headline_experiment},
        {6, "order selection sanity", 600.0, selection_sanity},
        {7, "bootstrap bias calibration", 300.0, bias_calibration},
        {8, "CLI determinism", 60.0, [&] { return cli_determinism(exe); }},
    };
    // optional trailing arguments select a subset of checks by number
    std::vector<int> only;
    for (int i = 2; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : checks) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = v.pass && in_time;
        failures += !pass;
        std::printf("%s [%d] %s: %s (%.1f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    v.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
