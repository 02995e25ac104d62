#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "fmatch/error.hpp"
#include "fmatch/estimator.hpp"
#include "fmatch/selection.hpp"
#include "fmatch/simulation.hpp"
#include "io.hpp"
#include "report.hpp"

namespace fmatch::cli {
namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SeriesOptions {
    std::string input;
    bool center = false;
    std::string output;
    std::string format = "json";
};

struct FitOptions {
    SeriesOptions io;
    std::size_t order = 0;
    std::size_t steps = 1;
};

struct SelectOptions {
    SeriesOptions io;
    std::size_t max_order = 0;
    std::size_t steps = 1;
    std::size_t bootstrap = 0;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string bias_estimator = "control_variate";
};

struct SimulateOptions {
    std::string model;
    std::string ar;
    std::string ma;
    std::string ar_low;
    std::string ar_high;
    double threshold = 0.0;
    std::size_t delay = 1;
    double sigma2 = 1.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::optional<std::size_t> burnin;
    std::string innovations = "gaussian";
    double df = 5.0;
    std::string output;
};

struct ExperimentOptions {
    std::string config;
    int jobs = 1;
    std::string output;
};

void add_series_options(CLI::App* cmd, SeriesOptions& o) {
    cmd->add_option("--input", o.input, "Series file, one number per line")->required();
    cmd->add_flag("--center", o.center, "Subtract the sample mean before fitting");
    cmd->add_option("--output", o.output, "Output file (default: standard output)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

struct LoadedSeries {
    SeriesSample sample;
    std::optional<double> centered_mean;
};

LoadedSeries load_series(const SeriesOptions& o) {
    std::vector<double> y = read_series(o.input);
    std::optional<double> mean;
    if (o.center) {
        mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        for (double& v : y) v -= *mean;
    }
    return {SeriesSample(std::move(y)), mean};
}

/// Writes the whole payload at once so a failure leaves no partial file.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    f << text;
    f.close();
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<double> coefficient_list(const std::string& flag, const std::string& text) {
    try {
        return parse_real_list(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

int cmd_fit(const FitOptions& o, std::ostream& out) {
    const LoadedSeries data = load_series(o.io);
    const FitResult fit = fit_match(data.sample, o.order, o.steps);
    std::ostringstream text;
    if (o.io.format == "json") {
        text << fit_json(fit, data.centered_mean).dump(2) << '\n';
    } else {
        write_fit_csv(text, fit, data.centered_mean);
    }
    emit(o.io.output, text.str(), out);
    return kExitOk;
}

int cmd_select(const SelectOptions& o, std::ostream& out) {
    const LoadedSeries data = load_series(o.io);
    BootstrapOptions opts;
    opts.replicates = o.bootstrap;
    opts.seed = o.seed;
    opts.jobs = o.jobs;
    opts.control_variate = o.bias_estimator == "control_variate";

    SelectionReport rep;
    rep.result = select_order(data.sample, o.max_order, o.steps, opts);
    rep.max_order = o.max_order;
    rep.seed = o.seed;
    rep.control_variate = opts.control_variate;
    rep.centered_mean = data.centered_mean;
    if (data.sample.size() >= 2 * o.max_order + 1) rep.aic = aic_baseline(data.sample, o.max_order);

    std::ostringstream text;
    if (o.io.format == "json") {
        text << selection_json(rep).dump(2) << '\n';
    } else {
        write_selection_csv(text, rep);
    }
    emit(o.io.output, text.str(), out);
    return kExitOk;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    Innovations law;
    law.kind = o.innovations == "student_t" ? InnovationKind::StudentT : InnovationKind::Gaussian;
    law.df = o.df;
    if (law.kind == InnovationKind::StudentT && !(law.df > 2.0)) throw UsageError("--df must exceed 2");
    if (!(o.sigma2 > 0.0)) throw UsageError("--sigma2 must be positive");

    std::vector<double> y;
    if (o.model == "arma") {
        if (!o.ar_low.empty() || !o.ar_high.empty()) throw UsageError("--ar-low/--ar-high apply to --model tar only");
        ArmaSpec spec{coefficient_list("--ar", o.ar), coefficient_list("--ma", o.ma), o.sigma2};
        if (!is_stationary(spec.ar)) throw UsageError("--ar is outside the stationary region");
        y = simulate_arma(spec, o.n, o.seed, o.burnin.value_or(kArmaBurnin), law);
    } else {
        if (!o.ar.empty() || !o.ma.empty()) throw UsageError("--ar/--ma apply to --model arma only");
        TarSpec spec;
        spec.phi_low = coefficient_list("--ar-low", o.ar_low);
        spec.phi_high = coefficient_list("--ar-high", o.ar_high);
        spec.threshold = o.threshold;
        spec.delay = o.delay;
        spec.sigma2 = o.sigma2;
        if (!is_stationary(spec.phi_low) || !is_stationary(spec.phi_high)) {
            throw UsageError("a TAR regime is outside the stationary region");
        }
        y = simulate_tar(spec, o.n, o.seed, o.burnin.value_or(kTarBurnin), law);
    }
    std::ostringstream text;
    write_series(text, y);
    emit(o.output, text.str(), out);
    return kExitOk;
}

int cmd_experiment(const ExperimentOptions& o) {
    ExperimentPlan plan;
    try {
        plan = read_experiment_config(o.config);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    const ExperimentReport rep = run_experiment(plan, o.jobs);

    const std::filesystem::path dir(o.output);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + o.output + "': " + ec.message());
    std::ostringstream csv;
    write_experiment_csv(csv, rep);
    emit((dir / "report.csv").string(), csv.str(), std::cout);
    emit((dir / "summary.json").string(), experiment_summary_json(plan, rep).dump(2) + "\n", std::cout);
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Autoregressive fitting by multi-step prediction-error matching", "fmatch"};
    app.require_subcommand(1, 1);
    const auto positive = CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max());
    const auto job_range = CLI::Range(1, 1024);

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit AR(p) by minimizing up-to-m-step prediction errors");
    add_series_options(fit_cmd, fit.io);
    fit_cmd->add_option("--order", fit.order, "AR order p")->required();
    fit_cmd->add_option("--steps", fit.steps, "Maximal horizon m")->required()->check(positive);

    SelectOptions sel;
    auto* sel_cmd = app.add_subcommand("select", "Choose the AR order by the bootstrap-penalized log loss");
    add_series_options(sel_cmd, sel.io);
    sel_cmd->add_option("--max-order", sel.max_order, "Largest order considered")->required();
    sel_cmd->add_option("--steps", sel.steps, "Maximal horizon m")->required()->check(positive);
    sel_cmd->add_option("--bootstrap", sel.bootstrap, "Bootstrap replicates B")->required()->check(positive);
    sel_cmd->add_option("--seed", sel.seed, "Bootstrap seed")->required();
    sel_cmd->add_option("--jobs", sel.jobs, "Worker threads")->check(job_range)->capture_default_str();
    sel_cmd->add_option("--bias-estimator", sel.bias_estimator, "Bootstrap bias estimator")
        ->check(CLI::IsMember({"control_variate", "plain"}))
        ->capture_default_str();

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate an ARMA or threshold-AR series");
    sim_cmd->add_option("--model", sim.model, "Generator")->required()->check(CLI::IsMember({"arma", "tar"}));
    sim_cmd->add_option("--ar", sim.ar, "AR coefficients, comma-separated");
    sim_cmd->add_option("--ma", sim.ma, "MA coefficients, comma-separated");
    sim_cmd->add_option("--ar-low", sim.ar_low, "TAR lower-regime coefficients");
    sim_cmd->add_option("--ar-high", sim.ar_high, "TAR upper-regime coefficients");
    sim_cmd->add_option("--threshold", sim.threshold, "TAR threshold on y_{t-d}")->capture_default_str();
    sim_cmd->add_option("--delay", sim.delay, "TAR delay d")->check(positive)->capture_default_str();
    sim_cmd->add_option("--sigma2", sim.sigma2, "Innovation variance")->capture_default_str();
    sim_cmd->add_option("--n", sim.n, "Series length")->required()->check(positive);
    sim_cmd->add_option("--seed", sim.seed, "Seed")->capture_default_str();
    sim_cmd->add_option("--burnin", sim.burnin, "Discarded warm-up steps (arma 200, tar 500)");
    sim_cmd->add_option("--innovations", sim.innovations, "Innovation law")
        ->check(CLI::IsMember({"gaussian", "student_t"}))
        ->capture_default_str();
    sim_cmd->add_option("--df", sim.df, "Student-t degrees of freedom")->capture_default_str();
    sim_cmd->add_option("--output", sim.output, "Output file (default: standard output)");

    ExperimentOptions exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a replicated estimator comparison");
    exp_cmd->add_option("--config", exp.config, "INI experiment plan")->required();
    exp_cmd->add_option("--jobs", exp.jobs, "Worker threads")->check(job_range)->capture_default_str();
    exp_cmd->add_option("--output", exp.output, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit, out);
        if (sel_cmd->parsed()) return cmd_select(sel, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim, out);
        return cmd_experiment(exp);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace fmatch::cli
