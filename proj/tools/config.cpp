#include "config.hpp"

#include <fstream>
#include <set>
#include <vector>

#include "fmatch/error.hpp"
#include "io.hpp"

namespace fmatch::cli {
namespace {

class SectionReader {
public:
    SectionReader(const IniDocument& doc, std::string name) : name_(std::move(name)) {
        if (auto it = doc.find(name_); it != doc.end()) entries_ = &it->second;
    }

    [[nodiscard]] bool present() const { return entries_ != nullptr; }

    [[nodiscard]] const IniEntry* find(const std::string& key) {
        used_.insert(key);
        if (!entries_) return nullptr;
        auto it = entries_->find(key);
        return it == entries_->end() ? nullptr : &it->second;
    }

    [[nodiscard]] const IniEntry& require(const std::string& key) {
        const IniEntry* e = find(key);
        if (!e) throw ConfigError("[" + name_ + "] missing required key '" + key + "'");
        return *e;
    }

    template <class Parse>
    auto get(const std::string& key, decltype(std::declval<Parse>()(std::string_view{})) fallback, Parse parse) {
        const IniEntry* e = find(key);
        return e ? convert(key, *e, parse) : fallback;
    }

    template <class Parse>
    auto need(const std::string& key, Parse parse) {
        return convert(key, require(key), parse);
    }

    /// Rejects any key that was never asked for.
    void finish() const {
        if (!entries_) return;
        for (const auto& [key, entry] : *entries_) {
            if (!used_.count(key)) {
                throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key + "' in [" +
                                  name_ + "]");
            }
        }
    }

private:
    template <class Parse>
    auto convert(const std::string& key, const IniEntry& e, Parse parse) {
        try {
            return parse(std::string_view(e.value));
        } catch (const std::invalid_argument& ex) {
            throw ConfigError("line " + std::to_string(e.line) + ": [" + name_ + "] " + key + ": " + ex.what());
        }
    }

    std::string name_;
    const std::map<std::string, IniEntry>* entries_ = nullptr;
    std::set<std::string> used_;
};

std::size_t parse_size(std::string_view s) { return static_cast<std::size_t>(parse_count(s)); }

bool parse_bool(std::string_view s) {
    const auto t = trim(s);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(t) + "'");
}

std::string parse_word(std::string_view s) { return std::string(trim(s)); }

std::vector<std::string_view> split_commas(std::string_view text) {
    std::vector<std::string_view> parts;
    if (trim(text).empty()) return parts;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        parts.push_back(trim(text.substr(start, comma == text.npos ? text.npos : comma - start)));
        if (comma == text.npos) break;
        start = comma + 1;
    }
    return parts;
}

std::vector<EstimatorSpec> parse_match_list(std::string_view text) {
    std::vector<EstimatorSpec> out;
    for (auto item : split_commas(text)) {
        const auto colon = item.find(':');
        if (colon == item.npos) throw std::invalid_argument("expected p:m, got '" + std::string(item) + "'");
        out.push_back({EstimatorKind::Match, parse_size(item.substr(0, colon)), parse_size(item.substr(colon + 1))});
    }
    return out;
}

std::vector<EstimatorSpec> parse_ols_list(std::string_view text) {
    std::vector<EstimatorSpec> out;
    for (auto item : split_commas(text)) out.push_back({EstimatorKind::Ols, parse_size(item), 1});
    return out;
}

Innovations read_innovations(SectionReader& truth) {
    Innovations law;
    const std::string kind = truth.get("innovations", std::string("gaussian"), parse_word);
    if (kind == "gaussian") {
        law.kind = InnovationKind::Gaussian;
    } else if (kind == "student_t") {
        law.kind = InnovationKind::StudentT;
    } else {
        throw ConfigError("[truth] innovations must be gaussian or student_t, got '" + kind + "'");
    }
    law.df = truth.get("df", law.df, parse_real);
    return law;
}

}  // namespace

IniDocument parse_ini(std::istream& in, std::string_view source) {
    IniDocument doc;
    std::map<std::string, IniEntry>* current = nullptr;
    std::string current_name;
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        line = trim(line);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            current_name = std::string(trim(line.substr(1, line.size() - 2)));
            if (current_name.empty()) fail("empty section name");
            if (doc.count(current_name)) fail("section [" + current_name + "] appears twice");
            current = &doc[current_name];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == line.npos) fail("expected key = value");
        if (!current) fail("key outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) fail("empty key");
        if (current->count(key)) fail("key '" + key + "' repeated in [" + current_name + "]");
        (*current)[key] = IniEntry{std::string(trim(line.substr(eq + 1))), line_no};
    }
    return doc;
}

ExperimentPlan plan_from_ini(const IniDocument& doc) {
    static const std::set<std::string> known{"truth", "experiment", "estimators", "selection"};
    for (const auto& [name, entries] : doc) {
        if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
    }

    ExperimentPlan plan;
    SectionReader truth(doc, "truth");
    const std::string model = truth.need("model", parse_word);
    if (model == "arma") {
        ArmaSpec spec;
        spec.ar = truth.get("ar", std::vector<double>{}, parse_real_list);
        spec.ma = truth.get("ma", std::vector<double>{}, parse_real_list);
        spec.sigma2 = truth.get("sigma2", 1.0, parse_real);
        plan.truth = spec;
    } else if (model == "tar") {
        TarSpec spec;
        spec.phi_low = truth.need("ar_low", parse_real_list);
        spec.phi_high = truth.need("ar_high", parse_real_list);
        spec.threshold = truth.get("threshold", 0.0, parse_real);
        spec.delay = truth.get("delay", std::size_t{1}, parse_size);
        spec.sigma2 = truth.get("sigma2", 1.0, parse_real);
        plan.truth = spec;
    } else {
        throw ConfigError("[truth] model must be arma or tar, got '" + model + "'");
    }
    plan.innovations = read_innovations(truth);
    truth.finish();

    SectionReader exp(doc, "experiment");
    plan.n = exp.need("n", parse_size);
    plan.replicates = exp.need("replicates", parse_size);
    plan.base_seed = exp.get("seed", 0ULL, parse_count);
    plan.eval_horizon = exp.get("eval_horizon", std::size_t{5}, parse_size);
    exp.finish();

    SectionReader est(doc, "estimators");
    if (!est.present()) throw ConfigError("missing section [estimators]");
    plan.estimators = est.get("match", std::vector<EstimatorSpec>{}, parse_match_list);
    for (auto& e : est.get("ols", std::vector<EstimatorSpec>{}, parse_ols_list)) plan.estimators.push_back(e);
    const bool want_select = est.get("select", false, parse_bool);
    const bool want_aic = est.get("aic", false, parse_bool);
    est.finish();

    SectionReader sel(doc, "selection");
    SelectionSettings settings;
    settings.max_order = sel.get("max_order", settings.max_order, parse_size);
    settings.m = sel.get("steps", settings.m, parse_size);
    settings.replicates = sel.get("bootstrap", settings.replicates, parse_size);
    const std::string bias = sel.get("bias_estimator", std::string("control_variate"), parse_word);
    if (bias != "control_variate" && bias != "plain") {
        throw ConfigError("[selection] bias_estimator must be control_variate or plain, got '" + bias + "'");
    }
    settings.control_variate = bias == "control_variate";
    sel.finish();
    if (want_select) plan.estimators.push_back({EstimatorKind::Select, settings.max_order, settings.m});
    if (want_aic) plan.estimators.push_back({EstimatorKind::Aic, settings.max_order, 1});
    if (want_select || want_aic) plan.selection = settings;

    try {
        validate_plan(plan);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return plan;
}

ExperimentPlan read_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    return plan_from_ini(parse_ini(in, path));
}

}  // namespace fmatch::cli
