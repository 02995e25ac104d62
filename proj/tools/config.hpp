#pragma once

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fmatch/experiment.hpp"

namespace fmatch::cli {

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IniEntry {
    std::string value;
    std::size_t line = 0;
};

/// section -> key -> entry
using IniDocument = std::map<std::string, std::map<std::string, IniEntry>>;

/// Parse rules:
///  - whitespace around every line, section name, key and value is trimmed
///  - blank lines and lines whose first character is '#' or ';' are skipped
///  - "[name]" opens a section; a section may appear only once
///  - "key = value" splits at the first '='; the value may be empty
///  - keys outside a section and repeated keys are errors
[[nodiscard]] IniDocument parse_ini(std::istream& in, std::string_view source);

/// Builds and validates an experiment plan. Unknown sections or keys,
/// missing required keys and infeasible settings throw ConfigError.
[[nodiscard]] ExperimentPlan plan_from_ini(const IniDocument& doc);

[[nodiscard]] ExperimentPlan read_experiment_config(const std::string& path);

}  // namespace fmatch::cli
