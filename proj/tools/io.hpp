#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fmatch::cli {

/// Unreadable or malformed input data; maps to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One finite number per line. An optional first line "value" is a header;
/// CRLF endings, surrounding whitespace, a UTF-8 BOM and blank lines are
/// accepted. `source` names the input in error messages.
[[nodiscard]] std::vector<double> parse_series(std::istream& in, std::string_view source);
[[nodiscard]] std::vector<double> read_series(const std::string& path);

/// Text that reads back to the same double ("%.17g").
[[nodiscard]] std::string format_double(double x);

/// Comma-separated reals, e.g. "0.75,-0.5". Empty text gives an empty list.
/// Throws std::invalid_argument naming the bad entry.
[[nodiscard]] std::vector<double> parse_real_list(std::string_view text);

[[nodiscard]] double parse_real(std::string_view text);
[[nodiscard]] unsigned long long parse_count(std::string_view text);

[[nodiscard]] std::string_view trim(std::string_view s);

[[nodiscard]] std::string join_reals(std::span<const double> v, char sep);

void write_series(std::ostream& out, std::span<const double> values);

}  // namespace fmatch::cli
