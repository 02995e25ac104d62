#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace fmatch::cli {
namespace {

bool parse_finite(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end && !text.empty() && std::isfinite(out);
}

}  // namespace

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<double> parse_series(std::istream& in, std::string_view source) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (line_no == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
        text = trim(text);
        if (text.empty()) continue;
        if (!seen_content && text == "value") {
            seen_content = true;
            continue;
        }
        seen_content = true;
        double v = 0.0;
        if (!parse_finite(text, v)) {
            throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": not a finite number: '" +
                             std::string(text) + "'");
        }
        values.push_back(v);
    }
    if (in.bad()) throw InputError(std::string(source) + ": read error");
    if (values.empty()) throw InputError(std::string(source) + ": no values");
    return values;
}

std::vector<double> read_series(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    return parse_series(in, path);
}

std::string format_double(double x) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    return {buf, static_cast<std::size_t>(len)};
}

double parse_real(std::string_view text) {
    double v = 0.0;
    const auto t = trim(text);
    if (!parse_finite(t, v)) throw std::invalid_argument("not a finite number: '" + std::string(t) + "'");
    return v;
}

unsigned long long parse_count(std::string_view text) {
    const auto t = trim(text);
    unsigned long long v = 0;
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end) {
        throw std::invalid_argument("not a non-negative integer: '" + std::string(t) + "'");
    }
    return v;
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        out.push_back(parse_real(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join_reals(std::span<const double> v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += sep;
        out += format_double(v[i]);
    }
    return out;
}

void write_series(std::ostream& out, std::span<const double> values) {
    for (double v : values) out << format_double(v) << '\n';
}

}  // namespace fmatch::cli
