#pragma once

#include <ostream>

namespace fmatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for `fmatch fit|select|simulate|experiment`. Results go to
/// `out` unless --output is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fmatch::cli
