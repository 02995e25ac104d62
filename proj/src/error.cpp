#include "fmatch/error.hpp"

namespace fmatch {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::SingularToeplitz: return "SingularToeplitz";
    case ErrorKind::InsufficientLags: return "InsufficientLags";
    case ErrorKind::NonStationary: return "NonStationary";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> required)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      required_(required) {}

}  // namespace fmatch
