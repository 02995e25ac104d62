#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fmatch {

enum class ErrorKind {
    SingularToeplitz,
    InsufficientLags,
    NonStationary,
    TooShort,
    SingularDesign,
    DegenerateFit,
    NoConvergence,
    InvalidArgument,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. `required()` carries the numeric
/// hint attached to some kinds: the minimal series length for TooShort, the
/// largest feasible order for an order-range TooShort, the lag count needed
/// for InsufficientLags.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> required = std::nullopt);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<std::size_t> required() const noexcept { return required_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> required_;
};

}  // namespace fmatch
