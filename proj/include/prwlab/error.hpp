#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace prwlab {

enum class ErrorKind {
    domain,
    grid_mismatch,
    missing_moment,
    not_converged,
    unsupported,
    bracket_failure,
    parse,
    validation,
    io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so the CLI can emit a
/// machine-readable error record.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace prwlab
