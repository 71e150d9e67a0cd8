#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace igci {

enum class ErrorCode {
    ConstantInput,
    SingularCovariance,
    DomainError,
    SupportMismatch,
    InvalidArgument,
    AllTied,
    NoValidSpacings,
    InvalidReference,
    NonPositiveTrace,
    NotPositiveDefinite,
    SingularFit,
    DimensionMismatch,
    SamplingStalled,
    ParseError,
    TooFewRows,
    EmptyManifest,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Numeric failures (as opposed to bad input data) map to a distinct CLI exit code.
[[nodiscard]] bool is_numeric_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace igci
