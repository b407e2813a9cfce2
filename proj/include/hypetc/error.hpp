#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypetc {

/// Failure categories surfaced by the library and the CLI.
enum class ErrorCode {
    InvalidArgument,
    InvalidCoefficients,
    NonConvergence,
    GridMismatch,
    CflViolation,
    MuOutOfRange,
    AssumptionViolated,
    DtTooCoarse,
    VarrhoNotPositive,
    MuBarNonpositive,
    NonNegativeM,
    SupercriticalFlow,
    SlopeMismatch,
    GateSubmerged,
    OutputDirUnwritable,
    ConfigMismatch,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hypetc
