#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpp {

enum class ErrorCode {
    NotSpd,
    IndefiniteMatrix,
    InvalidDf,
    InvalidArgument,
    InvalidSelector,
    DegenerateSample,
    InsufficientSample,
    InsufficientData,
    ZeroWealth,
    DegenerateVariance,
    TooFewSamples,
    ParseError,
    NonMonotoneDates,
    RaggedRow,
    DateMismatch,
    IoError,
};

/// Coarse grouping used by the CLI exit-code contract.
enum class ErrorCategory { Usage, Data, Numerical };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace mpp
