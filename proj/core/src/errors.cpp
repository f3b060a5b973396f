#include "mpp/errors.hpp"

namespace mpp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotSpd: return "NotSpd";
        case ErrorCode::IndefiniteMatrix: return "IndefiniteMatrix";
        case ErrorCode::InvalidDf: return "InvalidDf";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidSelector: return "InvalidSelector";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::InsufficientSample: return "InsufficientSample";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::ZeroWealth: return "ZeroWealth";
        case ErrorCode::DegenerateVariance: return "DegenerateVariance";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonMonotoneDates: return "NonMonotoneDates";
        case ErrorCode::RaggedRow: return "RaggedRow";
        case ErrorCode::DateMismatch: return "DateMismatch";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidDf:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidSelector:
        case ErrorCode::TooFewSamples:
            return ErrorCategory::Usage;
        case ErrorCode::InsufficientData:
        case ErrorCode::ParseError:
        case ErrorCode::NonMonotoneDates:
        case ErrorCode::RaggedRow:
        case ErrorCode::DateMismatch:
        case ErrorCode::IoError:
            return ErrorCategory::Data;
        case ErrorCode::NotSpd:
        case ErrorCode::IndefiniteMatrix:
        case ErrorCode::DegenerateSample:
        case ErrorCode::InsufficientSample:
        case ErrorCode::ZeroWealth:
        case ErrorCode::DegenerateVariance:
            return ErrorCategory::Numerical;
    }
    return ErrorCategory::Numerical;
}

void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace mpp
