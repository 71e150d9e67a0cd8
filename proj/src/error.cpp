#include "igci/error.hpp"

namespace igci {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ConstantInput: return "ConstantInput";
        case ErrorCode::SingularCovariance: return "SingularCovariance";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::SupportMismatch: return "SupportMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::AllTied: return "AllTied";
        case ErrorCode::NoValidSpacings: return "NoValidSpacings";
        case ErrorCode::InvalidReference: return "InvalidReference";
        case ErrorCode::NonPositiveTrace: return "NonPositiveTrace";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::SingularFit: return "SingularFit";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SamplingStalled: return "SamplingStalled";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::EmptyManifest: return "EmptyManifest";
    }
    return "Unknown";
}

bool is_numeric_failure(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SingularCovariance:
        case ErrorCode::DomainError:
        case ErrorCode::NonPositiveTrace:
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::SingularFit:
        case ErrorCode::SamplingStalled:
            return true;
        default:
            return false;
    }
}

}  // namespace igci
