#include "mhb/error.hpp"

namespace mhb {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::InvalidReduction: return "InvalidReduction";
        case ErrorCode::IndexOrder: return "IndexOrder";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::RangeError: return "RangeError";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::NegativeMultiplier: return "NegativeMultiplier";
        case ErrorCode::KKTDegeneracy: return "KKTDegeneracy";
        case ErrorCode::OutOfBranch: return "OutOfBranch";
        case ErrorCode::NoRootInBranch: return "NoRootInBranch";
        case ErrorCode::NegativeMu: return "NegativeMu";
        case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::NoFlipInRange: return "NoFlipInRange";
        case ErrorCode::DimensionError: return "DimensionError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::LengthMismatch:
        case ErrorCode::InvalidReduction:
        case ErrorCode::IndexOrder:
        case ErrorCode::InvalidArgument:
        case ErrorCode::EpsilonTooLarge:
        case ErrorCode::DimensionError:
        case ErrorCode::ParseError:
        case ErrorCode::ValidationError:
            return true;
        default:
            return false;
    }
}

}  // namespace mhb
