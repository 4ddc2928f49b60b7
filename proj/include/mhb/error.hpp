#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mhb {

/// Stable error codes shared by the library and the CLI.
enum class ErrorCode {
    LengthMismatch,
    InvalidReduction,
    IndexOrder,
    InvalidArgument,
    DomainError,
    RangeError,
    NoBracket,
    EpsilonTooLarge,
    Infeasible,
    Unbounded,
    NegativeMultiplier,
    KKTDegeneracy,
    OutOfBranch,
    NoRootInBranch,
    NegativeMu,
    NoFeasiblePoint,
    GridTooCoarse,
    NoFlipInRange,
    DimensionError,
    ParseError,
    ValidationError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes caused by bad input rather than a solver failure.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace mhb
