#pragma once

#include <stdexcept>
#include <string>

namespace hfsub {

enum class ErrorCode {
    SeriesTooShort,
    EmptySeries,
    LengthMismatch,
    NegativePower,
    InvalidTruncation,
    NonPurePowers,
    DomainError,
    WindowTooLarge,
    QuadratureFailure,
    TooFewSubsamples,
    SubsampleTooSmall,
    BlockTooSmall,
    InsufficientData,
    ZeroBlocks,
    NonPositiveVariance,
    NonPositiveEstimate,
    NotSquare,
    InvalidLevel,
    InvalidConfig,
    MissingSigmaPath,
    ParseError,
    NonPositivePrice,
    NonMonotoneTime,
    TooFewSamples,
};

/// Library-wide exception carrying a machine-checkable code.
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

} // namespace hfsub
