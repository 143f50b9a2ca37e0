#pragma once

#include <stdexcept>
#include <string>

namespace prepbench {

enum class ErrorCode {
    // image I/O
    MalformedHeader,
    UnsupportedMaxval,
    TruncatedPayload,
    WrongChannelCount,
    // transforms
    NonPositiveGain,
    NonPositiveParam,
    InvalidControlPoints,
    InvalidRange,
    EvenWindow,
    EmptyReference,
    // filters
    EvenKernel,
    NegativeNoiseVar,
    InvalidVarianceBand,
    OddDimensions,
    // normalize
    TooFewSamples,
    EigenNoConvergence,
    DimensionMismatch,
    // vocdata
    MalformedXml,
    MissingField,
    InvalidBox,
    MissingImage,
    UnreadableImage,
    InvalidFraction,
    // bench
    SingleClass,
    NonPositiveLambda,
    // autotune
    EmptySpace,
    // pipeline
    UnknownOp,
    BadParam,
    MalformedJson,
    ChannelMismatch,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace prepbench
