#include "prepbench/error.hpp"

namespace prepbench {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::WrongChannelCount: return "WrongChannelCount";
    case ErrorCode::NonPositiveGain: return "NonPositiveGain";
    case ErrorCode::NonPositiveParam: return "NonPositiveParam";
    case ErrorCode::InvalidControlPoints: return "InvalidControlPoints";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::EvenWindow: return "EvenWindow";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::EvenKernel: return "EvenKernel";
    case ErrorCode::NegativeNoiseVar: return "NegativeNoiseVar";
    case ErrorCode::InvalidVarianceBand: return "InvalidVarianceBand";
    case ErrorCode::OddDimensions: return "OddDimensions";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EigenNoConvergence: return "EigenNoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::InvalidBox: return "InvalidBox";
    case ErrorCode::MissingImage: return "MissingImage";
    case ErrorCode::UnreadableImage: return "UnreadableImage";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::UnknownOp: return "UnknownOp";
    case ErrorCode::BadParam: return "BadParam";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    }
    return "UnknownError";
}

} // namespace prepbench
