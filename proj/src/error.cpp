#include "pulselab/error.hpp"

namespace pulselab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
        case ErrorCode::EmptySignal: return "EmptySignal";
        case ErrorCode::InvalidBand: return "InvalidBand";
        case ErrorCode::SignalTooShort: return "SignalTooShort";
        case ErrorCode::DegenerateWindow: return "DegenerateWindow";
        case ErrorCode::OutOfOrderChunk: return "OutOfOrderChunk";
        case ErrorCode::NonContiguousChunk: return "NonContiguousChunk";
        case ErrorCode::NoValidIbis: return "NoValidIbis";
        case ErrorCode::TooFewIbis: return "TooFewIbis";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ZeroTarget: return "ZeroTarget";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::MissingVerifiedPeaks: return "MissingVerifiedPeaks";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::Format: return "Format";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace pulselab
