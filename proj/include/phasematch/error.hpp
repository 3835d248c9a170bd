#pragma once

#include <stdexcept>
#include <string>

namespace phasematch {

// Every failure the library reports, one code per condition so callers
// (and tests) can match on the class of error rather than message text.
enum class Err {
    FileNotFound,
    UnsupportedFormat,
    CorruptHeader,
    IoFailure,
    OutOfBounds,
    SignalTooShort,
    InvalidBankParams,
    DimensionMismatch,
    ShapeMismatch,
    LengthMismatch,
    EmptyDataset,
    VersionMismatch,
    ChecksumMismatch,
    NoValidWindows,
    CannotDerange,
    BadRatios,
    InvalidSynthParams,
    ModelShapeMismatch,
    InsufficientMatches,
    NoConsensus,
    NoKeypoints,
    MissingGroundTruth,
    InvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& what) {
    throw Error(code, what);
}

inline const char* err_name(Err code) {
    switch (code) {
        case Err::FileNotFound: return "FileNotFound";
        case Err::UnsupportedFormat: return "UnsupportedFormat";
        case Err::CorruptHeader: return "CorruptHeader";
        case Err::IoFailure: return "IoFailure";
        case Err::OutOfBounds: return "OutOfBounds";
        case Err::SignalTooShort: return "SignalTooShort";
        case Err::InvalidBankParams: return "InvalidBankParams";
        case Err::DimensionMismatch: return "DimensionMismatch";
        case Err::ShapeMismatch: return "ShapeMismatch";
        case Err::LengthMismatch: return "LengthMismatch";
        case Err::EmptyDataset: return "EmptyDataset";
        case Err::VersionMismatch: return "VersionMismatch";
        case Err::ChecksumMismatch: return "ChecksumMismatch";
        case Err::NoValidWindows: return "NoValidWindows";
        case Err::CannotDerange: return "CannotDerange";
        case Err::BadRatios: return "BadRatios";
        case Err::InvalidSynthParams: return "InvalidSynthParams";
        case Err::ModelShapeMismatch: return "ModelShapeMismatch";
        case Err::InsufficientMatches: return "InsufficientMatches";
        case Err::NoConsensus: return "NoConsensus";
        case Err::NoKeypoints: return "NoKeypoints";
        case Err::MissingGroundTruth: return "MissingGroundTruth";
        case Err::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

// Input errors are bad files/arguments; pipeline errors are legitimate
// runtime outcomes (no keypoints, no consensus, ...). The CLI maps the
// two classes to distinct exit codes.
inline bool is_input_error(Err code) {
    switch (code) {
        case Err::FileNotFound:
        case Err::UnsupportedFormat:
        case Err::CorruptHeader:
        case Err::IoFailure:
        case Err::VersionMismatch:
        case Err::ChecksumMismatch:
        case Err::BadRatios:
        case Err::InvalidSynthParams:
        case Err::InvalidBankParams:
        case Err::InvalidArgument:
        case Err::MissingGroundTruth:
            return true;
        default:
            return false;
    }
}

} // namespace phasematch
