#include "trajkit/error.hpp"

namespace trajkit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorCode::NonAdjacentPair: return "NonAdjacentPair";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::UnknownProfile: return "UnknownProfile";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::MisalignedTracks: return "MisalignedTracks";
    case ErrorCode::MissingCoordinates: return "MissingCoordinates";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::AllInvalid: return "AllInvalid";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DelayNotMultipleOfPeriod: return "DelayNotMultipleOfPeriod";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ZeroVarianceTarget: return "ZeroVarianceTarget";
    case ErrorCode::MixedFollowers: return "MixedFollowers";
    case ErrorCode::MixedRates: return "MixedRates";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace trajkit
