#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trajkit {

enum class ErrorCode {
  // ingest
  MissingColumn,
  EmptyFile,
  NonMonotoneTime,
  NonAdjacentPair,
  InsufficientOverlap,
  UnknownProfile,
  InvalidProfile,
  MissingInput,
  // kinematics
  MisalignedTracks,
  MissingCoordinates,
  TooFewSamples,
  // clean
  AllInvalid,
  InvalidConfig,
  // calibrate
  DelayNotMultipleOfPeriod,
  TooFewFrames,
  RankDeficient,
  ZeroVarianceTarget,
  MixedFollowers,
  MixedRates,
  NonFiniteSample,
  // stats
  EmptyInput,
  // io
  SchemaMismatch,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; `what()` holds the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trajkit
