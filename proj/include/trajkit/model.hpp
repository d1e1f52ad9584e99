#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trajkit {

/// Sentinel for a numeric field that has not been observed or derived yet.
inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

inline bool is_set(double x) noexcept { return std::isfinite(x); }

/// Minimum car-following duration kept anywhere in the pipeline, in seconds.
inline constexpr double kMinTrajectoryDurationS = 15.0;

enum class VehicleType : int { HV = 0, AV = 1 };

/// One timestamped GPS sample. Unbound or unparseable numeric fields are NaN.
struct GpsFix {
  double t = kUnset;       // s
  double lat = kUnset;     // deg
  double lon = kUnset;     // deg
  double alt = kUnset;     // m, optional
  double speed = kUnset;   // m/s
  // Source-supplied spacing to the predecessor and acceleration, when the
  // dataset publishes them.
  double spacing = kUnset;
  double acceleration = kUnset;
  // false when the source row was missing/unparseable for this vehicle;
  // stays false after the gap is filled so filled samples remain traceable.
  bool valid = true;

  bool operator==(const GpsFix& o) const;
};

struct VehicleTrack {
  std::string vehicle_id;
  VehicleType vehicle_type = VehicleType::AV;
  double sample_rate_hz = 10.0;
  std::vector<GpsFix> fixes;

  double period() const noexcept { return 1.0 / sample_rate_hz; }
};

/// One row of the uniform car-following schema.
struct UniformFrame {
  std::string traj_id;
  std::int64_t frame_id = 0;
  std::string leader_id;
  VehicleType leader_type = VehicleType::HV;
  double leader_speed = kUnset;
  std::string follower_id;
  VehicleType follower_type = VehicleType::AV;
  double follower_speed = kUnset;
  double follower_acceleration = kUnset;
  double spacing = kUnset;
  double speed_diff = kUnset;
  // Seconds on the source clock. Not part of the CSV schema; rebuilt from
  // the provenance time origin and frame_id on import.
  double t = 0.0;

  bool operator==(const UniformFrame& o) const;
};

struct Provenance {
  std::string dataset;
  std::string source_file;
  std::map<std::string, std::string> parameters;
  double time_origin_s = 0.0;
  std::size_t interpolated_points = 0;
  // Coordinate-derived spacing kept for audit when the source supplied its own.
  std::vector<double> derived_spacing;
  // Speed-difference acceleration kept for audit when the source supplied its own.
  std::vector<double> derived_acceleration;

  bool operator==(const Provenance&) const = default;
};

struct CfTrajectory {
  std::string traj_id;
  double sample_rate_hz = 10.0;
  std::vector<UniformFrame> frames;
  Provenance provenance;

  double duration_s() const noexcept {
    return static_cast<double>(frames.size()) / sample_rate_hz;
  }
};

enum class ViolationKind {
  SpeedDiffMismatch,
  NegativeSpacing,
  UnsetSpacing,
  UnsetAcceleration,
  UnsetSpeed,
  FrameIdNotIncreasing,
  MixedPair,
  TrajIdMismatch,
  NonPositiveRate,
  TooShort,
};

struct Violation {
  ViolationKind kind;
  std::optional<std::int64_t> frame_id;
  double value = 0.0;

  bool operator==(const Violation&) const = default;
};

const char* to_string(ViolationKind kind) noexcept;

/// Tolerance on speed_diff recomputation; covers the 6-decimal CSV quantization.
inline constexpr double kSpeedDiffTolerance = 2e-6;

/// Returns one descriptor per violated invariant; empty means valid.
std::vector<Violation> validate_trajectory(const CfTrajectory& traj);

/// Renumbers frame_id 0..n-1 in place.
void reindex_frames(CfTrajectory& traj);

}  // namespace trajkit
