#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajkit/model.hpp"

namespace trajkit {

enum class Feature { Spacing, FollowerSpeed, SpeedDiff, FollowerAcceleration };

inline constexpr std::array<Feature, 4> kAllFeatures = {
    Feature::Spacing, Feature::FollowerSpeed, Feature::SpeedDiff, Feature::FollowerAcceleration};

std::string_view to_string(Feature f) noexcept;
std::optional<Feature> parse_feature(std::string_view s) noexcept;
double feature_value(const UniformFrame& frame, Feature f) noexcept;

/// Whether a frame is dropped when either vehicle is below the floor, or
/// only when both are.
enum class SpeedFloorMode { Either, Both };
enum class OutlierScope { PerTrajectory, PerDataset };

/// Half-open keep window [start_s, end_s) on the trajectory clock.
struct TimeWindow {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct CleaningConfig {
  double sigma_k = 3.0;
  double speed_floor = 0.1;   // m/s
  double accel_bound = 5.0;   // m/s^2, |a| > bound is dropped
  std::size_t max_gap = 10;   // samples
  double min_duration_s = kMinTrajectoryDurationS;
  std::map<std::string, std::vector<TimeWindow>> trim_windows;
  std::vector<Feature> outlier_features{kAllFeatures.begin(), kAllFeatures.end()};
  SpeedFloorMode speed_floor_mode = SpeedFloorMode::Either;
  OutlierScope outlier_scope = OutlierScope::PerTrajectory;
};

/// Throws InvalidConfig.
void validate_config(const CleaningConfig& cfg);

struct CleaningWarning {
  std::string traj_id;
  std::string code;  // DegenerateStd, DiscardedShortSegment, EmptyOutput
  std::string detail;

  bool operator==(const CleaningWarning&) const = default;
};

struct CleaningReport {
  std::size_t before_total = 0;
  std::size_t after_total = 0;
  std::size_t interpolated_points = 0;
  std::size_t frames_trimmed = 0;
  std::size_t frames_threshold_dropped = 0;
  std::size_t speed_floor_dropped = 0;
  // Frames dropped for acceleration that were not already below the speed floor.
  std::size_t accel_bound_dropped = 0;
  // Frames outside the band per feature; a frame can count under several.
  std::map<Feature, std::size_t> outliers_removed;
  std::size_t outlier_frames_removed = 0;
  std::size_t discarded_segments = 0;
  std::size_t empty_outputs = 0;
  std::vector<CleaningWarning> warnings;

  std::size_t removals() const noexcept {
    return frames_trimmed + frames_threshold_dropped + outlier_frames_removed;
  }
  CleaningReport& operator+=(const CleaningReport& other);
  bool operator==(const CleaningReport&) const = default;
};

struct CleanResult {
  CfTrajectory trajectory;
  CleaningReport report;
};

struct GapFillResult {
  std::vector<VehicleTrack> segments;
  std::size_t interpolated_points = 0;
  std::size_t discarded_segments = 0;
};

/// Fills runs of at most `max_gap` missing or invalid samples between two
/// valid fixes by linear interpolation in time. Longer runs split the track;
/// segments shorter than `min_duration_s` are dropped. Values of valid fixes
/// are never modified. Throws AllInvalid when fewer than two fixes are valid.
GapFillResult interpolate_gaps(const VehicleTrack& track, std::size_t max_gap,
                               double min_duration_s = kMinTrajectoryDurationS);

/// Mean and sample standard deviation of one feature over a frame set.
struct FeatureBand {
  double mean = 0.0;
  double std = 0.0;
  double lower(double k) const noexcept { return mean - k * std; }
  double upper(double k) const noexcept { return mean + k * std; }
};

FeatureBand feature_band(std::span<const CfTrajectory> trajectories, Feature f);

/// Single pass: statistics are computed once on the input frames and every
/// frame with a configured feature outside mean +- k*std is dropped.
/// Throws TooFewSamples with fewer than 2 frames.
CleanResult remove_outliers(const CfTrajectory& traj, const CleaningConfig& cfg);

/// Same, with bands supplied by the caller (used for dataset-wide scope).
CleanResult remove_outliers_with_bands(const CfTrajectory& traj, const CleaningConfig& cfg,
                                       const std::map<Feature, FeatureBand>& bands);

/// Keeps frames inside the windows; no windows keeps everything. Kept runs
/// shorter than `min_duration_s` are discarded and reported.
CleanResult trim_unstable(const CfTrajectory& traj, std::span<const TimeWindow> windows,
                          double min_duration_s = kMinTrajectoryDurationS);

/// Drops frames below the speed floor or with |a| above the bound.
CleanResult apply_threshold_filters(const CfTrajectory& traj, const CleaningConfig& cfg);

/// trim_unstable -> apply_threshold_filters -> remove_outliers, then
/// frame ids renumbered from 0. Gap interpolation happens upstream on the
/// tracks; its count is carried over from provenance. With dataset scope
/// the outlier stage is skipped here (see clean_dataset).
CleanResult clean_pipeline(const CfTrajectory& traj, const CleaningConfig& cfg);

struct DatasetCleanResult {
  std::vector<CfTrajectory> trajectories;  // empty outputs are removed
  CleaningReport report;
};

/// Runs clean_pipeline over a set of trajectories, honoring the outlier scope.
DatasetCleanResult clean_dataset(std::span<const CfTrajectory> trajectories,
                                 const CleaningConfig& cfg);

}  // namespace trajkit
