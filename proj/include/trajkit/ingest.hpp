#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajkit/model.hpp"

namespace trajkit {

enum class DatasetName { OpenAcc, Vanderbilt, Cats, Custom };
enum class Layout { WideMultiVehicle, PairedTwoVehicle, PerVehicleFiles };
enum class Field { Time, Lat, Lon, Alt, Speed, Spacing, Acceleration };

std::string_view to_string(DatasetName name) noexcept;
std::string_view to_string(Layout layout) noexcept;
std::string_view to_string(Field field) noexcept;
std::optional<DatasetName> parse_dataset_name(std::string_view s) noexcept;
std::optional<Layout> parse_layout(std::string_view s) noexcept;
std::optional<Field> parse_field(std::string_view s) noexcept;

using ColumnMap = std::map<Field, std::string>;

/// One vehicle's column bindings. A `spacing` binding means the gap to the
/// vehicle directly ahead of this one.
struct VehicleSlot {
  std::string vehicle_id;
  VehicleType type = VehicleType::AV;
  ColumnMap columns;
};

/// Column bindings generated per vehicle. `{i}` expands to the 1-based slot
/// index and `{p}` to i-1; bindings that mention `{p}` are skipped for the
/// first slot. For wide layouts slots are generated while the expanded
/// speed column exists in the header; for per-vehicle files one slot is
/// generated per file.
struct SlotTemplate {
  ColumnMap columns;
  std::string id_pattern = "veh{i}";
  VehicleType first_type = VehicleType::HV;
  VehicleType other_type = VehicleType::AV;
};

struct DatasetProfile {
  DatasetName name = DatasetName::Custom;
  Layout layout = Layout::WideMultiVehicle;
  // Explicit slots front-to-back. When empty, `slot_template` is expanded.
  std::vector<VehicleSlot> slots;
  std::optional<SlotTemplate> slot_template;
  double time_unit = 1.0;  // multiplier to seconds
  double declared_rate_hz = 10.0;
  std::string comment_prefix = "#";
};

/// Throws InvalidProfile when an invariant does not hold.
void validate_profile(const DatasetProfile& profile);

/// Hard-coded column maps for the supported datasets; column names can be
/// overridden through the JSON config. Throws UnknownProfile.
DatasetProfile builtin_profile(std::string_view name);

/// Expands the profile's slots against a parsed header.
std::vector<VehicleSlot> resolve_slots(const DatasetProfile& profile,
                                       std::span<const std::string> header,
                                       std::size_t per_vehicle_index = 0);

struct PlatoonRecord {
  std::vector<std::string> order;  // vehicle ids, front to back
  std::vector<VehicleTrack> tracks;
  std::string source;
};

/// Parses one wide or paired CSV stream. Every data row yields one fix per
/// slot; unparseable cells yield fixes with `valid == false`.
PlatoonRecord parse_platoon(std::istream& in, const DatasetProfile& profile,
                            const std::string& source_label);

/// Parses one single-vehicle stream for the per-vehicle-files layout.
VehicleTrack parse_vehicle_file(std::istream& in, const DatasetProfile& profile,
                                std::size_t slot_index, const std::string& source_label);

PlatoonRecord ingest_file(const std::filesystem::path& path, const DatasetProfile& profile);

/// Per-vehicle layouts take one file per vehicle, front to back; other
/// layouts take exactly one file.
PlatoonRecord ingest_files(std::span<const std::filesystem::path> paths,
                           const DatasetProfile& profile);

/// A raw car-following pair plus both tracks resampled on its frame grid.
struct RawPair {
  CfTrajectory trajectory;
  VehicleTrack leader;
  VehicleTrack follower;
};

/// Resamples leader and follower onto the leader's grid over their common
/// window. Spacing and acceleration are only filled from source columns.
/// Throws NonAdjacentPair or InsufficientOverlap.
RawPair pair_tracks(const PlatoonRecord& platoon, std::size_t leader_idx,
                    std::size_t follower_idx, const std::string& traj_id,
                    std::string_view dataset = "custom");

/// Linear interpolation of every numeric field of `track` at `times`.
/// Times matching a fix within 1e-6 of the period are copied verbatim.
VehicleTrack resample_track(const VehicleTrack& track, std::span<const double> times);

}  // namespace trajkit
