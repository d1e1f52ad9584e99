#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trajkit/calibrate.hpp"
#include "trajkit/clean.hpp"
#include "trajkit/ingest.hpp"
#include "trajkit/stats.hpp"
#include "trajkit/uniform_csv.hpp"

namespace trajkit {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// JSON mappings. Readers throw InvalidConfig on malformed documents.
json to_json(const DatasetProfile& profile);
DatasetProfile profile_from_json(const json& j);

/// A built-in name, a full profile object, or a built-in name patched with
/// `overrides` (RFC 7386 merge patch over the built-in's JSON form).
DatasetProfile resolve_profile(const json& profile, const json& overrides = json());

json to_json(const CleaningConfig& cfg);
CleaningConfig cleaning_from_json(const json& j);

json to_json(const CleaningReport& report);
json to_json(const FeatureStats& stats);
json to_json(const Calibration& result);
json to_json(const Provenance& prov, double sample_rate_hz);
TrajectoryHeader header_from_json(const json& j);

/// One platoon source. Per-vehicle layouts list one file per vehicle,
/// front to back; other layouts list exactly one file.
struct InputGroup {
  std::vector<std::filesystem::path> files;
  std::string label;
  std::vector<std::string> vehicle_ids;   // optional per-slot renames
  std::vector<VehicleType> vehicle_types; // optional per-slot types
};

struct EmitFlags {
  bool uniform_csv = true;
  bool cleaning_report = true;
  bool stats = true;
  bool histograms = true;
  bool calibration = true;
};

struct RunConfig {
  DatasetProfile profile;
  std::vector<InputGroup> inputs;
  std::filesystem::path output_dir = "out";
  CleaningConfig cleaning;
  CalibrationConfig calibration;
  // Follower ids to calibrate; empty means every follower present.
  std::vector<std::string> calibrate_vehicles;
  std::size_t histogram_bins = kDefaultHistogramBins;
  EmitFlags emit;
  json document;  // the parsed config, used for the provenance hash
};

/// Relative input and output paths are resolved against `base_dir`.
RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir);

/// Loads a config file; `profile_name` and `output_dir` override the file.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::optional<std::string>& profile_name = std::nullopt,
                          const std::optional<std::filesystem::path>& output_dir = std::nullopt);

/// 64-bit FNV-1a of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const json& document);

}  // namespace trajkit
