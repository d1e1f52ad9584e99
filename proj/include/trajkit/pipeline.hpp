#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trajkit/config.hpp"

namespace trajkit {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitPartial = 1, kExitInvalidInput = 2 };

// Output file names inside RunConfig::output_dir.
inline constexpr const char* kRawCsv = "uniform_raw.csv";
inline constexpr const char* kCleanCsv = "uniform_clean.csv";
inline constexpr const char* kCleaningReportJson = "cleaning_report.json";
inline constexpr const char* kStatsCsv = "stats.csv";
inline constexpr const char* kStatsJson = "stats.json";
inline constexpr const char* kCalibrationCsv = "calibration.csv";
inline constexpr const char* kCalibrationJson = "calibration.json";

inline constexpr const char* kCalibrationHeader = "vehicle,r_squared,f_s,f_v,f_dv,z,n_samples";

/// Provenance sidecar for `csv`: same stem with `.provenance.json`.
std::filesystem::path provenance_path(const std::filesystem::path& csv);

/// Ingests every input group, fills gaps, pairs adjacent vehicles and
/// derives kinematics. Returns trajectories sorted by traj_id.
struct IngestOutcome {
  std::vector<CfTrajectory> trajectories;
  json skipped = json::array();  // pairs or tracks that could not be used
};
IngestOutcome ingest_inputs(const RunConfig& cfg);

/// Reads a uniform CSV together with its provenance sidecar when present.
std::vector<CfTrajectory> load_uniform(const std::filesystem::path& csv, double default_rate_hz);

void save_uniform(const std::filesystem::path& csv, std::span<const CfTrajectory> trajectories,
                  const RunConfig& cfg, const std::string& stage,
                  const std::vector<std::filesystem::path>& inputs, const json& extra = json::object());

// Subcommands. Each throws trajkit::Error on invalid input and returns an ExitCode.
int cmd_ingest(const RunConfig& cfg);
int cmd_clean(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);
int cmd_pipeline(const RunConfig& cfg);

/// {"code": ..., "message": ...}
json error_json(const Error& e);

}  // namespace trajkit
