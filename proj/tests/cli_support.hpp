#pragma once

// Helpers for driving the trajkit executable on generated datasets.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace cli {

namespace fs = std::filesystem;

inline fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("trajkit_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

struct RunResult {
  int exit_code = -1;
  std::string stderr_text;
};

/// Runs `trajkit <args>` and captures its exit code and stderr.
inline RunResult run(const std::string& args, const fs::path& workdir) {
  const fs::path err = workdir / "stderr.txt";
  const std::string cmd = std::string("\"") + TRAJKIT_CLI + "\" " + args + " 2> \"" + err.string() + "\" > /dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.stderr_text = slurp(err);
  return r;
}

/// Leader speed follows a slow sinusoid; each follower lags it in phase and
/// keeps a varying gap, so every regressor of the car-following fit moves.
struct PlatoonShape {
  double speed_mean = 15.0;
  double gap_mean = 25.0;
  bool constant_gap = false;
};

inline double platoon_speed(double t, int i, const PlatoonShape& p) {
  return p.speed_mean + 2.0 * std::sin(0.1 * t - 0.3 * i) + 0.5 * std::sin(0.37 * t + i);
}

inline double platoon_gap(double t, int i, const PlatoonShape& p) {
  return p.constant_gap ? p.gap_mean : p.gap_mean + 3.0 * std::sin(0.05 * t + i) + std::cos(0.23 * t);
}

/// Wide OpenACC-style file: one row per 0.1 s, column groups per vehicle.
inline void write_wide_platoon(const fs::path& path, int vehicles, double seconds, const PlatoonShape& p = {}) {
  std::ostringstream s;
  s << "Time";
  for (int i = 1; i <= vehicles; ++i) {
    s << ",Speed" << i << ",Lat" << i << ",Lon" << i;
    if (i > 1) s << ",IVS" << i - 1;
  }
  s << '\n';
  s.setf(std::ios::fixed);
  s.precision(6);
  const int rows = static_cast<int>(std::lround(seconds * 10.0));
  for (int r = 0; r < rows; ++r) {
    const double t = 0.1 * r;
    s << t;
    for (int i = 1; i <= vehicles; ++i) {
      s << ',' << platoon_speed(t, i, p) << ",57.78," << 12.0 + 1e-4 * t - 3e-4 * i;
      if (i > 1) s << ',' << platoon_gap(t, i, p);
    }
    s << '\n';
  }
  write_text(path, s.str());
}

/// CATS-style per-vehicle files at 1 Hz; spacing comes from the coordinates.
inline std::vector<fs::path> write_vehicle_files(const fs::path& dir, int vehicles, double seconds) {
  std::vector<fs::path> files;
  const PlatoonShape p{22.0, 40.0, false};
  const int rows = static_cast<int>(std::lround(seconds));
  for (int i = 1; i <= vehicles; ++i) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(8);
    s << "Time,Latitude,Longitude,Speed\n";
    for (int t = 0; t < rows; ++t) {
      double back = 0.0;
      for (int j = 2; j <= i; ++j) back += platoon_gap(t, j, p);
      const double lat = 28.0 + (22.0 * t - back) / 111194.92664455873;
      s << t << ',' << lat << ",-82.4," << platoon_speed(t, i, p) << '\n';
    }
    files.push_back(dir / ("vehicle" + std::to_string(i) + ".csv"));
    write_text(files.back(), s.str());
  }
  return files;
}

inline fs::path write_config(const fs::path& dir, const nlohmann::json& j, const std::string& name = "run.json") {
  const fs::path p = dir / name;
  write_text(p, j.dump(2));
  return p;
}

}  // namespace cli
