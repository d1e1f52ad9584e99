#include "trajkit/uniform_csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "trajkit/csv_reader.hpp"
#include "trajkit/error.hpp"

namespace trajkit {
namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

double parse_numeric_cell(const std::string& cell, std::size_t line, const char* column) {
  if (cell.empty()) return kUnset;
  auto v = csv::parse_double(cell);
  if (!v) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad value for " + column + ": '" + cell + "'");
  }
  return *v;
}

VehicleType parse_type(const std::string& cell, std::size_t line) {
  if (cell == "0") return VehicleType::HV;
  if (cell == "1") return VehicleType::AV;
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ": vehicle type must be 0 or 1, got '" + cell + "'");
}

}  // namespace

void write_uniform_csv(std::ostream& out, std::span<const CfTrajectory> trajectories) {
  out << kUniformHeader << '\n';
  for (const auto& traj : trajectories) {
    for (const auto& f : traj.frames) {
      out << quote_if_needed(f.traj_id) << ',' << f.frame_id << ',' << quote_if_needed(f.leader_id)
          << ',' << static_cast<int>(f.leader_type) << ','
          << csv::format_fixed(f.leader_speed, kUniformDecimals) << ','
          << quote_if_needed(f.follower_id) << ',' << static_cast<int>(f.follower_type) << ','
          << csv::format_fixed(f.follower_speed, kUniformDecimals) << ','
          << csv::format_fixed(f.follower_acceleration, kUniformDecimals) << ','
          << csv::format_fixed(f.spacing, kUniformDecimals) << ','
          << csv::format_fixed(f.speed_diff, kUniformDecimals) << '\n';
    }
  }
}

std::vector<CfTrajectory> read_uniform_csv(std::istream& in,
                                           const std::map<std::string, TrajectoryHeader>& headers,
                                           double default_rate_hz) {
  csv::Reader reader(in, "");
  auto header = reader.next();
  if (!header) throw Error(ErrorCode::EmptyFile, "uniform CSV has no header");
  std::string joined;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if (i) joined += ',';
    joined += (*header)[i];
  }
  if (joined != kUniformHeader) {
    throw Error(ErrorCode::SchemaMismatch, "expected header '" + std::string(kUniformHeader) +
                                               "', got '" + joined + "'");
  }

  std::vector<CfTrajectory> out;
  std::unordered_map<std::string, std::size_t> index;
  while (auto row = reader.next()) {
    const std::size_t line = reader.line_number();
    if (row->size() != 11) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": expected 11 fields, got " +
                                             std::to_string(row->size()));
    }
    const auto& r = *row;
    auto [it, inserted] = index.try_emplace(r[0], out.size());
    if (inserted) {
      CfTrajectory traj;
      traj.traj_id = r[0];
      traj.sample_rate_hz = default_rate_hz;
      if (auto h = headers.find(r[0]); h != headers.end()) {
        traj.sample_rate_hz = h->second.sample_rate_hz;
        traj.provenance = h->second.provenance;
      }
      out.push_back(std::move(traj));
    }
    CfTrajectory& traj = out[it->second];

    UniformFrame f;
    f.traj_id = r[0];
    const auto [ptr, ec] = std::from_chars(r[1].data(), r[1].data() + r[1].size(), f.frame_id);
    if (ec != std::errc{} || ptr != r[1].data() + r[1].size() || f.frame_id < 0) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad frame_id '" + r[1] + "'");
    }
    f.leader_id = r[2];
    f.leader_type = parse_type(r[3], line);
    f.leader_speed = parse_numeric_cell(r[4], line, "leader_speed");
    f.follower_id = r[5];
    f.follower_type = parse_type(r[6], line);
    f.follower_speed = parse_numeric_cell(r[7], line, "follower_speed");
    f.follower_acceleration = parse_numeric_cell(r[8], line, "follower_acceleration");
    f.spacing = parse_numeric_cell(r[9], line, "spacing");
    f.speed_diff = parse_numeric_cell(r[10], line, "speed_diff");
    f.t = traj.provenance.time_origin_s + static_cast<double>(f.frame_id) / traj.sample_rate_hz;
    traj.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace trajkit
