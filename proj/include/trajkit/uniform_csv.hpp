#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajkit/model.hpp"

namespace trajkit {

inline constexpr std::string_view kUniformHeader =
    "traj_id,frame_id,leader_id,leader_type,leader_speed,follower_id,follower_type,"
    "follower_speed,follower_acceleration,spacing,speed_diff";

inline constexpr int kUniformDecimals = 6;

/// Per-trajectory metadata that the CSV itself does not carry.
struct TrajectoryHeader {
  double sample_rate_hz = 10.0;
  Provenance provenance;
};

/// Writes the header and every frame of every trajectory, in the given order.
/// Unset numeric fields are written as empty cells.
void write_uniform_csv(std::ostream& out, std::span<const CfTrajectory> trajectories);

/// Reads a uniform CSV. Rows are grouped by traj_id in order of first
/// appearance. Rate and time origin come from `headers` when present,
/// otherwise `default_rate_hz` and 0. Throws SchemaMismatch on a header
/// that differs from kUniformHeader and ParseError on malformed rows.
std::vector<CfTrajectory> read_uniform_csv(std::istream& in,
                                           const std::map<std::string, TrajectoryHeader>& headers,
                                           double default_rate_hz);

}  // namespace trajkit
