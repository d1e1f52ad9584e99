#include "trajkit/kinematics.hpp"

#include "trajkit/error.hpp"

namespace trajkit {

std::vector<double> derive_acceleration(std::span<const double> speeds, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::TooFewSamples, "dt must be positive");
  if (speeds.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "need at least 2 speeds, got " + std::to_string(speeds.size()));
  }
  std::vector<double> accel(speeds.size() - 1);
  for (std::size_t i = 1; i < speeds.size(); ++i) accel[i - 1] = (speeds[i] - speeds[i - 1]) / dt;
  return accel;
}

CfTrajectory derive_spacing(const CfTrajectory& traj, const VehicleTrack& leader,
                            const VehicleTrack& follower) {
  const std::size_t n = traj.frames.size();
  if (leader.fixes.size() != n || follower.fixes.size() != n) {
    throw Error(ErrorCode::MisalignedTracks, "track lengths differ from frame count");
  }
  const double tol = 1e-6 / traj.sample_rate_hz;
  CfTrajectory out = traj;
  std::vector<double> derived(n, kUnset);
  bool any_source = false;
  for (std::size_t i = 0; i < n; ++i) {
    const GpsFix& l = leader.fixes[i];
    const GpsFix& f = follower.fixes[i];
    if (std::abs(l.t - out.frames[i].t) > tol || std::abs(f.t - out.frames[i].t) > tol) {
      throw Error(ErrorCode::MisalignedTracks, "frame " + std::to_string(out.frames[i].frame_id));
    }
    if (is_set(l.lat) && is_set(l.lon) && is_set(f.lat) && is_set(f.lon)) {
      derived[i] = haversine_m(l.lat, l.lon, f.lat, f.lon);
    }
    UniformFrame& fr = out.frames[i];
    if (is_set(fr.spacing)) {
      any_source = true;
    } else if (is_set(derived[i])) {
      fr.spacing = derived[i];
    } else {
      throw Error(ErrorCode::MissingCoordinates,
                  "frame " + std::to_string(fr.frame_id) + " has neither source spacing nor coordinates");
    }
  }
  if (any_source) out.provenance.derived_spacing = std::move(derived);
  return out;
}

CfTrajectory derive_speed_diff(const CfTrajectory& traj) {
  CfTrajectory out = traj;
  for (auto& f : out.frames) f.speed_diff = f.leader_speed - f.follower_speed;
  return out;
}

CfTrajectory fill_acceleration(const CfTrajectory& traj) {
  CfTrajectory out = traj;
  if (out.frames.size() < 2) return out;
  std::vector<double> speeds;
  speeds.reserve(out.frames.size());
  for (const auto& f : out.frames) speeds.push_back(f.follower_speed);
  const auto accel = derive_acceleration(speeds, 1.0 / out.sample_rate_hz);

  std::vector<double> derived(out.frames.size(), kUnset);
  bool any_source = false;
  for (std::size_t i = 1; i < out.frames.size(); ++i) {
    derived[i] = accel[i - 1];
    UniformFrame& f = out.frames[i];
    if (is_set(f.follower_acceleration)) any_source = true;
    else f.follower_acceleration = accel[i - 1];
  }
  if (is_set(out.frames.front().follower_acceleration)) any_source = true;
  if (any_source) out.provenance.derived_acceleration = derived;
  if (!is_set(out.frames.front().follower_acceleration)) {
    out.frames.erase(out.frames.begin());
    if (!out.provenance.derived_acceleration.empty()) {
      out.provenance.derived_acceleration.erase(out.provenance.derived_acceleration.begin());
    }
    if (!out.provenance.derived_spacing.empty()) {
      out.provenance.derived_spacing.erase(out.provenance.derived_spacing.begin());
    }
  }
  return out;
}

CfTrajectory derive_kinematics(const CfTrajectory& traj, const VehicleTrack& leader,
                               const VehicleTrack& follower) {
  return fill_acceleration(derive_speed_diff(derive_spacing(traj, leader, follower)));
}

}  // namespace trajkit
