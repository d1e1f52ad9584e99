#include "trajkit/model.hpp"

namespace trajkit {
namespace {

bool same(double a, double b) noexcept {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

bool GpsFix::operator==(const GpsFix& o) const {
  return same(t, o.t) && same(lat, o.lat) && same(lon, o.lon) && same(alt, o.alt) &&
         same(speed, o.speed) && same(spacing, o.spacing) && same(acceleration, o.acceleration) &&
         valid == o.valid;
}

bool UniformFrame::operator==(const UniformFrame& o) const {
  return traj_id == o.traj_id && frame_id == o.frame_id && leader_id == o.leader_id &&
         leader_type == o.leader_type && same(leader_speed, o.leader_speed) &&
         follower_id == o.follower_id && follower_type == o.follower_type &&
         same(follower_speed, o.follower_speed) &&
         same(follower_acceleration, o.follower_acceleration) && same(spacing, o.spacing) &&
         same(speed_diff, o.speed_diff) && same(t, o.t);
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::SpeedDiffMismatch: return "SpeedDiffMismatch";
    case ViolationKind::NegativeSpacing: return "NegativeSpacing";
    case ViolationKind::UnsetSpacing: return "UnsetSpacing";
    case ViolationKind::UnsetAcceleration: return "UnsetAcceleration";
    case ViolationKind::UnsetSpeed: return "UnsetSpeed";
    case ViolationKind::FrameIdNotIncreasing: return "FrameIdNotIncreasing";
    case ViolationKind::MixedPair: return "MixedPair";
    case ViolationKind::TrajIdMismatch: return "TrajIdMismatch";
    case ViolationKind::NonPositiveRate: return "NonPositiveRate";
    case ViolationKind::TooShort: return "TooShort";
  }
  return "Unknown";
}

std::vector<Violation> validate_trajectory(const CfTrajectory& traj) {
  std::vector<Violation> out;
  if (!(traj.sample_rate_hz > 0.0)) {
    out.push_back({ViolationKind::NonPositiveRate, std::nullopt, traj.sample_rate_hz});
    return out;
  }

  const UniformFrame* first = traj.frames.empty() ? nullptr : &traj.frames.front();
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const UniformFrame& f = traj.frames[i];
    if (f.traj_id != traj.traj_id) {
      out.push_back({ViolationKind::TrajIdMismatch, f.frame_id, 0.0});
    }
    if (f.leader_id != first->leader_id || f.follower_id != first->follower_id) {
      out.push_back({ViolationKind::MixedPair, f.frame_id, 0.0});
    }
    if (i > 0 && f.frame_id <= traj.frames[i - 1].frame_id) {
      out.push_back({ViolationKind::FrameIdNotIncreasing, f.frame_id, 0.0});
    }
    if (!is_set(f.leader_speed) || !is_set(f.follower_speed)) {
      out.push_back({ViolationKind::UnsetSpeed, f.frame_id, 0.0});
    } else {
      const double expected = f.leader_speed - f.follower_speed;
      if (!is_set(f.speed_diff) || std::abs(f.speed_diff - expected) > kSpeedDiffTolerance) {
        out.push_back({ViolationKind::SpeedDiffMismatch, f.frame_id, f.speed_diff - expected});
      }
    }
    if (!is_set(f.spacing)) {
      out.push_back({ViolationKind::UnsetSpacing, f.frame_id, 0.0});
    } else if (f.spacing < 0.0) {
      out.push_back({ViolationKind::NegativeSpacing, f.frame_id, f.spacing});
    }
    if (!is_set(f.follower_acceleration)) {
      out.push_back({ViolationKind::UnsetAcceleration, f.frame_id, 0.0});
    }
  }

  const double duration = traj.duration_s();
  if (duration < kMinTrajectoryDurationS) {
    out.push_back({ViolationKind::TooShort, std::nullopt, duration});
  }
  return out;
}

void reindex_frames(CfTrajectory& traj) {
  std::int64_t id = 0;
  for (auto& f : traj.frames) f.frame_id = id++;
}

}  // namespace trajkit
