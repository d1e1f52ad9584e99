#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "trajkit/model.hpp"

namespace fixtures {

/// Round to 6 decimals, the precision the uniform CSV stores.
inline double q6(double x) { return std::round(x * 1e6) / 1e6; }

struct FrameValues {
  double leader_speed;
  double follower_speed;
  double spacing;
  double accel;
};

/// A complete trajectory whose frame k takes its values from `gen(k)`.
inline trajkit::CfTrajectory make_trajectory(const std::string& id, std::size_t n, double rate_hz,
                                             const std::function<FrameValues(std::size_t)>& gen,
                                             const std::string& leader = "L",
                                             const std::string& follower = "F") {
  trajkit::CfTrajectory tr;
  tr.traj_id = id;
  tr.sample_rate_hz = rate_hz;
  for (std::size_t k = 0; k < n; ++k) {
    const FrameValues v = gen(k);
    trajkit::UniformFrame f;
    f.traj_id = id;
    f.frame_id = static_cast<std::int64_t>(k);
    f.leader_id = leader;
    f.leader_type = trajkit::VehicleType::HV;
    f.follower_id = follower;
    f.follower_type = trajkit::VehicleType::AV;
    f.leader_speed = v.leader_speed;
    f.follower_speed = v.follower_speed;
    f.spacing = v.spacing;
    f.follower_acceleration = v.accel;
    f.speed_diff = v.leader_speed - v.follower_speed;
    f.t = static_cast<double>(k) / rate_hz;
    tr.frames.push_back(f);
  }
  return tr;
}

inline trajkit::CfTrajectory steady_trajectory(const std::string& id, std::size_t n, double rate_hz = 10.0) {
  return make_trajectory(id, n, rate_hz, [](std::size_t) { return FrameValues{20.0, 20.0, 30.0, 0.0}; });
}

}  // namespace fixtures
