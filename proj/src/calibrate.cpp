#include "trajkit/calibrate.hpp"

namespace trajkit {

std::size_t delay_frames(double delay_s, double rate_hz) {
  const double product = delay_s * rate_hz;
  const double k = std::round(product);
  if (!(delay_s >= 0.0) || !(rate_hz > 0.0) || std::abs(product - k) > 1e-9) {
    throw Error(ErrorCode::DelayNotMultipleOfPeriod,
                "delay " + std::to_string(delay_s) + " s at " + std::to_string(rate_hz) + " Hz");
  }
  return static_cast<std::size_t>(k);
}

std::vector<Sample> build_samples(const CfTrajectory& traj, double delay_s, double rate_hz) {
  const std::size_t k = delay_frames(delay_s, rate_hz);
  const auto& fr = traj.frames;
  if (fr.size() <= k) {
    throw Error(ErrorCode::TooFewFrames, "'" + traj.traj_id + "' has " + std::to_string(fr.size()) +
                                             " frames, delay needs more than " + std::to_string(k));
  }
  std::vector<Sample> out;
  out.reserve(fr.size() - k);
  for (std::size_t i = 0; i + k < fr.size(); ++i) {
    Sample s{fr[i].spacing, fr[i].follower_speed, fr[i].speed_diff, fr[i + k].follower_acceleration};
    if (!std::isfinite(s.s) || !std::isfinite(s.v) || !std::isfinite(s.dv) || !std::isfinite(s.a)) {
      throw Error(ErrorCode::NonFiniteSample,
                  "'" + traj.traj_id + "' frame " + std::to_string(fr[i].frame_id));
    }
    out.push_back(s);
  }
  return out;
}

Calibration calibrate_vehicle(std::span<const CfTrajectory> trajectories, const CalibrationConfig& cfg) {
  if (trajectories.empty()) throw Error(ErrorCode::TooFewSamples, "no trajectories");
  const std::string* follower = nullptr;
  const double rate = trajectories.front().sample_rate_hz;
  for (const auto& tr : trajectories) {
    if (tr.sample_rate_hz != rate) {
      throw Error(ErrorCode::MixedRates, std::to_string(rate) + " vs " + std::to_string(tr.sample_rate_hz));
    }
    for (const auto& f : tr.frames) {
      if (!follower) follower = &f.follower_id;
      else if (f.follower_id != *follower) throw Error(ErrorCode::MixedFollowers, *follower + " vs " + f.follower_id);
    }
  }

  std::vector<Sample> pooled;
  for (const auto& tr : trajectories) {
    auto s = build_samples(tr, cfg.delay_s, rate);
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  Calibration res = fit_linear_cf<double>(pooled);
  res.model.delay_s = cfg.delay_s;
  return res;
}

}  // namespace trajkit
