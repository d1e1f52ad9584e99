#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "trajkit/model.hpp"

namespace trajkit {

/// Mean Earth radius for the spherical model, in meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Great-circle distance in meters between two points given in degrees.
template <typename Scalar>
Scalar haversine_m(Scalar lat1, Scalar lon1, Scalar lat2, Scalar lon2,
                   Scalar radius = Scalar(kEarthRadiusM)) {
  using std::asin;
  using std::cos;
  using std::min;
  using std::sin;
  using std::sqrt;
  const Scalar to_rad = Scalar(std::numbers::pi) / Scalar(180);
  const Scalar phi1 = lat1 * to_rad;
  const Scalar phi2 = lat2 * to_rad;
  const Scalar half_dphi = (lat2 - lat1) * to_rad / Scalar(2);
  const Scalar half_dlambda = (lon2 - lon1) * to_rad / Scalar(2);
  const Scalar sp = sin(half_dphi);
  const Scalar sl = sin(half_dlambda);
  const Scalar h = sp * sp + cos(phi1) * cos(phi2) * sl * sl;
  return Scalar(2) * radius * asin(sqrt(min(h, Scalar(1))));
}

/// Backward first difference: a[i-1] = (v[i] - v[i-1]) / dt for i >= 1.
/// Output has one element fewer than the input. Throws TooFewSamples.
std::vector<double> derive_acceleration(std::span<const double> speeds, double dt);

/// Sets spacing from the coordinates of the time-aligned tracks. Frames
/// whose spacing already came from the source keep it; the coordinate
/// value then goes to provenance.derived_spacing. Throws MisalignedTracks,
/// MissingCoordinates.
CfTrajectory derive_spacing(const CfTrajectory& traj, const VehicleTrack& leader,
                            const VehicleTrack& follower);

/// speed_diff = leader_speed - follower_speed for every frame.
CfTrajectory derive_speed_diff(const CfTrajectory& traj);

/// Fills follower_acceleration from follower speeds. Source values are kept
/// (the derived value goes to provenance.derived_acceleration). A leading
/// frame left without acceleration is dropped.
CfTrajectory fill_acceleration(const CfTrajectory& traj);

/// Spacing, speed difference and acceleration in one pass.
CfTrajectory derive_kinematics(const CfTrajectory& traj, const VehicleTrack& leader,
                               const VehicleTrack& follower);

}  // namespace trajkit
