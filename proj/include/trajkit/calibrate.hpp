#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajkit/error.hpp"
#include "trajkit/model.hpp"

namespace trajkit {

/// Linear car-following model  a_hat = f_s*s + f_v*v + f_dv*dv + z.
template <typename Scalar>
struct LinearCfModel {
  using Vector4 = Eigen::Matrix<Scalar, 4, 1>;

  Scalar f_s = Scalar(0);   // 1/s^2, spacing
  Scalar f_v = Scalar(0);   // 1/s, follower speed
  Scalar f_dv = Scalar(0);  // 1/s, leader minus follower speed
  Scalar z = Scalar(0);     // m/s^2, intercept
  Scalar delay_s = Scalar(0);

  /// [f_s, f_v, f_dv, z]
  Vector4 coefficients() const { return Vector4(f_s, f_v, f_dv, z); }

  static LinearCfModel from_coefficients(const Vector4& c, Scalar delay = Scalar(0)) {
    return {c(0), c(1), c(2), c(3), delay};
  }
};

template <typename Scalar>
struct RegressionSample {
  Scalar s;   // spacing, m
  Scalar v;   // follower speed, m/s
  Scalar dv;  // leader minus follower speed, m/s
  Scalar a;   // observed follower acceleration, m/s^2
};

template <typename Scalar>
struct CalibrationResult {
  LinearCfModel<Scalar> model;
  Scalar r_squared = Scalar(0);
  std::size_t n_samples = 0;
  Scalar residual_sse = Scalar(0);
};

template <typename Scalar>
Scalar predict_accel(const LinearCfModel<Scalar>& m, Scalar s, Scalar v, Scalar dv) {
  return m.f_s * s + m.f_v * v + m.f_dv * dv + m.z;
}

/// Rows [s, v, dv, 1].
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 4> design_matrix(
    std::span<const RegressionSample<Scalar>> samples) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 4> x(static_cast<Eigen::Index>(samples.size()), 4);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto& smp = samples[static_cast<std::size_t>(i)];
    x.row(i) << smp.s, smp.v, smp.dv, Scalar(1);
  }
  return x;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> target_vector(
    std::span<const RegressionSample<Scalar>> samples) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(static_cast<Eigen::Index>(samples.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = samples[static_cast<std::size_t>(i)].a;
  return y;
}

/// Coefficient of determination 1 - SSE/SST. Throws ZeroVarianceTarget when
/// `observed` is constant and TooFewSamples below two entries.
template <typename DerivedP, typename DerivedO>
typename DerivedO::Scalar r_squared(const Eigen::MatrixBase<DerivedP>& predicted,
                                    const Eigen::MatrixBase<DerivedO>& observed) {
  using Scalar = typename DerivedO::Scalar;
  if (predicted.size() != observed.size() || observed.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "r_squared needs two equal-length series of length >= 2");
  }
  if (observed.maxCoeff() == observed.minCoeff()) {
    throw Error(ErrorCode::ZeroVarianceTarget, "observed series is constant");
  }
  const Scalar mean = observed.mean();
  const Scalar sse = (observed - predicted).squaredNorm();
  const Scalar sst = (observed.array() - mean).matrix().squaredNorm();
  return Scalar(1) - sse / sst;
}

/// Relative pivot threshold, after column equilibration, below which the
/// design is treated as rank deficient.
inline constexpr double kRankThreshold = 1e-10;

/// Least-squares fit of the linear model through a column-pivoted
/// Householder QR on the equilibrated design matrix.
/// Throws TooFewSamples, NonFiniteSample, RankDeficient, ZeroVarianceTarget.
template <typename Scalar>
CalibrationResult<Scalar> fit_linear_cf(std::span<const RegressionSample<Scalar>> samples) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Vector4 = Eigen::Matrix<Scalar, 4, 1>;
  if (samples.size() < 4) {
    throw Error(ErrorCode::TooFewSamples, "need at least 4 samples, got " + std::to_string(samples.size()));
  }
  const auto x = design_matrix(samples);
  const Vector y = target_vector(samples);
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::NonFiniteSample, "non-finite regression input");
  if (y.maxCoeff() == y.minCoeff()) throw Error(ErrorCode::ZeroVarianceTarget, "acceleration target is constant");

  const Vector4 scale = x.colwise().norm().transpose();
  if ((scale.array() == Scalar(0)).any()) throw Error(ErrorCode::RankDeficient, "all-zero regressor column");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 4> xs = x * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::Matrix<Scalar, Eigen::Dynamic, 4>> qr(xs);
  qr.setThreshold(Scalar(kRankThreshold));
  if (qr.rank() < 4) {
    throw Error(ErrorCode::RankDeficient, "design matrix rank " + std::to_string(qr.rank()) + " < 4");
  }
  const Vector4 coeffs = qr.solve(y).cwiseQuotient(scale);

  CalibrationResult<Scalar> res;
  res.model = LinearCfModel<Scalar>::from_coefficients(coeffs);
  const Vector predicted = x * coeffs;
  res.residual_sse = (y - predicted).squaredNorm();
  res.r_squared = r_squared(predicted, y);
  res.n_samples = samples.size();
  return res;
}

// Double-precision entry points working on trajectories.

using CfModel = LinearCfModel<double>;
using Sample = RegressionSample<double>;
using Calibration = CalibrationResult<double>;

/// Number of frames corresponding to `delay_s`; throws
/// DelayNotMultipleOfPeriod unless delay_s*rate_hz is within 1e-9 of an
/// integer >= 0.
std::size_t delay_frames(double delay_s, double rate_hz);

/// Pairs (s, v, dv) at frame i with the acceleration at frame i + k.
/// Throws DelayNotMultipleOfPeriod, TooFewFrames, NonFiniteSample.
std::vector<Sample> build_samples(const CfTrajectory& traj, double delay_s, double rate_hz);

struct CalibrationConfig {
  double delay_s = 0.0;
};

/// Pools samples from every trajectory of one follower (the delay never
/// crosses trajectory boundaries) and fits once.
/// Throws MixedFollowers, MixedRates and anything fit_linear_cf throws.
Calibration calibrate_vehicle(std::span<const CfTrajectory> trajectories, const CalibrationConfig& cfg);

}  // namespace trajkit
