#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trajkit/clean.hpp"
#include "trajkit/model.hpp"

namespace trajkit {

/// Streaming count/min/max/mean/M2 with an associative merge.
class RunningStats {
 public:
  void push(double x) noexcept;
  RunningStats& merge(const RunningStats& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double mean() const noexcept { return mean_; }
  /// Sample standard deviation (n-1); 0 for fewer than two values.
  double std() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

/// Descriptive statistics of spacing, follower speed, speed difference and
/// follower acceleration, indexed by Feature.
struct FeatureStats {
  std::array<RunningStats, 4> features;
  std::size_t n_samples = 0;
  std::size_t n_trajectories = 0;

  const RunningStats& operator[](Feature f) const { return features[static_cast<std::size_t>(f)]; }
  /// Pools two disjoint frame sets.
  FeatureStats& merge(const FeatureStats& other) noexcept;
};

/// Throws TooFewSamples below two frames.
FeatureStats compute_feature_stats(std::span<const UniformFrame> frames);
FeatureStats compute_feature_stats(std::span<const CfTrajectory> trajectories);

struct Histogram {
  std::string feature;
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t total() const noexcept;
};

inline constexpr std::size_t kDefaultHistogramBins = 40;

/// Half-open bins [e_i, e_{i+1}), the last one closed. Throws EmptyInput.
Histogram histogram(std::span<const double> values, std::span<const double> edges,
                    std::string feature = {});

/// `bin_count` equal-width bins over [min, max] of the values; a zero range
/// is widened to [x - 0.5, x + 0.5].
Histogram histogram(std::span<const double> values, std::size_t bin_count = kDefaultHistogramBins,
                    std::string feature = {});

std::vector<double> feature_values(std::span<const CfTrajectory> trajectories, Feature f);

}  // namespace trajkit
