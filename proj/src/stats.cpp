#include "trajkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "trajkit/error.hpp"

namespace trajkit {

void RunningStats::push(double x) noexcept {
  if (n_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

RunningStats& RunningStats::merge(const RunningStats& o) noexcept {
  if (o.n_ == 0) return *this;
  if (n_ == 0) return *this = o;
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  mean_ = (na * mean_ + nb * o.mean_) / n;
  m2_ += o.m2_ + delta * delta * na * nb / n;
  n_ += o.n_;
  min_ = std::min(min_, o.min_);
  max_ = std::max(max_, o.max_);
  return *this;
}

double RunningStats::std() const noexcept {
  if (n_ < 2) return 0.0;
  return std::sqrt(std::max(m2_, 0.0) / static_cast<double>(n_ - 1));
}

FeatureStats& FeatureStats::merge(const FeatureStats& o) noexcept {
  for (std::size_t i = 0; i < features.size(); ++i) features[i].merge(o.features[i]);
  n_samples += o.n_samples;
  n_trajectories += o.n_trajectories;
  return *this;
}

FeatureStats compute_feature_stats(std::span<const UniformFrame> frames) {
  if (frames.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "need at least 2 frames, got " + std::to_string(frames.size()));
  }
  FeatureStats st;
  std::set<std::string> ids;
  for (const auto& f : frames) {
    for (Feature feat : kAllFeatures) st.features[static_cast<std::size_t>(feat)].push(feature_value(f, feat));
    ids.insert(f.traj_id);
  }
  st.n_samples = frames.size();
  st.n_trajectories = ids.size();
  return st;
}

FeatureStats compute_feature_stats(std::span<const CfTrajectory> trajectories) {
  std::vector<UniformFrame> pooled;
  for (const auto& tr : trajectories) pooled.insert(pooled.end(), tr.frames.begin(), tr.frames.end());
  return compute_feature_stats(pooled);
}

std::size_t Histogram::total() const noexcept {
  std::size_t n = underflow + overflow;
  for (auto c : counts) n += c;
  return n;
}

Histogram histogram(std::span<const double> values, std::span<const double> edges, std::string feature) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "histogram of no values");
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw Error(ErrorCode::InvalidConfig, "histogram needs >= 2 strictly ascending edges");
  }
  Histogram h;
  h.feature = std::move(feature);
  h.bin_edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  for (double v : values) {
    if (v < edges.front()) {
      ++h.underflow;
    } else if (v > edges.back()) {
      ++h.overflow;
    } else if (v == edges.back()) {
      ++h.counts.back();
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
  }
  return h;
}

Histogram histogram(std::span<const double> values, std::size_t bin_count, std::string feature) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "histogram of no values");
  if (bin_count < 1) throw Error(ErrorCode::InvalidConfig, "bin_count must be >= 1");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bin_count + 1);
  for (std::size_t i = 0; i <= bin_count; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bin_count);
  }
  edges.back() = hi;
  return histogram(values, edges, std::move(feature));
}

std::vector<double> feature_values(std::span<const CfTrajectory> trajectories, Feature f) {
  std::vector<double> out;
  for (const auto& tr : trajectories)
    for (const auto& fr : tr.frames) out.push_back(feature_value(fr, f));
  return out;
}

}  // namespace trajkit
