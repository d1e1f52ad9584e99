#include "trajkit/clean.hpp"

#include <algorithm>
#include <cmath>

#include "trajkit/error.hpp"

namespace trajkit {
namespace {

constexpr double kTimeEps = 1e-9;

void interpolate_fields(GpsFix& out, const GpsFix& a, const GpsFix& b) {
  const double w = (out.t - a.t) / (b.t - a.t);
  auto fill = [w](double& dst, double x, double y) {
    if (!is_set(dst)) dst = x + w * (y - x);
  };
  fill(out.lat, a.lat, b.lat);
  fill(out.lon, a.lon, b.lon);
  fill(out.alt, a.alt, b.alt);
  fill(out.speed, a.speed, b.speed);
  fill(out.spacing, a.spacing, b.spacing);
  fill(out.acceleration, a.acceleration, b.acceleration);
}

// Filled fixes for the gap between valid anchors a and b, or nullopt when
// the gap exceeds max_gap.
std::optional<std::vector<GpsFix>> fill_gap(const GpsFix& a, const GpsFix& b,
                                            std::span<const GpsFix> between, double period,
                                            std::size_t max_gap) {
  const auto steps = std::max<long long>(std::llround((b.t - a.t) / period), 1);
  const auto missing = static_cast<std::size_t>(steps - 1);
  std::vector<GpsFix> filled;

  if (between.size() > missing) {
    // More rows than grid slots: keep their own timestamps where present.
    if (between.size() > max_gap) return std::nullopt;
    const double n = static_cast<double>(between.size() + 1);
    for (std::size_t j = 0; j < between.size(); ++j) {
      GpsFix f = between[j];
      if (!is_set(f.t)) f.t = a.t + (b.t - a.t) * static_cast<double>(j + 1) / n;
      f.valid = false;
      filled.push_back(f);
    }
  } else {
    if (missing > max_gap) return std::nullopt;
    filled.resize(missing);
    for (std::size_t j = 0; j < missing; ++j) {
      filled[j].t = a.t + static_cast<double>(j + 1) * period;
      filled[j].valid = false;
    }
    for (const GpsFix& f : between) {
      if (!is_set(f.t)) continue;
      const auto slot = std::llround((f.t - a.t) / period) - 1;
      if (slot < 0 || slot >= static_cast<long long>(missing)) continue;
      GpsFix kept = f;
      kept.t = filled[static_cast<std::size_t>(slot)].t;
      kept.valid = false;
      filled[static_cast<std::size_t>(slot)] = kept;
    }
  }
  for (auto& f : filled) interpolate_fields(f, a, b);
  return filled;
}

CleanResult keep_frames(const CfTrajectory& traj, const std::vector<bool>& keep) {
  CleanResult res;
  res.trajectory = traj;
  res.trajectory.frames.clear();
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    if (keep[i]) res.trajectory.frames.push_back(traj.frames[i]);
  }
  reindex_frames(res.trajectory);
  res.report.before_total = traj.frames.size();
  res.report.after_total = res.trajectory.frames.size();
  return res;
}

}  // namespace

std::string_view to_string(Feature f) noexcept {
  switch (f) {
    case Feature::Spacing: return "spacing";
    case Feature::FollowerSpeed: return "follower_speed";
    case Feature::SpeedDiff: return "speed_diff";
    case Feature::FollowerAcceleration: return "follower_acceleration";
  }
  return "spacing";
}

std::optional<Feature> parse_feature(std::string_view s) noexcept {
  for (Feature f : kAllFeatures)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

double feature_value(const UniformFrame& frame, Feature f) noexcept {
  switch (f) {
    case Feature::Spacing: return frame.spacing;
    case Feature::FollowerSpeed: return frame.follower_speed;
    case Feature::SpeedDiff: return frame.speed_diff;
    case Feature::FollowerAcceleration: return frame.follower_acceleration;
  }
  return kUnset;
}

void validate_config(const CleaningConfig& cfg) {
  if (!(cfg.sigma_k > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma_k must be > 0");
  if (!(cfg.speed_floor >= 0.0)) throw Error(ErrorCode::InvalidConfig, "speed_floor must be >= 0");
  if (!(cfg.accel_bound > 0.0)) throw Error(ErrorCode::InvalidConfig, "accel_bound must be > 0");
  if (cfg.max_gap < 1) throw Error(ErrorCode::InvalidConfig, "max_gap must be >= 1");
  for (const auto& [id, windows] : cfg.trim_windows) {
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (!(windows[i].end_s > windows[i].start_s) ||
          (i > 0 && windows[i].start_s < windows[i - 1].end_s)) {
        throw Error(ErrorCode::InvalidConfig,
                    "trim windows for '" + id + "' must be sorted and non-overlapping");
      }
    }
  }
}

CleaningReport& CleaningReport::operator+=(const CleaningReport& o) {
  before_total += o.before_total;
  after_total += o.after_total;
  interpolated_points += o.interpolated_points;
  frames_trimmed += o.frames_trimmed;
  frames_threshold_dropped += o.frames_threshold_dropped;
  speed_floor_dropped += o.speed_floor_dropped;
  accel_bound_dropped += o.accel_bound_dropped;
  for (const auto& [f, n] : o.outliers_removed) outliers_removed[f] += n;
  outlier_frames_removed += o.outlier_frames_removed;
  discarded_segments += o.discarded_segments;
  empty_outputs += o.empty_outputs;
  warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
  return *this;
}

GapFillResult interpolate_gaps(const VehicleTrack& track, std::size_t max_gap,
                               double min_duration_s) {
  const auto& fx = track.fixes;
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    if (fx[i].valid && is_set(fx[i].t)) anchors.push_back(i);
  }
  if (anchors.size() < 2) {
    throw Error(ErrorCode::AllInvalid, "track '" + track.vehicle_id + "' has fewer than 2 valid fixes");
  }

  GapFillResult res;
  const double period = track.period();
  std::vector<std::vector<GpsFix>> segments(1);
  std::vector<std::size_t> filled_per_segment(1, 0);
  segments.back().push_back(fx[anchors.front()]);
  for (std::size_t k = 1; k < anchors.size(); ++k) {
    const GpsFix& a = fx[anchors[k - 1]];
    const GpsFix& b = fx[anchors[k]];
    std::span<const GpsFix> between(fx.begin() + anchors[k - 1] + 1, fx.begin() + anchors[k]);
    auto filled = fill_gap(a, b, between, period, max_gap);
    if (!filled) {
      segments.emplace_back();
      filled_per_segment.push_back(0);
    } else {
      filled_per_segment.back() += filled->size();
      segments.back().insert(segments.back().end(), filled->begin(), filled->end());
    }
    segments.back().push_back(b);
  }

  for (std::size_t s = 0; s < segments.size(); ++s) {
    const double duration = static_cast<double>(segments[s].size()) / track.sample_rate_hz;
    if (duration < min_duration_s) {
      ++res.discarded_segments;
      continue;
    }
    res.interpolated_points += filled_per_segment[s];
    res.segments.push_back({track.vehicle_id, track.vehicle_type, track.sample_rate_hz,
                            std::move(segments[s])});
  }
  return res;
}

FeatureBand feature_band(std::span<const CfTrajectory> trajectories, Feature f) {
  std::size_t n = 0;
  double sum = 0.0;
  for (const auto& tr : trajectories)
    for (const auto& fr : tr.frames) {
      sum += feature_value(fr, f);
      ++n;
    }
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "need at least 2 frames for outlier statistics");
  FeatureBand band;
  band.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& tr : trajectories)
    for (const auto& fr : tr.frames) {
      const double d = feature_value(fr, f) - band.mean;
      ss += d * d;
    }
  band.std = std::sqrt(ss / static_cast<double>(n - 1));
  return band;
}

CleanResult remove_outliers_with_bands(const CfTrajectory& traj, const CleaningConfig& cfg,
                                       const std::map<Feature, FeatureBand>& bands) {
  std::vector<bool> keep(traj.frames.size(), true);
  CleaningReport rep;
  for (Feature f : cfg.outlier_features) {
    const FeatureBand& band = bands.at(f);
    if (!(band.std > 0.0)) {
      rep.warnings.push_back({traj.traj_id, "DegenerateStd", std::string(to_string(f))});
      continue;
    }
    const double lo = band.lower(cfg.sigma_k);
    const double hi = band.upper(cfg.sigma_k);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < traj.frames.size(); ++i) {
      const double v = feature_value(traj.frames[i], f);
      if (v < lo || v > hi) {
        ++flagged;
        keep[i] = false;
      }
    }
    rep.outliers_removed[f] += flagged;
  }
  CleanResult res = keep_frames(traj, keep);
  rep.before_total = res.report.before_total;
  rep.after_total = res.report.after_total;
  rep.outlier_frames_removed = rep.before_total - rep.after_total;
  res.report = std::move(rep);
  return res;
}

CleanResult remove_outliers(const CfTrajectory& traj, const CleaningConfig& cfg) {
  std::map<Feature, FeatureBand> bands;
  std::span<const CfTrajectory> one(&traj, 1);
  for (Feature f : cfg.outlier_features) bands[f] = feature_band(one, f);
  return remove_outliers_with_bands(traj, cfg, bands);
}

CleanResult trim_unstable(const CfTrajectory& traj, std::span<const TimeWindow> windows,
                          double min_duration_s) {
  if (windows.empty()) {
    CleanResult res{traj, {}};
    res.report.before_total = res.report.after_total = traj.frames.size();
    return res;
  }
  std::vector<bool> keep(traj.frames.size(), false);
  CleaningReport rep;
  for (const TimeWindow& w : windows) {
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < traj.frames.size(); ++i) {
      const double t = traj.frames[i].t;
      if (t >= w.start_s - kTimeEps && t < w.end_s - kTimeEps) inside.push_back(i);
    }
    if (inside.empty()) continue;
    const double duration = static_cast<double>(inside.size()) / traj.sample_rate_hz;
    if (duration < min_duration_s) {
      ++rep.discarded_segments;
      rep.warnings.push_back({traj.traj_id, "DiscardedShortSegment",
                              "[" + std::to_string(w.start_s) + ", " + std::to_string(w.end_s) +
                                  ") kept only " + std::to_string(duration) + " s"});
      continue;
    }
    for (std::size_t i : inside) keep[i] = true;
  }
  CleanResult res = keep_frames(traj, keep);
  rep.before_total = res.report.before_total;
  rep.after_total = res.report.after_total;
  rep.frames_trimmed = rep.before_total - rep.after_total;
  res.report = std::move(rep);
  return res;
}

CleanResult apply_threshold_filters(const CfTrajectory& traj, const CleaningConfig& cfg) {
  std::vector<bool> keep(traj.frames.size(), true);
  CleaningReport rep;
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const UniformFrame& f = traj.frames[i];
    const bool lead_low = f.leader_speed < cfg.speed_floor;
    const bool follow_low = f.follower_speed < cfg.speed_floor;
    const bool slow = cfg.speed_floor_mode == SpeedFloorMode::Either ? (lead_low || follow_low)
                                                                     : (lead_low && follow_low);
    if (slow) {
      ++rep.speed_floor_dropped;
      keep[i] = false;
    } else if (std::abs(f.follower_acceleration) > cfg.accel_bound) {
      ++rep.accel_bound_dropped;
      keep[i] = false;
    }
  }
  CleanResult res = keep_frames(traj, keep);
  rep.before_total = res.report.before_total;
  rep.after_total = res.report.after_total;
  rep.frames_threshold_dropped = rep.before_total - rep.after_total;
  res.report = std::move(rep);
  return res;
}

CleanResult clean_pipeline(const CfTrajectory& traj, const CleaningConfig& cfg) {
  validate_config(cfg);
  CleaningReport total;
  total.before_total = traj.frames.size();
  total.interpolated_points = traj.provenance.interpolated_points;

  std::span<const TimeWindow> windows;
  if (auto it = cfg.trim_windows.find(traj.traj_id); it != cfg.trim_windows.end()) windows = it->second;

  auto absorb = [&total](CleanResult r) {
    r.report.before_total = r.report.after_total = 0;
    total += r.report;
    return std::move(r.trajectory);
  };

  CfTrajectory cur = absorb(trim_unstable(traj, windows, cfg.min_duration_s));
  cur = absorb(apply_threshold_filters(cur, cfg));
  if (cfg.outlier_scope == OutlierScope::PerTrajectory && cur.frames.size() >= 2) {
    cur = absorb(remove_outliers(cur, cfg));
  }
  reindex_frames(cur);
  total.after_total = cur.frames.size();
  if (cur.frames.empty()) {
    total.empty_outputs = 1;
    total.warnings.push_back({traj.traj_id, "EmptyOutput", "no frames survived cleaning"});
  }
  return {std::move(cur), std::move(total)};
}

DatasetCleanResult clean_dataset(std::span<const CfTrajectory> trajectories,
                                 const CleaningConfig& cfg) {
  DatasetCleanResult out;
  std::vector<CfTrajectory> staged;
  for (const auto& tr : trajectories) {
    CleanResult r = clean_pipeline(tr, cfg);
    out.report += r.report;
    if (!r.trajectory.frames.empty()) staged.push_back(std::move(r.trajectory));
  }

  if (cfg.outlier_scope == OutlierScope::PerDataset) {
    std::size_t total = 0;
    for (const auto& tr : staged) total += tr.frames.size();
    if (total >= 2) {
      std::map<Feature, FeatureBand> bands;
      for (Feature f : cfg.outlier_features) bands[f] = feature_band(staged, f);
      for (auto& tr : staged) {
        CleanResult r = remove_outliers_with_bands(tr, cfg, bands);
        out.report.outlier_frames_removed += r.report.outlier_frames_removed;
        out.report.after_total -= r.report.outlier_frames_removed;
        for (const auto& [f, n] : r.report.outliers_removed) out.report.outliers_removed[f] += n;
        out.report.warnings.insert(out.report.warnings.end(), r.report.warnings.begin(),
                                   r.report.warnings.end());
        tr = std::move(r.trajectory);
      }
    }
  }
  for (auto& tr : staged) {
    if (tr.frames.empty()) {
      ++out.report.empty_outputs;
      continue;
    }
    out.trajectories.push_back(std::move(tr));
  }
  return out;
}

}  // namespace trajkit
