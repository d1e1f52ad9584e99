// Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "cli_support.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "trajkit/calibrate.hpp"
#include "trajkit/clean.hpp"
#include "trajkit/kinematics.hpp"
#include "trajkit/pipeline.hpp"
#include "trajkit/uniform_csv.hpp"

using namespace trajkit;
using nlohmann::json;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome pass(std::string d) { return {Verdict::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::Fail, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

const CfModel kVanderbiltSuv{0.0165, -0.0067, 0.1532, -0.3921, 0.0};

std::vector<Sample> calibration_grid(int ns, int nv, int ndv) {
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(ns) * nv * ndv);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nv; ++j)
      for (int k = 0; k < ndv; ++k) {
        const double s = 5.0 + 55.0 * i / (ns - 1);
        const double v = 3.0 + 31.0 * j / (nv - 1);
        const double dv = -3.0 + 6.0 * k / (ndv - 1);
        out.push_back({s, v, dv, predict_accel(kVanderbiltSuv, s, v, dv)});
      }
  return out;
}

Outcome exact_recovery() {
  const auto samples = calibration_grid(25, 20, 20);
  const auto t0 = std::chrono::steady_clock::now();
  const auto fit = fit_linear_cf<double>(samples);
  const double elapsed = seconds_since(t0);
  const double err = (fit.model.coefficients() - kVanderbiltSuv.coefficients()).cwiseAbs().maxCoeff();
  const std::string d = "n=" + std::to_string(fit.n_samples) + " max|coef err|=" + num(err) +
                        " 1-R2=" + num(1.0 - fit.r_squared) + " t=" + num(elapsed) + "s";
  if (samples.size() == 10000 && err <= 1e-9 && fit.r_squared >= 1.0 - 1e-12 && elapsed < 1.0) return pass(d);
  return fail(d);
}

Outcome noisy_recovery() {
  auto samples = calibration_grid(50, 50, 40);
  double signal_mean = 0.0;
  for (const auto& s : samples) signal_mean += s.a;
  signal_mean /= static_cast<double>(samples.size());
  double signal_var = 0.0;
  for (const auto& s : samples) signal_var += (s.a - signal_mean) * (s.a - signal_mean);
  signal_var /= static_cast<double>(samples.size());

  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (auto& s : samples) s.a += noise(rng);

  const auto t0 = std::chrono::steady_clock::now();
  const auto fit = fit_linear_cf<double>(samples);
  const double elapsed = seconds_since(t0);

  std::vector<oracle::Row> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back({s.s, s.v, s.dv, s.a});
  const auto ref = oracle::least_squares(rows);

  const auto c = fit.model.coefficients();
  const auto truth = kVanderbiltSuv.coefficients();
  double worst_se = 0.0, oracle_gap = 0.0;
  for (int i = 0; i < 4; ++i) {
    worst_se = std::max(worst_se, std::abs(c(i) - truth(i)) / static_cast<double>(ref.std_error[i]));
    oracle_gap = std::max(oracle_gap, std::abs(c(i) - static_cast<double>(ref.beta[i])));
  }
  // Expected R^2 from the explained variance of the noiseless signal.
  const double expected_r2 = signal_var / (signal_var + 0.01);
  const double r2_gap_oracle = std::abs(fit.r_squared - static_cast<double>(ref.r_squared));
  const double r2_gap_expected = std::abs(fit.r_squared - expected_r2);
  const std::string d = "n=" + std::to_string(samples.size()) + " worst=" + num(worst_se, 3) + "SE" +
                        " |tool-oracle|=" + num(oracle_gap) + " R2=" + num(fit.r_squared) +
                        " expected=" + num(expected_r2) + " t=" + num(elapsed) + "s";
  const bool ok = samples.size() == 100000 && worst_se < 5.0 && oracle_gap < 1e-9 && r2_gap_oracle < 1e-9 &&
                  r2_gap_expected < 0.005 && elapsed < 5.0;
  return ok ? pass(d) : fail(d);
}

Outcome mean_state_consistency() {
  struct Case {
    const char* vehicle;
    CfModel model;
    double s, v, dv, mean_a;
  };
  // Published parameters with the mean state and mean acceleration of the matching dataset.
  const Case cases[] = {
      {"Vanderbilt SUV", {0.0165, -0.0067, 0.1532, -0.3921, 0}, 35.85, 29.23, 0.02, 0.01},
      {"Lincoln MKZ 2016", {0.0009, 0.1733, 0.3953, -4.0682, 0}, 42.17, 23.23, -0.01, -0.01},
      {"Lincoln MKZ 2017", {0.0012, 0.1940, 0.4022, -4.5568, 0}, 42.17, 23.23, -0.01, -0.01},
      {"Audi A6", {0.0038, -0.0010, 0.4346, -0.0645, 0}, 24.56, 18.49, 0.02, 0.01},
      {"BMW X5", {0.0061, -0.0014, 0.4838, -0.1214, 0}, 24.56, 18.49, 0.02, 0.01},
      {"Mercedes A-Class", {0.0057, -0.0049, 0.3910, -0.0447, 0}, 24.56, 18.49, 0.02, 0.01},
      {"Tesla Model 3", {0.0036, -0.0019, 0.5767, -0.0566, 0}, 24.56, 18.49, 0.02, 0.01},
  };
  std::string d;
  bool ok = true;
  for (const auto& c : cases) {
    const double pred = predict_accel(c.model, c.s, c.v, c.dv);
    ok = ok && std::abs(pred - c.mean_a) <= 0.05;
    d += std::string(d.empty() ? "" : "; ") + c.vehicle + " " + num(pred, 4);
  }
  const double suv = predict_accel(cases[0].model, 35.85, 29.23, 0.02);
  ok = ok && std::abs(suv - 0.00665) < 1e-5;
  return ok ? pass(d) : fail(d);
}

// One randomized trajectory with smooth in-band signals and a known set of
// planted violations.
struct Planted {
  CfTrajectory traj;
  TimeWindow keep;
  std::size_t trimmed = 0, slow = 0, hard_accel = 0, spikes = 0;
};

Planted planted_trajectory(std::size_t index, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> length(300, 900);
  std::uniform_real_distribution<double> phase(0.0, 6.283), unit(0.0, 1.0);
  Planted p;
  const std::size_t n = length(rng);
  const double duration = static_cast<double>(n) / 10.0;
  p.keep = {std::round(unit(rng) * 50.0) / 10.0, duration - std::round(unit(rng) * 50.0) / 10.0};

  std::vector<std::size_t> inside;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / 10.0;
    if (t >= p.keep.start_s - 1e-9 && t < p.keep.end_s - 1e-9) inside.push_back(k);
    else ++p.trimmed;
  }
  std::shuffle(inside.begin(), inside.end(), rng);
  std::vector<int> kind(n, 0);
  const std::size_t budget = inside.size() / 100;  // spikes stay at or under 1% of kept frames
  std::uniform_int_distribution<std::size_t> count(0, std::max<std::size_t>(budget, 1));
  std::size_t next = 0;
  auto plant = [&](int k, std::size_t how_many, std::size_t& tally) {
    for (std::size_t i = 0; i < how_many && next < inside.size(); ++i, ++next, ++tally) kind[inside[next]] = k;
  };
  plant(1, count(rng), p.slow);
  plant(2, count(rng), p.hard_accel);
  plant(3, std::min(count(rng), budget), p.spikes);

  const double ph[4] = {phase(rng), phase(rng), phase(rng), phase(rng)};
  const double base_gap = 20.0 + 30.0 * unit(rng);
  const double base_speed = 5.0 + 25.0 * unit(rng);
  const std::string id = "synthetic_" + std::to_string(index);
  p.traj = fixtures::make_trajectory(id, n, 10.0, [&](std::size_t k) {
    const double x = static_cast<double>(k) * 0.05;
    fixtures::FrameValues v{base_speed + 1.5 * std::sin(x + ph[0]), base_speed + 1.5 * std::sin(x + ph[1]),
                            base_gap + 4.0 * std::sin(0.7 * x + ph[2]), 0.4 * std::sin(1.3 * x + ph[3])};
    if (kind[k] == 1) (unit(rng) < 0.5 ? v.follower_speed : v.leader_speed) = 0.03;
    if (kind[k] == 2) v.accel = unit(rng) < 0.5 ? -5.0 - 0.01 - 3.0 * unit(rng) : 5.01 + 3.0 * unit(rng);
    if (kind[k] == 3) v.spacing = 1000.0 + 100.0 * unit(rng);
    return v;
  });
  return p;
}

// Independent recount on one trajectory: frames surviving trim and thresholds,
// then the sigma band of each feature over exactly those frames.
struct Recount {
  std::size_t trimmed = 0, slow = 0, hard_accel = 0;
  std::map<Feature, std::size_t> outside;
  std::map<Feature, std::pair<double, double>> band;
};

Recount recount(const CfTrajectory& tr, const TimeWindow& keep) {
  Recount r;
  std::vector<const UniformFrame*> kept;
  for (const auto& f : tr.frames) {
    if (!(f.t >= keep.start_s - 1e-9 && f.t < keep.end_s - 1e-9)) {
      ++r.trimmed;
    } else if (f.leader_speed < 0.1 || f.follower_speed < 0.1) {
      ++r.slow;
    } else if (std::abs(f.follower_acceleration) > 5.0) {
      ++r.hard_accel;
    } else {
      kept.push_back(&f);
    }
  }
  for (Feature feat : kAllFeatures) {
    std::vector<double> xs;
    for (const auto* f : kept) xs.push_back(feature_value(*f, feat));
    const auto ms = oracle::mean_std(xs);
    r.band[feat] = {ms.mean - 3.0 * ms.std, ms.mean + 3.0 * ms.std};
    r.outside[feat] = static_cast<std::size_t>(std::count_if(xs.begin(), xs.end(), [&](double x) {
      return x < r.band[feat].first || x > r.band[feat].second;
    }));
  }
  return r;
}

Outcome cleaning_invariants() {
  std::mt19937_64 rng(4242);
  CleaningConfig cfg;
  std::vector<Planted> cases;
  for (std::size_t i = 0; i < 1000; ++i) {
    cases.push_back(planted_trajectory(i, rng));
    cfg.trim_windows[cases.back().traj.traj_id] = {cases.back().keep};
  }
  std::size_t mismatched = 0, violating = 0, planted_total = 0;
  CleaningReport summed;
  for (const auto& c : cases) {
    const auto res = clean_pipeline(c.traj, cfg);
    summed += res.report;
    const Recount rc = recount(c.traj, c.keep);
    planted_total += c.trimmed + c.slow + c.hard_accel + c.spikes;
    auto removed = [&](Feature f) {
      const auto it = res.report.outliers_removed.find(f);
      return it == res.report.outliers_removed.end() ? std::size_t{0} : it->second;
    };
    const bool counts_ok =
        res.report.frames_trimmed == c.trimmed && rc.trimmed == c.trimmed &&
        res.report.speed_floor_dropped == c.slow && rc.slow == c.slow &&
        res.report.accel_bound_dropped == c.hard_accel && rc.hard_accel == c.hard_accel &&
        removed(Feature::Spacing) == c.spikes && rc.outside.at(Feature::Spacing) == c.spikes &&
        removed(Feature::FollowerSpeed) == 0 && removed(Feature::SpeedDiff) == 0 &&
        removed(Feature::FollowerAcceleration) == 0 && res.report.outlier_frames_removed == c.spikes &&
        res.report.after_total == c.traj.frames.size() - c.trimmed - c.slow - c.hard_accel - c.spikes;
    if (!counts_ok) ++mismatched;
    for (const auto& f : res.trajectory.frames) {
      bool bad = f.leader_speed < 0.1 || f.follower_speed < 0.1 || std::abs(f.follower_acceleration) > 5.0;
      for (Feature feat : kAllFeatures) {
        const double v = feature_value(f, feat);
        bad = bad || v < rc.band.at(feat).first || v > rc.band.at(feat).second;
      }
      if (bad) ++violating;
    }
  }
  std::vector<CfTrajectory> all;
  for (const auto& c : cases) all.push_back(c.traj);
  const auto pooled = clean_dataset(all, cfg);
  const bool aggregate_ok = pooled.report.removals() == planted_total && summed.removals() == planted_total;
  const std::string d = "trajectories=1000 planted=" + std::to_string(planted_total) +
                        " count_mismatches=" + std::to_string(mismatched) +
                        " violating_frames=" + std::to_string(violating) +
                        " aggregate_removals=" + std::to_string(pooled.report.removals());
  return (mismatched == 0 && violating == 0 && aggregate_ok) ? pass(d) : fail(d);
}

Outcome geodesy() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> lat(-60.0, 60.0), lon(-180.0, 180.0), off(-0.6, 0.6);
  double worst = 0.0;
  int checked = 0;
  while (checked < 50) {
    const double a = lat(rng), b = lon(rng), c = a + off(rng), d = b + off(rng);
    const double ref = oracle::great_circle_m(a, b, c, d);
    if (ref >= 100000.0 || ref == 0.0) continue;
    worst = std::max(worst, std::abs(haversine_m(a, b, c, d) - ref) / ref);
    ++checked;
  }
  const double equator = haversine_m(0.0, 0.0, 0.0, 1.0);
  const std::string d = "pairs=50 worst_rel=" + num(worst, 3) + " equator_1deg=" + num(equator, 10) + "m";
  return (worst <= 1e-6 && std::abs(equator - 111194.93) <= 0.01) ? pass(d) : fail(d);
}

Outcome schema_conformance() {
  const std::string expected =
      "traj_id,frame_id,leader_id,leader_type,leader_speed,follower_id,follower_type,"
      "follower_speed,follower_acceleration,spacing,speed_diff\n";
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  std::vector<CfTrajectory> trajs;
  std::map<std::string, TrajectoryHeader> headers;
  for (int i = 0; i < 5; ++i) {
    auto tr = fixtures::make_trajectory("rt" + std::to_string(i), 400, 10.0, [&](std::size_t) {
      const double l = fixtures::q6(std::abs(u(rng))), f = fixtures::q6(std::abs(u(rng)));
      return fixtures::FrameValues{l, f, fixtures::q6(std::abs(u(rng)) + 2.0), fixtures::q6(u(rng) / 10.0)};
    });
    for (auto& f : tr.frames) f.speed_diff = fixtures::q6(f.speed_diff);
    headers[tr.traj_id] = {10.0, tr.provenance};
    trajs.push_back(std::move(tr));
  }
  std::ostringstream first;
  write_uniform_csv(first, trajs);
  std::istringstream in(first.str());
  const auto back = read_uniform_csv(in, headers, 10.0);
  std::ostringstream second;
  write_uniform_csv(second, back);

  bool values_equal = back.size() == trajs.size();
  for (std::size_t i = 0; values_equal && i < back.size(); ++i) values_equal = back[i].frames == trajs[i].frames;
  const bool header_ok = first.str().compare(0, expected.size(), expected) == 0;
  const std::string d = std::string("header ") + (header_ok ? "identical" : "differs") + ", round trip " +
                        (values_equal ? "value-identical" : "differs") + ", re-export " +
                        (first.str() == second.str() ? "byte-identical" : "differs");
  return (header_ok && values_equal && first.str() == second.str()) ? pass(d) : fail(d);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Outcome openacc_reproduction() {
  const char* cfg_path = std::getenv("TRAJKIT_OPENACC_CONFIG");
  if (!cfg_path || !*cfg_path) return {Verdict::Skip, "set TRAJKIT_OPENACC_CONFIG to a run config over the AstaZero files"};
  const auto dir = cli::scratch_dir("openacc");
  const auto r = cli::run("pipeline --config \"" + std::string(cfg_path) + "\" --out \"" + (dir / "out").string() + "\"", dir);
  if (r.exit_code == 2) return fail("pipeline failed: " + r.stderr_text);
  const json stats = json::parse(cli::slurp(dir / "out" / kStatsJson));
  const json cal = json::parse(cli::slurp(dir / "out" / kCalibrationJson));

  const double spacing = stats["features"]["spacing"]["mean"].get<double>();
  const double speed = stats["features"]["follower_speed"]["mean"].get<double>();
  bool ok = std::abs(spacing - 24.56) <= 0.05 * 24.56 && std::abs(speed - 18.49) <= 0.05 * 18.49;
  std::string d = "mean spacing=" + num(spacing, 4) + " mean v=" + num(speed, 4);

  struct Row {
    const char* key;
    double r2, f_dv;
  };
  const Row rows[] = {{"audi", 0.6318, 0.4346}, {"bmw", 0.6318, 0.4838}, {"mercedes", 0.6556, 0.3910},
                      {"tesla", 0.7075, 0.5767}};
  for (const auto& row : rows) {
    const json* hit = nullptr;
    for (const auto& res : cal["results"])
      if (lower(res["vehicle"].get<std::string>()).find(row.key) != std::string::npos) hit = &res;
    if (!hit) {
      ok = false;
      d += std::string("; ") + row.key + " missing";
      continue;
    }
    const double r2 = (*hit)["r_squared"].get<double>(), fdv = (*hit)["f_dv"].get<double>();
    ok = ok && std::abs(r2 - row.r2) <= 0.05 && std::abs(fdv - row.f_dv) <= 0.05;
    d += std::string("; ") + row.key + " R2=" + num(r2, 4) + " f_dv=" + num(fdv, 4);
  }
  std::filesystem::remove_all(dir);
  return ok ? pass(d) : fail(d);
}

Outcome determinism() {
  const auto dir = cli::scratch_dir("acceptance_determinism");
  cli::write_wide_platoon(dir / "platoon.csv", 4, 180.0);
  const auto cfg = cli::write_config(
      dir, {{"profile", "openacc"}, {"inputs", {"platoon.csv"}}, {"output_dir", "out"}, {"calibration", {{"delay_s", 2.0}}}});
  auto snapshot = [&](const std::string& out) {
    std::map<std::string, std::string> files;
    const auto rc = cli::run("pipeline --config " + cfg.string() + " --out " + (dir / out).string(), dir).exit_code;
    for (const auto& e : std::filesystem::directory_iterator(dir / out)) files[e.path().filename().string()] = cli::slurp(e.path());
    return std::make_pair(rc, files);
  };
  const auto a = snapshot("run1");
  const auto b = snapshot("run2");
  std::filesystem::remove_all(dir);
  const std::string d = "exit codes " + std::to_string(a.first) + "/" + std::to_string(b.first) + ", " +
                        std::to_string(a.second.size()) + " files compared";
  return (a.first == 0 && b.first == 0 && !a.second.empty() && a.second == b.second) ? pass(d) : fail(d);
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"1 exact calibration recovery", exact_recovery},
      {"2 noisy calibration recovery", noisy_recovery},
      {"3 mean-state consistency", mean_state_consistency},
      {"4 cleaning invariants", cleaning_invariants},
      {"5 geodesy oracle", geodesy},
      {"6 schema conformance", schema_conformance},
      {"7 OpenACC reproduction", openacc_reproduction},
      {"8 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    if (o.verdict == Verdict::Fail) ++failures;
    std::cout << tag << "  " << name << "  (" << o.detail << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
