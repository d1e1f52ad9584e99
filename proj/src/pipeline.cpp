#include "trajkit/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "trajkit/csv_reader.hpp"
#include "trajkit/error.hpp"
#include "trajkit/kinematics.hpp"

namespace trajkit {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

json path_list(const std::vector<std::filesystem::path>& paths) {
  json arr = json::array();
  for (const auto& p : paths) arr.push_back(p.string());
  return arr;
}

json stage_provenance(const RunConfig& cfg, const std::string& stage,
                      const std::vector<std::filesystem::path>& inputs) {
  return {{"tool", "trajkit"},
          {"tool_version", kToolVersion},
          {"stage", stage},
          {"config_hash", config_hash(cfg.document)},
          {"inputs", path_list(inputs)}};
}

void apply_group_overrides(PlatoonRecord& rec, const InputGroup& group) {
  for (std::size_t i = 0; i < rec.tracks.size(); ++i) {
    if (i < group.vehicle_ids.size()) rec.tracks[i].vehicle_id = rec.order[i] = group.vehicle_ids[i];
    if (i < group.vehicle_types.size()) rec.tracks[i].vehicle_type = group.vehicle_types[i];
  }
}

void ingest_group(const RunConfig& cfg, const InputGroup& group, IngestOutcome& out) {
  for (const auto& f : group.files) {
    if (!std::filesystem::exists(f)) throw Error(ErrorCode::MissingInput, f.string());
  }
  PlatoonRecord rec = ingest_files(group.files, cfg.profile);
  apply_group_overrides(rec, group);
  const auto dataset = std::string(to_string(cfg.profile.name));

  std::vector<std::vector<VehicleTrack>> segments(rec.tracks.size());
  for (std::size_t i = 0; i < rec.tracks.size(); ++i) {
    try {
      segments[i] = interpolate_gaps(rec.tracks[i], cfg.cleaning.max_gap, cfg.cleaning.min_duration_s).segments;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllInvalid) throw;
      out.skipped.push_back({{"source", rec.source}, {"vehicle", rec.order[i]}, {"reason", e.what()}});
    }
  }

  for (std::size_t i = 0; i + 1 < rec.tracks.size(); ++i) {
    const std::string base = group.label + "_" + rec.order[i] + "_" + rec.order[i + 1];
    std::size_t produced = 0;
    for (const auto& lead_seg : segments[i]) {
      for (const auto& follow_seg : segments[i + 1]) {
        if (lead_seg.fixes.back().t < follow_seg.fixes.front().t ||
            follow_seg.fixes.back().t < lead_seg.fixes.front().t) {
          continue;
        }
        const std::string id = produced == 0 ? base : base + "_s" + std::to_string(produced);
        PlatoonRecord pair{{lead_seg.vehicle_id, follow_seg.vehicle_id}, {lead_seg, follow_seg}, rec.source};
        try {
          RawPair raw = pair_tracks(pair, 0, 1, id, dataset);
          raw.trajectory.provenance.parameters["leader_index"] = std::to_string(i);
          raw.trajectory.provenance.parameters["follower_index"] = std::to_string(i + 1);
          out.trajectories.push_back(derive_kinematics(raw.trajectory, raw.leader, raw.follower));
          ++produced;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::InsufficientOverlap) throw;
          out.skipped.push_back({{"source", rec.source}, {"pair", base}, {"reason", e.what()}});
        }
      }
    }
  }
}

void sort_by_id(std::vector<CfTrajectory>& trajs) {
  std::stable_sort(trajs.begin(), trajs.end(),
                   [](const CfTrajectory& a, const CfTrajectory& b) { return a.traj_id < b.traj_id; });
}

std::string fmt(double v, int decimals = 6) { return csv::format_fixed(v, decimals); }

}  // namespace

std::filesystem::path provenance_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".provenance.json");
  return p;
}

json error_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
}

IngestOutcome ingest_inputs(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw Error(ErrorCode::MissingInput, "config lists no inputs");
  IngestOutcome out;
  for (const auto& group : cfg.inputs) {
    if (group.files.empty()) throw Error(ErrorCode::MissingInput, "input group '" + group.label + "' has no files");
    ingest_group(cfg, group, out);
  }
  sort_by_id(out.trajectories);
  return out;
}

std::vector<CfTrajectory> load_uniform(const std::filesystem::path& csv, double default_rate_hz) {
  std::ifstream in(csv);
  if (!in) throw Error(ErrorCode::MissingInput, csv.string());
  std::map<std::string, TrajectoryHeader> headers;
  if (std::ifstream side(provenance_path(csv)); side) {
    json j;
    try {
      j = json::parse(side);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, provenance_path(csv).string() + ": " + e.what());
    }
    const json trajs = j.value("trajectories", json::object());
    for (const auto& [id, h] : trajs.items()) headers[id] = header_from_json(h);
  }
  return read_uniform_csv(in, headers, default_rate_hz);
}

void save_uniform(const std::filesystem::path& csv, std::span<const CfTrajectory> trajectories,
                  const RunConfig& cfg, const std::string& stage,
                  const std::vector<std::filesystem::path>& inputs, const json& extra) {
  {
    auto out = open_output(csv);
    write_uniform_csv(out, trajectories);
  }
  json prov = stage_provenance(cfg, stage, inputs);
  prov["outputs"] = json::array({csv.filename().string()});
  json trajs = json::object();
  for (const auto& tr : trajectories) trajs[tr.traj_id] = to_json(tr.provenance, tr.sample_rate_hz);
  prov["trajectories"] = trajs;
  for (const auto& [k, v] : extra.items()) prov[k] = v;
  write_json(provenance_path(csv), prov);
}

int cmd_ingest(const RunConfig& cfg) {
  IngestOutcome res = ingest_inputs(cfg);
  std::vector<std::filesystem::path> inputs;
  for (const auto& g : cfg.inputs) inputs.insert(inputs.end(), g.files.begin(), g.files.end());
  save_uniform(cfg.output_dir / kRawCsv, res.trajectories, cfg, "ingest", inputs,
               {{"skipped", res.skipped}, {"profile", to_json(cfg.profile)}});
  return kExitOk;
}

int cmd_clean(const RunConfig& cfg) {
  const auto input = cfg.output_dir / kRawCsv;
  auto trajs = load_uniform(input, cfg.profile.declared_rate_hz);
  DatasetCleanResult res = clean_dataset(trajs, cfg.cleaning);
  for (auto& tr : res.trajectories) {
    // Audit columns no longer line up with frames once rows are dropped.
    tr.provenance.derived_spacing.clear();
    tr.provenance.derived_acceleration.clear();
  }
  sort_by_id(res.trajectories);
  if (cfg.emit.uniform_csv) {
    save_uniform(cfg.output_dir / kCleanCsv, res.trajectories, cfg, "clean", {kRawCsv},
                 {{"cleaning", to_json(cfg.cleaning)}});
  }
  if (cfg.emit.cleaning_report) {
    json rep = to_json(res.report);
    rep["provenance"] = stage_provenance(cfg, "clean", {kRawCsv});
    write_json(cfg.output_dir / kCleaningReportJson, rep);
  }
  return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
  const auto input = cfg.output_dir / kCleanCsv;
  const auto trajs = load_uniform(input, cfg.profile.declared_rate_hz);
  int exit_code = kExitOk;
  std::vector<std::string> outputs;

  if (cfg.emit.stats || cfg.emit.histograms) {
    try {
      const FeatureStats st = compute_feature_stats(trajs);
      if (cfg.emit.stats) {
        auto out = open_output(cfg.output_dir / kStatsCsv);
        out << "measure";
        for (Feature f : kAllFeatures) out << ',' << to_string(f);
        out << '\n';
        auto row = [&](const char* name, auto getter) {
          out << name;
          for (Feature f : kAllFeatures) out << ',' << fmt(getter(st[f]));
          out << '\n';
        };
        row("max", [](const RunningStats& s) { return s.max(); });
        row("min", [](const RunningStats& s) { return s.min(); });
        row("mean", [](const RunningStats& s) { return s.mean(); });
        row("std", [](const RunningStats& s) { return s.std(); });
        out << "n_samples";
        for (std::size_t i = 0; i < kAllFeatures.size(); ++i) out << ',' << st.n_samples;
        out << "\nn_trajectories";
        for (std::size_t i = 0; i < kAllFeatures.size(); ++i) out << ',' << st.n_trajectories;
        out << '\n';
        write_json(cfg.output_dir / kStatsJson, to_json(st));
        outputs.insert(outputs.end(), {kStatsCsv, kStatsJson});
      }
      if (cfg.emit.histograms) {
        for (Feature f : kAllFeatures) {
          const auto values = feature_values(trajs, f);
          const Histogram h = histogram(values, cfg.histogram_bins, std::string(to_string(f)));
          const std::string name = "histogram_" + h.feature + ".csv";
          auto out = open_output(cfg.output_dir / name);
          out << "bin_left,bin_right,count\n";
          for (std::size_t i = 0; i < h.counts.size(); ++i) {
            out << fmt(h.bin_edges[i]) << ',' << fmt(h.bin_edges[i + 1]) << ',' << h.counts[i] << '\n';
          }
          outputs.push_back(name);
        }
      }
    } catch (const Error& e) {
      write_json(cfg.output_dir / "stats_error.json", error_json(e));
      exit_code = kExitPartial;
    }
  }

  if (cfg.emit.calibration) {
    std::set<std::string> vehicles(cfg.calibrate_vehicles.begin(), cfg.calibrate_vehicles.end());
    if (vehicles.empty()) {
      for (const auto& tr : trajs)
        if (!tr.frames.empty()) vehicles.insert(tr.frames.front().follower_id);
    }
    json results = json::array();
    json errors = json::array();
    auto csv_out = open_output(cfg.output_dir / kCalibrationCsv);
    csv_out << kCalibrationHeader << '\n';
    for (const auto& vehicle : vehicles) {
      std::vector<CfTrajectory> mine;
      for (const auto& tr : trajs)
        if (!tr.frames.empty() && tr.frames.front().follower_id == vehicle) mine.push_back(tr);
      try {
        if (mine.empty()) throw Error(ErrorCode::TooFewSamples, "no trajectories for '" + vehicle + "'");
        const Calibration c = calibrate_vehicle(mine, cfg.calibration);
        csv_out << vehicle << ',' << fmt(c.r_squared, 8) << ',' << fmt(c.model.f_s, 8) << ','
                << fmt(c.model.f_v, 8) << ',' << fmt(c.model.f_dv, 8) << ',' << fmt(c.model.z, 8) << ','
                << c.n_samples << '\n';
        json row = to_json(c);
        row["vehicle"] = vehicle;
        row["n_trajectories"] = mine.size();
        results.push_back(row);
      } catch (const Error& e) {
        json row = error_json(e);
        row["vehicle"] = vehicle;
        errors.push_back(row);
        exit_code = kExitPartial;
      }
    }
    write_json(cfg.output_dir / kCalibrationJson, {{"results", results}, {"errors", errors}});
    outputs.insert(outputs.end(), {kCalibrationCsv, kCalibrationJson});
  }

  json prov = stage_provenance(cfg, "report", {kCleanCsv});
  prov["outputs"] = outputs;
  write_json(cfg.output_dir / "report.provenance.json", prov);
  return exit_code;
}

int cmd_pipeline(const RunConfig& cfg) {
  int code = cmd_ingest(cfg);
  code = std::max(code, cmd_clean(cfg));
  return std::max(code, cmd_report(cfg));
}

}  // namespace trajkit
