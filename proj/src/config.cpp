#include "trajkit/config.hpp"

#include <cstdio>
#include <fstream>

#include "trajkit/error.hpp"

namespace trajkit {
namespace {

json columns_to_json(const ColumnMap& cols) {
  json j = json::object();
  for (const auto& [field, name] : cols) j[std::string(to_string(field))] = name;
  return j;
}

ColumnMap columns_from_json(const json& j) {
  ColumnMap cols;
  for (const auto& [key, value] : j.items()) {
    auto field = parse_field(key);
    if (!field) throw Error(ErrorCode::InvalidConfig, "unknown column field '" + key + "'");
    cols[*field] = value.get<std::string>();
  }
  return cols;
}

VehicleType type_from_json(const json& j) {
  const int v = j.get<int>();
  if (v != 0 && v != 1) throw Error(ErrorCode::InvalidConfig, "vehicle type must be 0 or 1");
  return static_cast<VehicleType>(v);
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string(what) + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

json to_json(const DatasetProfile& p) {
  json j;
  j["name"] = to_string(p.name);
  j["layout"] = to_string(p.layout);
  j["time_unit"] = p.time_unit;
  j["declared_rate_hz"] = p.declared_rate_hz;
  j["comment_prefix"] = p.comment_prefix;
  json slots = json::array();
  for (const auto& s : p.slots) {
    slots.push_back({{"vehicle_id", s.vehicle_id},
                     {"type", static_cast<int>(s.type)},
                     {"columns", columns_to_json(s.columns)}});
  }
  j["slots"] = slots;
  if (p.slot_template) {
    j["slot_template"] = {{"columns", columns_to_json(p.slot_template->columns)},
                          {"id_pattern", p.slot_template->id_pattern},
                          {"first_type", static_cast<int>(p.slot_template->first_type)},
                          {"other_type", static_cast<int>(p.slot_template->other_type)}};
  }
  return j;
}

DatasetProfile profile_from_json(const json& j) {
  return guarded("profile", [&] {
    DatasetProfile p;
    const auto name = j.value("name", std::string("custom"));
    auto parsed_name = parse_dataset_name(name);
    if (!parsed_name) throw Error(ErrorCode::UnknownProfile, name);
    p.name = *parsed_name;
    const auto layout = j.at("layout").get<std::string>();
    auto parsed_layout = parse_layout(layout);
    if (!parsed_layout) throw Error(ErrorCode::InvalidConfig, "unknown layout '" + layout + "'");
    p.layout = *parsed_layout;
    p.time_unit = j.value("time_unit", 1.0);
    p.declared_rate_hz = j.at("declared_rate_hz").get<double>();
    p.comment_prefix = j.value("comment_prefix", std::string("#"));
    for (const auto& s : j.value("slots", json::array())) {
      p.slots.push_back({s.at("vehicle_id").get<std::string>(), type_from_json(s.value("type", json(1))),
                         columns_from_json(s.at("columns"))});
    }
    if (j.contains("slot_template") && !j["slot_template"].is_null()) {
      const auto& t = j["slot_template"];
      SlotTemplate tpl;
      tpl.columns = columns_from_json(t.at("columns"));
      tpl.id_pattern = t.value("id_pattern", tpl.id_pattern);
      tpl.first_type = type_from_json(t.value("first_type", json(0)));
      tpl.other_type = type_from_json(t.value("other_type", json(1)));
      p.slot_template = tpl;
    }
    validate_profile(p);
    return p;
  });
}

DatasetProfile resolve_profile(const json& profile, const json& overrides) {
  json base;
  if (profile.is_string()) {
    base = to_json(builtin_profile(profile.get<std::string>()));
  } else if (profile.is_object()) {
    base = profile;
  } else {
    throw Error(ErrorCode::InvalidConfig, "profile must be a name or an object");
  }
  if (!overrides.is_null()) base.merge_patch(overrides);
  return profile_from_json(base);
}

json to_json(const CleaningConfig& c) {
  json windows = json::object();
  for (const auto& [id, ws] : c.trim_windows) {
    json arr = json::array();
    for (const auto& w : ws) arr.push_back({w.start_s, w.end_s});
    windows[id] = arr;
  }
  json features = json::array();
  for (Feature f : c.outlier_features) features.push_back(to_string(f));
  return {{"sigma_k", c.sigma_k},
          {"speed_floor", c.speed_floor},
          {"accel_bound", c.accel_bound},
          {"max_gap", c.max_gap},
          {"min_duration_s", c.min_duration_s},
          {"speed_floor_mode", c.speed_floor_mode == SpeedFloorMode::Either ? "either" : "both"},
          {"outlier_scope", c.outlier_scope == OutlierScope::PerTrajectory ? "trajectory" : "dataset"},
          {"outlier_features", features},
          {"trim_windows", windows}};
}

CleaningConfig cleaning_from_json(const json& j) {
  return guarded("cleaning", [&] {
    CleaningConfig c;
    c.sigma_k = j.value("sigma_k", c.sigma_k);
    c.speed_floor = j.value("speed_floor", c.speed_floor);
    c.accel_bound = j.value("accel_bound", c.accel_bound);
    const auto max_gap = j.value("max_gap", static_cast<std::int64_t>(c.max_gap));
    if (max_gap < 1) throw Error(ErrorCode::InvalidConfig, "max_gap must be >= 1");
    c.max_gap = static_cast<std::size_t>(max_gap);
    c.min_duration_s = j.value("min_duration_s", c.min_duration_s);
    const auto mode = j.value("speed_floor_mode", std::string("either"));
    if (mode == "either") c.speed_floor_mode = SpeedFloorMode::Either;
    else if (mode == "both") c.speed_floor_mode = SpeedFloorMode::Both;
    else throw Error(ErrorCode::InvalidConfig, "speed_floor_mode must be 'either' or 'both'");
    const auto scope = j.value("outlier_scope", std::string("trajectory"));
    if (scope == "trajectory") c.outlier_scope = OutlierScope::PerTrajectory;
    else if (scope == "dataset") c.outlier_scope = OutlierScope::PerDataset;
    else throw Error(ErrorCode::InvalidConfig, "outlier_scope must be 'trajectory' or 'dataset'");
    if (j.contains("outlier_features")) {
      c.outlier_features.clear();
      for (const auto& f : j["outlier_features"]) {
        auto feat = parse_feature(f.get<std::string>());
        if (!feat) throw Error(ErrorCode::InvalidConfig, "unknown feature " + f.dump());
        c.outlier_features.push_back(*feat);
      }
    }
    const json windows = j.value("trim_windows", json::object());
    for (const auto& [id, ws] : windows.items()) {
      auto& dst = c.trim_windows[id];
      for (const auto& w : ws) dst.push_back({w.at(0).get<double>(), w.at(1).get<double>()});
    }
    validate_config(c);
    return c;
  });
}

json to_json(const CleaningReport& r) {
  json outliers = json::object();
  for (Feature f : kAllFeatures) {
    auto it = r.outliers_removed.find(f);
    outliers[std::string(to_string(f))] = it == r.outliers_removed.end() ? 0 : it->second;
  }
  json warnings = json::array();
  for (const auto& w : r.warnings) {
    warnings.push_back({{"traj_id", w.traj_id}, {"code", w.code}, {"detail", w.detail}});
  }
  return {{"before_total", r.before_total},
          {"after_total", r.after_total},
          {"interpolated_points", r.interpolated_points},
          {"frames_trimmed", r.frames_trimmed},
          {"frames_threshold_dropped", r.frames_threshold_dropped},
          {"speed_floor_dropped", r.speed_floor_dropped},
          {"accel_bound_dropped", r.accel_bound_dropped},
          {"outliers_removed", outliers},
          {"outlier_frames_removed", r.outlier_frames_removed},
          {"discarded_segments", r.discarded_segments},
          {"empty_outputs", r.empty_outputs},
          {"warnings", warnings}};
}

json to_json(const FeatureStats& st) {
  json j;
  for (Feature f : kAllFeatures) {
    const auto& s = st[f];
    j["features"][std::string(to_string(f))] = {
        {"max", s.max()}, {"min", s.min()}, {"mean", s.mean()}, {"std", s.std()}};
  }
  j["n_samples"] = st.n_samples;
  j["n_trajectories"] = st.n_trajectories;
  return j;
}

json to_json(const Calibration& r) {
  return {{"r_squared", r.r_squared},      {"f_s", r.model.f_s},
          {"f_v", r.model.f_v},            {"f_dv", r.model.f_dv},
          {"z", r.model.z},                {"delay_s", r.model.delay_s},
          {"n_samples", r.n_samples},      {"residual_sse", r.residual_sse}};
}

json to_json(const Provenance& p, double sample_rate_hz) {
  json j = {{"sample_rate_hz", sample_rate_hz},
            {"time_origin_s", p.time_origin_s},
            {"dataset", p.dataset},
            {"source_file", p.source_file},
            {"parameters", p.parameters},
            {"interpolated_points", p.interpolated_points}};
  if (!p.derived_spacing.empty()) {
    json arr = json::array();
    for (double v : p.derived_spacing) arr.push_back(is_set(v) ? json(v) : json());
    j["derived_spacing"] = arr;
  }
  if (!p.derived_acceleration.empty()) {
    json arr = json::array();
    for (double v : p.derived_acceleration) arr.push_back(is_set(v) ? json(v) : json());
    j["derived_acceleration"] = arr;
  }
  return j;
}

TrajectoryHeader header_from_json(const json& j) {
  return guarded("provenance", [&] {
    TrajectoryHeader h;
    h.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    h.provenance.time_origin_s = j.value("time_origin_s", 0.0);
    h.provenance.dataset = j.value("dataset", std::string());
    h.provenance.source_file = j.value("source_file", std::string());
    h.provenance.parameters = j.value("parameters", std::map<std::string, std::string>{});
    h.provenance.interpolated_points = j.value("interpolated_points", std::size_t{0});
    auto read_audit = [&j](const char* key, std::vector<double>& dst) {
      if (!j.contains(key)) return;
      for (const auto& v : j[key]) dst.push_back(v.is_null() ? kUnset : v.get<double>());
    };
    read_audit("derived_spacing", h.provenance.derived_spacing);
    read_audit("derived_acceleration", h.provenance.derived_acceleration);
    return h;
  });
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  return guarded("config", [&] {
    RunConfig rc;
    rc.document = j;
    rc.profile = resolve_profile(j.value("profile", json("custom")),
                                 j.value("profile_overrides", json()));
    for (const auto& in : j.value("inputs", json::array())) {
      InputGroup g;
      if (in.is_string()) {
        g.files.push_back(resolve(base_dir, in.get<std::string>()));
      } else {
        for (const auto& f : in.at("files")) g.files.push_back(resolve(base_dir, f.get<std::string>()));
        g.label = in.value("label", std::string());
        g.vehicle_ids = in.value("vehicle_ids", std::vector<std::string>{});
        for (const auto& t : in.value("vehicle_types", json::array())) g.vehicle_types.push_back(type_from_json(t));
      }
      if (g.label.empty() && !g.files.empty()) g.label = g.files.front().stem().string();
      rc.inputs.push_back(std::move(g));
    }
    rc.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
    rc.cleaning = cleaning_from_json(j.value("cleaning", json::object()));
    const json cal = j.value("calibration", json::object());
    rc.calibration.delay_s = cal.value("delay_s", 0.0);
    rc.calibrate_vehicles = cal.value("vehicles", std::vector<std::string>{});
    const auto bins = j.value("histogram_bins", static_cast<std::int64_t>(kDefaultHistogramBins));
    if (bins < 1) throw Error(ErrorCode::InvalidConfig, "histogram_bins must be >= 1");
    rc.histogram_bins = static_cast<std::size_t>(bins);
    const json emit = j.value("emit", json::object());
    rc.emit.uniform_csv = emit.value("uniform_csv", true);
    rc.emit.cleaning_report = emit.value("cleaning_report", true);
    rc.emit.stats = emit.value("stats", true);
    rc.emit.histograms = emit.value("histograms", true);
    rc.emit.calibration = emit.value("calibration", true);
    return rc;
  });
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::optional<std::string>& profile_name,
                          const std::optional<std::filesystem::path>& output_dir) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, "config " + path.string());
  json j = guarded("config", [&] { return json::parse(in); });
  if (profile_name) j["profile"] = *profile_name;
  if (output_dir) j["output_dir"] = std::filesystem::absolute(*output_dir).string();
  return run_config_from_json(j, path.parent_path());
}

std::string config_hash(const json& document) {
  // The output location does not affect results.
  json canonical = document;
  if (canonical.is_object()) canonical.erase("output_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace trajkit
