#include "trajkit/ingest.hpp"

#include <algorithm>
#include <fstream>

#include "trajkit/csv_reader.hpp"
#include "trajkit/error.hpp"

namespace trajkit {
namespace {

std::string expand(std::string pattern, std::size_t i) {
  auto replace_all = [&pattern](std::string_view key, const std::string& value) {
    for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos)) {
      pattern.replace(pos, key.size(), value);
      pos += value.size();
    }
  };
  replace_all("{i}", std::to_string(i));
  replace_all("{p}", std::to_string(i - 1));
  return pattern;
}

VehicleSlot expand_slot(const SlotTemplate& tpl, std::size_t i) {
  VehicleSlot slot;
  slot.vehicle_id = expand(tpl.id_pattern, i);
  slot.type = i == 1 ? tpl.first_type : tpl.other_type;
  for (const auto& [field, pattern] : tpl.columns) {
    if (i == 1 && pattern.find("{p}") != std::string::npos) continue;
    slot.columns.emplace(field, expand(pattern, i));
  }
  return slot;
}

std::size_t column_index(std::span<const std::string> header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, name);
  return static_cast<std::size_t>(it - header.begin());
}

// Resolved column positions for one slot.
struct SlotColumns {
  std::map<Field, std::size_t> index;
};

SlotColumns bind_columns(const VehicleSlot& slot, std::span<const std::string> header) {
  SlotColumns out;
  for (const auto& [field, name] : slot.columns) out.index[field] = column_index(header, name);
  return out;
}

double& field_ref(GpsFix& fix, Field field) {
  switch (field) {
    case Field::Time: return fix.t;
    case Field::Lat: return fix.lat;
    case Field::Lon: return fix.lon;
    case Field::Alt: return fix.alt;
    case Field::Speed: return fix.speed;
    case Field::Spacing: return fix.spacing;
    case Field::Acceleration: return fix.acceleration;
  }
  return fix.t;
}

// Fills one fix from a row and enforces time ordering against the last
// accepted timestamp of the same track.
GpsFix read_fix(const std::vector<std::string>& row, const SlotColumns& cols,
                const DatasetProfile& profile, double& last_t, std::size_t line) {
  GpsFix fix;
  for (const auto& [field, idx] : cols.index) {
    std::optional<double> v;
    if (idx < row.size()) v = csv::parse_double(row[idx]);
    if (!v) {
      fix.valid = false;
      continue;
    }
    double value = *v;
    if (field == Field::Time) value *= profile.time_unit;
    if ((field == Field::Lat && std::abs(value) > 90.0) ||
        (field == Field::Lon && std::abs(value) > 180.0) || (field == Field::Speed && value < 0.0)) {
      fix.valid = false;
      continue;
    }
    field_ref(fix, field) = value;
  }
  if (is_set(fix.t)) {
    const double period = 1.0 / profile.declared_rate_hz;
    if (is_set(last_t) && fix.t < last_t - period) {
      throw Error(ErrorCode::NonMonotoneTime, "line " + std::to_string(line) + ": time " +
                                                  std::to_string(fix.t) + " after " +
                                                  std::to_string(last_t));
    }
    if (is_set(last_t) && fix.t <= last_t) {
      // Jitter within one period: re-timed by gap interpolation.
      fix.t = kUnset;
      fix.valid = false;
    } else {
      last_t = fix.t;
    }
  }
  return fix;
}

std::vector<std::string> read_header(csv::Reader& reader, const std::string& source) {
  auto header = reader.next();
  if (!header) throw Error(ErrorCode::EmptyFile, source);
  return *header;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, path.string());
  return in;
}

}  // namespace

std::string_view to_string(DatasetName name) noexcept {
  switch (name) {
    case DatasetName::OpenAcc: return "openacc";
    case DatasetName::Vanderbilt: return "vanderbilt";
    case DatasetName::Cats: return "cats";
    case DatasetName::Custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(Layout layout) noexcept {
  switch (layout) {
    case Layout::WideMultiVehicle: return "wide_multi_vehicle";
    case Layout::PairedTwoVehicle: return "paired_two_vehicle";
    case Layout::PerVehicleFiles: return "per_vehicle_files";
  }
  return "wide_multi_vehicle";
}

std::string_view to_string(Field field) noexcept {
  switch (field) {
    case Field::Time: return "time";
    case Field::Lat: return "lat";
    case Field::Lon: return "lon";
    case Field::Alt: return "alt";
    case Field::Speed: return "speed";
    case Field::Spacing: return "spacing";
    case Field::Acceleration: return "acceleration";
  }
  return "time";
}

std::optional<DatasetName> parse_dataset_name(std::string_view s) noexcept {
  for (auto n : {DatasetName::OpenAcc, DatasetName::Vanderbilt, DatasetName::Cats, DatasetName::Custom})
    if (to_string(n) == s) return n;
  return std::nullopt;
}

std::optional<Layout> parse_layout(std::string_view s) noexcept {
  for (auto l : {Layout::WideMultiVehicle, Layout::PairedTwoVehicle, Layout::PerVehicleFiles})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

std::optional<Field> parse_field(std::string_view s) noexcept {
  for (auto f : {Field::Time, Field::Lat, Field::Lon, Field::Alt, Field::Speed, Field::Spacing,
                 Field::Acceleration})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

void validate_profile(const DatasetProfile& profile) {
  if (!(profile.declared_rate_hz > 0.0)) {
    throw Error(ErrorCode::InvalidProfile, "declared_rate_hz must be positive");
  }
  if (!(profile.time_unit > 0.0)) throw Error(ErrorCode::InvalidProfile, "time_unit must be positive");
  auto check = [](const ColumnMap& cols, const std::string& who) {
    if (!cols.contains(Field::Time) || !cols.contains(Field::Speed)) {
      throw Error(ErrorCode::InvalidProfile, who + " must bind at least time and speed");
    }
  };
  if (profile.slots.empty()) {
    if (!profile.slot_template) throw Error(ErrorCode::InvalidProfile, "no slots and no slot_template");
    check(profile.slot_template->columns, "slot_template");
  }
  for (const auto& slot : profile.slots) check(slot.columns, "slot '" + slot.vehicle_id + "'");
  if (profile.layout == Layout::PairedTwoVehicle && !profile.slots.empty() && profile.slots.size() != 2) {
    throw Error(ErrorCode::InvalidProfile, "paired_two_vehicle needs exactly 2 slots");
  }
}

DatasetProfile builtin_profile(std::string_view name) {
  DatasetProfile p;
  if (name == "openacc") {
    p.name = DatasetName::OpenAcc;
    p.layout = Layout::WideMultiVehicle;
    p.declared_rate_hz = 10.0;
    SlotTemplate tpl;
    tpl.columns = {{Field::Time, "Time"},
                   {Field::Speed, "Speed{i}"},
                   {Field::Lat, "Lat{i}"},
                   {Field::Lon, "Lon{i}"},
                   {Field::Spacing, "IVS{p}"}};
    p.slot_template = tpl;
  } else if (name == "vanderbilt") {
    p.name = DatasetName::Vanderbilt;
    p.layout = Layout::PairedTwoVehicle;
    p.declared_rate_hz = 10.0;
    p.slots = {
        {"leader", VehicleType::HV, {{Field::Time, "Time"}, {Field::Speed, "Speed_Leader"}}},
        {"follower",
         VehicleType::AV,
         {{Field::Time, "Time"},
          {Field::Speed, "Speed_Follower"},
          {Field::Spacing, "Spacing"},
          {Field::Acceleration, "Acceleration_Follower"}}},
    };
  } else if (name == "cats") {
    p.name = DatasetName::Cats;
    p.layout = Layout::PerVehicleFiles;
    p.declared_rate_hz = 1.0;
    SlotTemplate tpl;
    tpl.columns = {{Field::Time, "Time"},
                   {Field::Lat, "Latitude"},
                   {Field::Lon, "Longitude"},
                   {Field::Speed, "Speed"}};
    p.slot_template = tpl;
  } else {
    throw Error(ErrorCode::UnknownProfile, std::string(name));
  }
  return p;
}

std::vector<VehicleSlot> resolve_slots(const DatasetProfile& profile,
                                       std::span<const std::string> header,
                                       std::size_t per_vehicle_index) {
  if (!profile.slots.empty()) {
    if (profile.layout == Layout::PerVehicleFiles) {
      if (per_vehicle_index >= profile.slots.size()) {
        throw Error(ErrorCode::InvalidProfile,
                    "more files than slots (" + std::to_string(profile.slots.size()) + ")");
      }
      return {profile.slots[per_vehicle_index]};
    }
    return profile.slots;
  }
  const SlotTemplate& tpl = *profile.slot_template;
  if (profile.layout == Layout::PerVehicleFiles) return {expand_slot(tpl, per_vehicle_index + 1)};

  std::vector<VehicleSlot> slots;
  for (std::size_t i = 1;; ++i) {
    VehicleSlot slot = expand_slot(tpl, i);
    const auto& speed_col = slot.columns.at(Field::Speed);
    if (std::find(header.begin(), header.end(), speed_col) == header.end()) break;
    slots.push_back(std::move(slot));
  }
  if (slots.empty()) throw Error(ErrorCode::MissingColumn, expand(tpl.columns.at(Field::Speed), 1));
  return slots;
}

PlatoonRecord parse_platoon(std::istream& in, const DatasetProfile& profile,
                            const std::string& source_label) {
  validate_profile(profile);
  if (profile.layout == Layout::PerVehicleFiles) {
    throw Error(ErrorCode::InvalidProfile, "per_vehicle_files layout needs one stream per vehicle");
  }
  csv::Reader reader(in, profile.comment_prefix);
  const auto header = read_header(reader, source_label);
  const auto slots = resolve_slots(profile, header);

  PlatoonRecord rec;
  rec.source = source_label;
  std::vector<SlotColumns> cols;
  for (const auto& slot : slots) {
    cols.push_back(bind_columns(slot, header));
    rec.order.push_back(slot.vehicle_id);
    rec.tracks.push_back({slot.vehicle_id, slot.type, profile.declared_rate_hz, {}});
  }
  std::vector<double> last_t(slots.size(), kUnset);
  std::size_t rows = 0;
  while (auto row = reader.next()) {
    ++rows;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      rec.tracks[s].fixes.push_back(read_fix(*row, cols[s], profile, last_t[s], reader.line_number()));
    }
  }
  if (rows == 0) throw Error(ErrorCode::EmptyFile, source_label + ": no data rows");
  return rec;
}

VehicleTrack parse_vehicle_file(std::istream& in, const DatasetProfile& profile,
                                std::size_t slot_index, const std::string& source_label) {
  validate_profile(profile);
  csv::Reader reader(in, profile.comment_prefix);
  const auto header = read_header(reader, source_label);
  const auto slot = resolve_slots(profile, header, slot_index).front();
  const SlotColumns cols = bind_columns(slot, header);

  VehicleTrack track{slot.vehicle_id, slot.type, profile.declared_rate_hz, {}};
  double last_t = kUnset;
  while (auto row = reader.next()) {
    track.fixes.push_back(read_fix(*row, cols, profile, last_t, reader.line_number()));
  }
  if (track.fixes.empty()) throw Error(ErrorCode::EmptyFile, source_label + ": no data rows");
  return track;
}

PlatoonRecord ingest_file(const std::filesystem::path& path, const DatasetProfile& profile) {
  return ingest_files(std::span(&path, 1), profile);
}

PlatoonRecord ingest_files(std::span<const std::filesystem::path> paths,
                           const DatasetProfile& profile) {
  if (paths.empty()) throw Error(ErrorCode::MissingInput, "no input files");
  if (profile.layout != Layout::PerVehicleFiles) {
    if (paths.size() != 1) {
      throw Error(ErrorCode::InvalidProfile,
                  std::string(to_string(profile.layout)) + " layout takes exactly one file");
    }
    auto in = open_or_throw(paths.front());
    return parse_platoon(in, profile, paths.front().string());
  }
  PlatoonRecord rec;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto in = open_or_throw(paths[i]);
    rec.tracks.push_back(parse_vehicle_file(in, profile, i, paths[i].string()));
    rec.order.push_back(rec.tracks.back().vehicle_id);
    if (i) rec.source += ';';
    rec.source += paths[i].string();
  }
  return rec;
}

VehicleTrack resample_track(const VehicleTrack& track, std::span<const double> times) {
  VehicleTrack out{track.vehicle_id, track.vehicle_type, track.sample_rate_hz, {}};
  out.fixes.reserve(times.size());
  const auto& fx = track.fixes;
  const double tol = 1e-6 * track.period();
  for (double t : times) {
    auto it = std::lower_bound(fx.begin(), fx.end(), t,
                               [](const GpsFix& f, double x) { return f.t < x; });
    // Exact (on-grid) matches are copied untouched.
    if (it != fx.end() && std::abs(it->t - t) <= tol) {
      GpsFix f = *it;
      f.t = t;
      out.fixes.push_back(f);
      continue;
    }
    if (it != fx.begin() && std::abs(std::prev(it)->t - t) <= tol) {
      GpsFix f = *std::prev(it);
      f.t = t;
      out.fixes.push_back(f);
      continue;
    }
    if (it == fx.begin() || it == fx.end()) {
      throw Error(ErrorCode::MisalignedTracks, "time " + std::to_string(t) + " outside track '" +
                                                   track.vehicle_id + "'");
    }
    const GpsFix& a = *std::prev(it);
    const GpsFix& b = *it;
    const double w = (t - a.t) / (b.t - a.t);
    auto lerp = [w](double x, double y) { return x + w * (y - x); };
    GpsFix f;
    f.t = t;
    f.lat = lerp(a.lat, b.lat);
    f.lon = lerp(a.lon, b.lon);
    f.alt = lerp(a.alt, b.alt);
    f.speed = lerp(a.speed, b.speed);
    f.spacing = lerp(a.spacing, b.spacing);
    f.acceleration = lerp(a.acceleration, b.acceleration);
    f.valid = a.valid && b.valid;
    out.fixes.push_back(f);
  }
  return out;
}

RawPair pair_tracks(const PlatoonRecord& platoon, std::size_t leader_idx,
                    std::size_t follower_idx, const std::string& traj_id,
                    std::string_view dataset) {
  if (follower_idx != leader_idx + 1 || follower_idx >= platoon.tracks.size()) {
    throw Error(ErrorCode::NonAdjacentPair, "leader " + std::to_string(leader_idx) + ", follower " +
                                                std::to_string(follower_idx));
  }
  const VehicleTrack& lead = platoon.tracks[leader_idx];
  const VehicleTrack& follow = platoon.tracks[follower_idx];
  for (const VehicleTrack* tr : {&lead, &follow}) {
    if (tr->fixes.size() < 2) {
      throw Error(ErrorCode::InsufficientOverlap, "track '" + tr->vehicle_id + "' has < 2 fixes");
    }
    for (const auto& f : tr->fixes) {
      if (!is_set(f.t) || !is_set(f.speed)) {
        throw Error(ErrorCode::NonFiniteSample,
                    "track '" + tr->vehicle_id + "' has unfilled gaps; interpolate first");
      }
    }
  }

  const double rate = lead.sample_rate_hz;
  const double period = 1.0 / rate;
  const double eps = 1e-6 * period;
  const double start = std::max(lead.fixes.front().t, follow.fixes.front().t);
  const double end = std::min(lead.fixes.back().t, follow.fixes.back().t);

  auto first = std::lower_bound(lead.fixes.begin(), lead.fixes.end(), start - eps,
                                [](const GpsFix& f, double x) { return f.t < x; });
  std::vector<double> grid;
  if (first != lead.fixes.end()) {
    const double origin = first->t;
    for (std::int64_t k = 0;; ++k) {
      const double t = origin + static_cast<double>(k) / rate;
      if (t > end + eps) break;
      grid.push_back(t);
    }
  }
  const double overlap = static_cast<double>(grid.size()) / rate;
  if (overlap < kMinTrajectoryDurationS) {
    throw Error(ErrorCode::InsufficientOverlap, std::to_string(overlap) + " s");
  }

  RawPair out;
  out.leader = resample_track(lead, grid);
  out.follower = resample_track(follow, grid);

  CfTrajectory& traj = out.trajectory;
  traj.traj_id = traj_id;
  traj.sample_rate_hz = rate;
  traj.provenance.dataset = std::string(dataset);
  traj.provenance.source_file = platoon.source;
  traj.provenance.time_origin_s = grid.front();
  traj.provenance.parameters = {{"leader_index", std::to_string(leader_idx)},
                                {"follower_index", std::to_string(follower_idx)},
                                {"sample_rate_hz", std::to_string(rate)}};
  traj.frames.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const GpsFix& l = out.leader.fixes[k];
    const GpsFix& f = out.follower.fixes[k];
    if (!l.valid) ++traj.provenance.interpolated_points;
    if (!f.valid) ++traj.provenance.interpolated_points;
    UniformFrame fr;
    fr.traj_id = traj_id;
    fr.frame_id = static_cast<std::int64_t>(k);
    fr.leader_id = lead.vehicle_id;
    fr.leader_type = lead.vehicle_type;
    fr.leader_speed = l.speed;
    fr.follower_id = follow.vehicle_id;
    fr.follower_type = follow.vehicle_type;
    fr.follower_speed = f.speed;
    fr.spacing = f.spacing;
    fr.follower_acceleration = f.acceleration;
    fr.t = grid[k];
    traj.frames.push_back(std::move(fr));
  }
  return out;
}

}  // namespace trajkit
