#include "rssdloc/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rssdloc/error.hpp"

namespace rssdloc {

using nlohmann::json;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::SimRssd: return "SIM_RSSD";
    case Mode::SimRssdTdoa: return "SIM_RSSD_TDOA";
    case Mode::FpRssd: return "FP_RSSD";
    case Mode::FpRssdTdoa: return "FP_RSSD_TDOA";
  }
  return "?";
}

std::string_view to_string(AntennaModel a) {
  return a == AntennaModel::Omni ? "OMNI" : "DIRECTIONAL";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::SimRssd, Mode::SimRssdTdoa, Mode::FpRssd, Mode::FpRssdTdoa}) {
    if (to_string(m) == s) return m;
  }
  throw Error(Errc::ParseError, "unknown mode '" + std::string(s) + "'");
}

AntennaModel parse_antenna_model(std::string_view s) {
  if (s == "OMNI") return AntennaModel::Omni;
  if (s == "DIRECTIONAL") return AntennaModel::Directional;
  throw Error(Errc::ParseError, "unknown antenna model '" + std::string(s) + "'");
}

namespace {

StationRole parse_role(const std::string& s) {
  if (s == "RSS_ONLY") return StationRole::RssOnly;
  if (s == "TDOA_ONLY") return StationRole::TdoaOnly;
  if (s == "RSS_AND_TDOA") return StationRole::RssAndTdoa;
  throw Error(Errc::ParseError, "unknown station role '" + s + "'");
}

std::string role_name(StationRole r) {
  switch (r) {
    case StationRole::RssOnly: return "RSS_ONLY";
    case StationRole::TdoaOnly: return "TDOA_ONLY";
    case StationRole::RssAndTdoa: return "RSS_AND_TDOA";
  }
  return "?";
}

Point2D parse_point(const json& j) {
  if (j.is_array()) return {j.at(0).get<double>(), j.at(1).get<double>()};
  return {j.at("x").get<double>(), j.at("y").get<double>()};
}

Box parse_box(const json& j) {
  return {j.at("x_min").get<double>(), j.at("x_max").get<double>(), j.at("y_min").get<double>(),
          j.at("y_max").get<double>()};
}

json box_json(const Box& b) {
  return {{"x_min", b.x_min}, {"x_max", b.x_max}, {"y_min", b.y_min}, {"y_max", b.y_max}};
}

ChannelParams parse_channel(const json& j, ChannelParams base) {
  base.alpha = j.value("alpha", base.alpha);
  base.sigma_beta = j.value("sigma_beta_db", base.sigma_beta);
  base.p0 = j.value("p0_dbm", base.p0);
  base.d0 = j.value("d0_m", base.d0);
  return base;
}

json channel_json(const ChannelParams& c) {
  return {{"alpha", c.alpha}, {"sigma_beta_db", c.sigma_beta}, {"p0_dbm", c.p0}, {"d0_m", c.d0}};
}

BaseStation parse_station(const json& j) {
  BaseStation bs;
  bs.id = j.at("id").get<int>();
  bs.position = {j.at("x").get<double>(), j.at("y").get<double>()};
  bs.role = parse_role(j.value("role", std::string("RSS_ONLY")));
  bs.obstruction_db = j.value("obstruction_db", 0.0);
  const std::string antenna = j.value("antenna", std::string("omni"));
  if (antenna == "directional") {
    bs.antenna = DirectionalAntenna{j.value("gain_db", 6.5),
                                    normalize_angle(deg_to_rad(j.value("orientation_deg", 0.0)))};
  } else if (antenna == "omni") {
    bs.antenna = OmniAntenna{};
  } else {
    throw Error(Errc::ParseError, "unknown antenna '" + antenna + "'");
  }
  return bs;
}

json station_json(const BaseStation& bs) {
  json j = {{"id", bs.id},
            {"x", bs.position.x},
            {"y", bs.position.y},
            {"role", role_name(bs.role)},
            {"obstruction_db", bs.obstruction_db}};
  if (const auto* dir = bs.directional()) {
    j["antenna"] = "directional";
    j["gain_db"] = dir->gain_db;
    j["orientation_deg"] = rad_to_deg(dir->orientation);
  } else {
    j["antenna"] = "omni";
  }
  return j;
}

void apply_override(json& doc, const Override& o) {
  json* node = &doc;
  std::stringstream path(o.path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(path, key, '.')) keys.push_back(key);
  if (keys.empty()) throw Error(Errc::InvalidArgument, "empty override path");
  // Numeric segments index into arrays, e.g. stations.0.x.
  const auto step = [&](json& parent, const std::string& k) -> json& {
    if (parent.is_array()) {
      std::size_t idx = 0;
      const auto [end, ec] = std::from_chars(k.data(), k.data() + k.size(), idx);
      if (ec != std::errc() || end != k.data() + k.size() || idx >= parent.size()) {
        throw Error(Errc::InvalidArgument, "override path " + o.path + ": bad index " + k);
      }
      return parent[idx];
    }
    if (!parent.is_object() && !parent.is_null()) {
      throw Error(Errc::InvalidArgument, "override path " + o.path + " descends into a value");
    }
    return parent[k];
  };
  for (std::size_t n = 0; n + 1 < keys.size(); ++n) node = &step(*node, keys[n]);
  json value = json::parse(o.value, nullptr, false);
  if (value.is_discarded()) value = o.value;
  step(*node, keys.back()) = value;
}

}  // namespace

void validate(const Scenario& s) {
  validate(s.channel);
  validate(s.region);
  if (!(s.tdoa_noise.sigma_tdoa >= 0.0)) {
    throw Error(Errc::InvalidArgument, "TDOA noise std must be >= 0");
  }
  if (s.trials < 1) throw Error(Errc::InvalidArgument, "trials must be >= 1");
  if (rss_station_indices(s.bs).size() < 2) {
    throw Error(Errc::TooFewStations, "scenario needs at least two RSS stations");
  }
  for (const auto& b : s.bs) validate(b);
  if (uses_tdoa(s.mode) && !tdoa_pair(s.bs)) {
    throw Error(Errc::InvalidArgument, std::string(to_string(s.mode)) +
                                           " needs two TDOA-capable stations");
  }
  if (s.antenna_model == AntennaModel::Directional) {
    for (const auto& b : s.bs) {
      if (measures_rss(b.role) && !b.is_directional()) {
        throw Error(Errc::InvalidArgument, "directional model needs a directional antenna on station " +
                                               std::to_string(b.id));
      }
    }
  }
  if (const auto* wp = std::get_if<WaypointModelParams>(&s.mobility)) validate(*wp);
  if (!(s.circular_update_rate > 0.0)) {
    throw Error(Errc::InvalidArgument, "circular update rate must be positive");
  }
  if (is_fingerprint(s.mode) && !s.fingerprint.db_file && !(s.fingerprint.grid_step > 0.0)) {
    throw Error(Errc::InvalidArgument, "fingerprint mode needs a grid step or a database file");
  }
}

Scenario parse_scenario(std::string_view text, std::span<const Override> overrides) {
  json doc = json::parse(text, nullptr, false, true);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(Errc::ParseError, "scenario is not a JSON object");
  }
  for (const auto& o : overrides) apply_override(doc, o);

  Scenario s;
  try {
    s.name = doc.value("name", s.name);
    s.mode = parse_mode(doc.value("mode", std::string(to_string(s.mode))));
    s.antenna_model =
        parse_antenna_model(doc.value("antenna_model", std::string(to_string(s.antenna_model))));
    s.seed = doc.value("seed", s.seed);
    s.trials = doc.value("trials", s.trials);
    s.dynamic_orientation = doc.value("dynamic_orientation", !is_fingerprint(s.mode));

    for (const auto& st : doc.at("stations")) s.bs.push_back(parse_station(st));

    if (doc.contains("channel")) {
      const json& c = doc["channel"];
      if (c.contains("omni_omni")) s.channel.omni_omni = parse_channel(c["omni_omni"], s.channel.omni_omni);
      if (c.contains("omni_dir")) s.channel.omni_dir = parse_channel(c["omni_dir"], s.channel.omni_dir);
    }
    if (doc.contains("tdoa_noise")) {
      s.tdoa_noise.sigma_tdoa = doc["tdoa_noise"].value("sigma_ps", 330.0) * 1e-12;
    }

    if (doc.contains("mobility")) {
      const json& m = doc["mobility"];
      const std::string model = m.value("model", std::string("random_waypoint"));
      if (model == "random_waypoint") {
        WaypointModelParams wp;
        if (m.contains("area")) wp.area = parse_box(m["area"]);
        wp.speed = m.value("speed_mps", wp.speed);
        wp.pause_time = m.value("pause_s", wp.pause_time);
        wp.total_length = m.value("total_length_m", wp.total_length);
        wp.update_rate = m.value("update_rate_hz", wp.update_rate);
        if (m.contains("start")) wp.start = parse_point(m["start"]);
        s.mobility = wp;
      } else if (model == "circular") {
        CircularTrackParams cp;
        if (m.contains("center")) cp.center = parse_point(m["center"]);
        cp.radius = m.value("radius_m", cp.radius);
        cp.count = m.value("count", cp.count);
        cp.start_angle_deg = m.value("start_angle_deg", cp.start_angle_deg);
        cp.step_angle_deg = m.value("step_angle_deg", cp.step_angle_deg);
        s.circular_update_rate = m.value("update_rate_hz", s.circular_update_rate);
        s.mobility = cp;
      } else {
        throw Error(Errc::ParseError, "unknown mobility model '" + model + "'");
      }
    }

    if (doc.contains("solver")) {
      const json& r = doc["solver"].value("region", json::object());
      if (!r.empty()) {
        const Box b = parse_box(r);
        s.region.x_min = b.x_min;
        s.region.x_max = b.x_max;
        s.region.y_min = b.y_min;
        s.region.y_max = b.y_max;
      }
      s.region.coarse_step = r.value("coarse_step_m", s.region.coarse_step);
      s.region.refine_iterations = r.value("refine_iterations", s.region.refine_iterations);
    }

    if (doc.contains("fingerprint")) {
      const json& f = doc["fingerprint"];
      if (f.contains("area")) s.fingerprint.area = parse_box(f["area"]);
      s.fingerprint.grid_step = f.value("grid_step_m", s.fingerprint.grid_step);
      s.fingerprint.offline_averages = f.value("offline_averages", s.fingerprint.offline_averages);
      s.fingerprint.noiseless_db = f.value("noiseless_db", s.fingerprint.noiseless_db);
      for (const auto& p : f.value("excluded", json::array())) {
        s.fingerprint.excluded.push_back(parse_point(p));
      }
      if (f.contains("db_file") && f["db_file"].is_string()) {
        s.fingerprint.db_file = f["db_file"].get<std::string>();
      }
    }

    const std::string source = doc.value("measurement_source", std::string("model"));
    if (source == "model") {
      s.source = MeasurementSource::Model;
    } else if (source == "receiver") {
      s.source = MeasurementSource::Receiver;
    } else {
      throw Error(Errc::ParseError, "unknown measurement source '" + source + "'");
    }
    if (doc.contains("receiver")) {
      const json& r = doc["receiver"];
      ReceiverConfig& rc = s.receiver;
      rc.sample_rate = r.value("sample_rate_hz", rc.sample_rate);
      rc.upsample_factor = r.value("upsample_factor", rc.upsample_factor);
      rc.filter_order = r.value("filter_order", rc.filter_order);
      rc.noise_std = r.value("noise_std", rc.noise_std);
      rc.rss_window = r.value("rss_window_ns", rc.rss_window * 1e9) * 1e-9;
      rc.signal.prf = r.value("prf_hz", rc.signal.prf);
      rc.signal.f_low = r.value("f_low_hz", rc.signal.f_low);
      rc.signal.f_high = r.value("f_high_hz", rc.signal.f_high);
      if (r.contains("chips")) {
        rc.signal.chips = r["chips"].get<std::vector<double>>();
      } else if (r.contains("chip_seed")) {
        rc.signal.chips = default_chip_code(r["chip_seed"].get<std::uint64_t>());
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& file, std::span<const Override> overrides) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::IoError, "cannot open scenario " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), overrides);
  if (s.fingerprint.db_file && s.fingerprint.db_file->is_relative()) {
    s.fingerprint.db_file = file.parent_path() / *s.fingerprint.db_file;
  }
  return s;
}

std::string dump_scenario(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["mode"] = to_string(s.mode);
  doc["antenna_model"] = to_string(s.antenna_model);
  doc["seed"] = s.seed;
  doc["trials"] = s.trials;
  doc["dynamic_orientation"] = s.dynamic_orientation;
  doc["stations"] = json::array();
  for (const auto& b : s.bs) doc["stations"].push_back(station_json(b));
  doc["channel"] = {{"omni_omni", channel_json(s.channel.omni_omni)},
                    {"omni_dir", channel_json(s.channel.omni_dir)}};
  doc["tdoa_noise"] = {{"sigma_ps", s.tdoa_noise.sigma_tdoa * 1e12}};
  if (const auto* wp = std::get_if<WaypointModelParams>(&s.mobility)) {
    doc["mobility"] = {{"model", "random_waypoint"},     {"area", box_json(wp->area)},
                       {"speed_mps", wp->speed},         {"pause_s", wp->pause_time},
                       {"total_length_m", wp->total_length}, {"update_rate_hz", wp->update_rate}};
    if (wp->start) doc["mobility"]["start"] = {{"x", wp->start->x}, {"y", wp->start->y}};
  } else {
    const auto& cp = std::get<CircularTrackParams>(s.mobility);
    doc["mobility"] = {{"model", "circular"},
                       {"center", {{"x", cp.center.x}, {"y", cp.center.y}}},
                       {"radius_m", cp.radius},
                       {"count", cp.count},
                       {"start_angle_deg", cp.start_angle_deg},
                       {"step_angle_deg", cp.step_angle_deg},
                       {"update_rate_hz", s.circular_update_rate}};
  }
  json region = box_json(s.region.box());
  region["coarse_step_m"] = s.region.coarse_step;
  region["refine_iterations"] = s.region.refine_iterations;
  doc["solver"] = {{"region", region}};
  json excluded = json::array();
  for (const auto& p : s.fingerprint.excluded) excluded.push_back({p.x, p.y});
  doc["fingerprint"] = {{"area", box_json(s.fingerprint.area)},
                        {"grid_step_m", s.fingerprint.grid_step},
                        {"offline_averages", s.fingerprint.offline_averages},
                        {"noiseless_db", s.fingerprint.noiseless_db},
                        {"excluded", excluded}};
  if (s.fingerprint.db_file) doc["fingerprint"]["db_file"] = s.fingerprint.db_file->string();
  doc["measurement_source"] = s.source == MeasurementSource::Model ? "model" : "receiver";
  doc["receiver"] = {{"sample_rate_hz", s.receiver.sample_rate},
                     {"upsample_factor", s.receiver.upsample_factor},
                     {"filter_order", s.receiver.filter_order},
                     {"noise_std", s.receiver.noise_std},
                     {"rss_window_ns", s.receiver.rss_window * 1e9},
                     {"prf_hz", s.receiver.signal.prf},
                     {"f_low_hz", s.receiver.signal.f_low},
                     {"f_high_hz", s.receiver.signal.f_high},
                     {"chips", s.receiver.signal.chips}};
  return doc.dump(2);
}

std::vector<BaseStation> stations_for(const Scenario& s) {
  std::vector<BaseStation> out = s.bs;
  if (s.antenna_model == AntennaModel::Omni) {
    for (auto& b : out) b.antenna = OmniAntenna{};
  }
  return out;
}

}  // namespace rssdloc
