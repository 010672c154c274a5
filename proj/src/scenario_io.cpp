#include "dbl/scenario_io.hpp"

#include <fstream>
#include <sstream>

namespace dbl {

using nlohmann::json;

namespace {

const json& need(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string("missing key '") + key + "'");
  }
  return obj.at(key);
}

template <typename T>
T get(const json& obj, const char* key) {
  try {
    return need(obj, key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get<T>(obj, key);
}

std::optional<double> get_opt(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get<double>(obj, key);
}

const json& need_array(const json& doc, const char* key) {
  const json& a = need(doc, key);
  if (!a.is_array()) throw ConfigError(std::string("'") + key + "' must be an array");
  return a;
}

// A pattern-like field is either a preset name or an explicit id list.
void read_ids_or_preset(const json& run, const char* key, std::string& preset, std::vector<int>& ids) {
  if (!run.contains(key)) return;
  const json& v = run.at(key);
  if (v.is_string()) {
    preset = v.get<std::string>();
  } else if (v.is_array()) {
    ids = v.get<std::vector<int>>();
  } else {
    throw ConfigError(std::string("'run.") + key + "' must be a preset name or an id list");
  }
}

ControllerSpec read_controller(const json& j) {
  const auto type = get<std::string>(j, "type");
  if (type == "none") return ControllerSpec::none();
  if (type == "lookahead") {
    return ControllerSpec::lookahead(get_or<int>(j, "depth", 3), get_or<double>(j, "gamma", 0.5));
  }
  throw ConfigError("unknown controller type '" + type + "'");
}

}  // namespace

LineConfig scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  LineConfig c;

  for (const auto& s : need_array(doc, "stops")) {
    c.stops.push_back({get<int>(s, "id"), get<double>(s, "arrival_rate_per_min"),
                       get<std::vector<double>>(s, "destination_series")});
  }
  for (const auto& r : need_array(doc, "segments")) {
    c.segments.push_back({get<int>(r, "id"), get<double>(r, "length_km"), get_or<bool>(r, "has_dbl", false)});
  }
  for (const auto& b : need_array(doc, "bus_line_segments")) {
    BusLineSegment seg;
    seg.id = get<int>(b, "id");
    seg.road_segments = get<std::vector<int>>(b, "road_segments");
    seg.from_stop = get<int>(b, "from_stop");
    seg.to_stop = get<int>(b, "to_stop");
    seg.eligible_for_dbl = get_or<bool>(b, "eligible_for_dbl", false);
    seg.action_set = get_or<std::vector<double>>(b, "action_set", {0.0});
    seg.influence_cost = get_opt(b, "influence_cost");
    seg.money_cost = get_opt(b, "money_cost");
    c.bus_line_segments.push_back(std::move(seg));
  }
  for (const auto& p : need_array(doc, "signals")) {
    SignalPlan plan;
    plan.intersection_id = get<int>(p, "intersection_id");
    plan.host_segment = get<int>(p, "host_segment");
    plan.red_s = get<double>(p, "red_s");
    plan.green_s = get<double>(p, "green_s");
    const auto phase = get<std::string>(p, "initial_phase");
    if (phase != "red" && phase != "green") throw ConfigError("initial_phase must be 'red' or 'green'");
    plan.initial_phase = phase == "red" ? SignalPhase::red : SignalPhase::green;
    plan.initial_remaining_s = get<double>(p, "initial_remaining_s");
    plan.position_on_segment = get_opt(p, "position_on_segment");
    c.signals.push_back(plan);
  }
  for (const auto& b : need_array(doc, "buses")) {
    c.buses.push_back({get<int>(b, "id"), get<int>(b, "capacity"), get<int>(b, "initial_stop"),
                       get<double>(b, "initial_activation_delay_s")});
  }
  for (const auto& p : need_array(doc, "passenger_profiles")) {
    c.passenger_profiles.push_back({get<std::string>(p, "name"), get<double>(p, "share"),
                                    get<double>(p, "board_s"), get<double>(p, "alight_s")});
  }
  const json& k = need(doc, "constraints");
  c.constraints = {get<double>(k, "influence_limit"), get<double>(k, "budget_limit")};

  const json& run = need(doc, "run");
  c.ring_length_km = get<double>(run, "ring_length_km");
  c.observation_period_s = get<double>(run, "observation_period_s");
  c.common_speed_kmh = get_or<double>(run, "common_speed_kmh", 35.0);
  c.dbl_speed_kmh = get_or<double>(run, "dbl_speed_kmh", 50.0);
  c.sigma_rule.common_s_per_km = get_or<double>(run, "sigma_common_s_per_km", 5.0);
  c.sigma_rule.dbl_s_per_km = get_or<double>(run, "sigma_dbl_s_per_km", 2.0);
  if (run.contains("presets")) {
    for (const auto& [name, ids] : run.at("presets").items()) {
      c.run.presets[name] = ids.get<std::vector<int>>();
    }
  }
  read_ids_or_preset(run, "pattern", c.run.pattern_preset, c.run.pattern_ids);
  read_ids_or_preset(run, "candidates", c.run.candidates_preset, c.run.candidate_ids);
  if (run.contains("controller")) c.run.controller = read_controller(run.at("controller"));
  c.run.replications = get_or<int>(run, "replications", 1);
  c.run.seed = get_or<unsigned long long>(run, "seed", 1);
  return c;
}

json scenario_to_json(const LineConfig& c) {
  json doc = json::object();
  json stops = json::array();
  for (const auto& s : c.stops) {
    stops.push_back({{"id", s.id}, {"arrival_rate_per_min", s.arrival_rate_per_min},
                     {"destination_series", s.destination_series}});
  }
  doc["stops"] = std::move(stops);

  json segs = json::array();
  for (const auto& r : c.segments) {
    segs.push_back({{"id", r.id}, {"length_km", r.length_km}, {"has_dbl", r.has_dbl}});
  }
  doc["segments"] = std::move(segs);

  json bls = json::array();
  for (const auto& b : c.bus_line_segments) {
    json j = {{"id", b.id},
              {"road_segments", b.road_segments},
              {"from_stop", b.from_stop},
              {"to_stop", b.to_stop},
              {"eligible_for_dbl", b.eligible_for_dbl},
              {"action_set", b.action_set}};
    if (b.influence_cost) j["influence_cost"] = *b.influence_cost;
    if (b.money_cost) j["money_cost"] = *b.money_cost;
    bls.push_back(std::move(j));
  }
  doc["bus_line_segments"] = std::move(bls);

  json sig = json::array();
  for (const auto& p : c.signals) {
    json j = {{"intersection_id", p.intersection_id},
              {"host_segment", p.host_segment},
              {"red_s", p.red_s},
              {"green_s", p.green_s},
              {"initial_phase", p.initial_phase == SignalPhase::red ? "red" : "green"},
              {"initial_remaining_s", p.initial_remaining_s}};
    if (p.position_on_segment) j["position_on_segment"] = *p.position_on_segment;
    sig.push_back(std::move(j));
  }
  doc["signals"] = std::move(sig);

  json buses = json::array();
  for (const auto& b : c.buses) {
    buses.push_back({{"id", b.id},
                     {"capacity", b.capacity},
                     {"initial_stop", b.initial_stop},
                     {"initial_activation_delay_s", b.initial_activation_delay_s}});
  }
  doc["buses"] = std::move(buses);

  json prof = json::array();
  for (const auto& p : c.passenger_profiles) {
    prof.push_back({{"name", p.name}, {"share", p.share}, {"board_s", p.board_s}, {"alight_s", p.alight_s}});
  }
  doc["passenger_profiles"] = std::move(prof);
  doc["constraints"] = {{"influence_limit", c.constraints.influence_limit},
                        {"budget_limit", c.constraints.budget_limit}};

  json run = {{"ring_length_km", c.ring_length_km},
              {"observation_period_s", c.observation_period_s},
              {"common_speed_kmh", c.common_speed_kmh},
              {"dbl_speed_kmh", c.dbl_speed_kmh},
              {"sigma_common_s_per_km", c.sigma_rule.common_s_per_km},
              {"sigma_dbl_s_per_km", c.sigma_rule.dbl_s_per_km},
              {"replications", c.run.replications},
              {"seed", c.run.seed}};
  if (!c.run.presets.empty()) {
    json presets = json::object();
    for (const auto& [name, ids] : c.run.presets) presets[name] = ids;
    run["presets"] = std::move(presets);
  }
  if (!c.run.pattern_preset.empty()) {
    run["pattern"] = c.run.pattern_preset;
  } else if (!c.run.pattern_ids.empty()) {
    run["pattern"] = c.run.pattern_ids;
  }
  if (!c.run.candidates_preset.empty()) {
    run["candidates"] = c.run.candidates_preset;
  } else if (!c.run.candidate_ids.empty()) {
    run["candidates"] = c.run.candidate_ids;
  }
  if (c.run.controller.kind == ControllerSpec::Kind::lookahead) {
    run["controller"] = {{"type", "lookahead"}, {"depth", c.run.controller.depth}, {"gamma", c.run.controller.gamma}};
  } else {
    run["controller"] = {{"type", "none"}};
  }
  doc["run"] = std::move(run);
  return doc;
}

LineConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  return scenario_from_json(doc);
}

std::string dump_scenario(const LineConfig& config) {
  return scenario_to_json(config).dump(2) + "\n";
}

}  // namespace dbl
