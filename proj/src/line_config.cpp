#include "dbl/line_config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace dbl {

namespace {

template <typename T>
int find_index(const std::vector<T>& items, int id) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::string field(const std::string& kind, int id, const std::string& name) {
  std::ostringstream os;
  os << kind << "[" << id << "]." << name;
  return os.str();
}

}  // namespace

int LineConfig::stop_index(int stop_id) const {
  const int i = find_index(stops, stop_id);
  if (i < 0) throw ConfigError("unknown stop id " + std::to_string(stop_id));
  return i;
}

int LineConfig::segment_index(int road_segment_id) const {
  const int i = find_index(segments, road_segment_id);
  if (i < 0) throw ConfigError("unknown road segment id " + std::to_string(road_segment_id));
  return i;
}

int LineConfig::bls_index(int bls_id) const {
  const int i = find_index(bus_line_segments, bls_id);
  if (i < 0) throw ConfigError("unknown bus-line segment id " + std::to_string(bls_id));
  return i;
}

std::vector<int> LineConfig::eligible_ids() const {
  std::vector<int> ids;
  for (const auto& b : bus_line_segments) {
    if (b.eligible_for_dbl) ids.push_back(b.id);
  }
  return ids;
}

std::vector<int> LineConfig::preset(const std::string& name) const {
  auto it = run.presets.find(name);
  if (it == run.presets.end()) throw ConfigError("unknown preset '" + name + "'");
  return it->second;
}

DeploymentPattern::DeploymentPattern(std::vector<int> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool DeploymentPattern::contains(int bls_id) const {
  return std::binary_search(ids_.begin(), ids_.end(), bls_id);
}

std::string DeploymentPattern::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ids_[i]);
  }
  return out;
}

std::vector<Violation> validate(const LineConfig& c) {
  std::vector<Violation> v;
  auto add = [&v](std::string f, std::string r) { v.push_back({std::move(f), std::move(r)}); };

  const int n_stops = static_cast<int>(c.stops.size());
  if (n_stops < 2) add("stops", "at least two stops are required");

  std::set<int> seen;
  for (const auto& s : c.stops) {
    if (!seen.insert(s.id).second) add(field("stops", s.id, "id"), "duplicate id");
    if (!(s.arrival_rate_per_min >= 0.0)) add(field("stops", s.id, "arrival_rate_per_min"), "must be >= 0");
    if (static_cast<int>(s.destination_series.size()) > n_stops - 1) {
      add(field("stops", s.id, "destination_series"), "longer than number of stops - 1");
    }
    if (s.destination_series.empty()) {
      add(field("stops", s.id, "destination_series"), "must not be empty");
    } else {
      const double sum = std::accumulate(s.destination_series.begin(), s.destination_series.end(), 0.0);
      const bool negative = std::any_of(s.destination_series.begin(), s.destination_series.end(),
                                        [](double p) { return !(p >= 0.0); });
      if (negative) add(field("stops", s.id, "destination_series"), "probabilities must be >= 0");
      if (std::abs(sum - 1.0) > kDestinationSumTolerance) {
        add(field("stops", s.id, "destination_series"), "must sum to 1");
      }
    }
  }

  seen.clear();
  double road_sum = 0.0;
  for (const auto& r : c.segments) {
    if (!seen.insert(r.id).second) add(field("segments", r.id, "id"), "duplicate id");
    if (!(r.length_km > 0.0)) add(field("segments", r.id, "length_km"), "must be > 0");
    road_sum += r.length_km;
  }
  if (!(c.common_speed_kmh > 0.0)) add("run.common_speed_kmh", "must be > 0");
  if (!(c.dbl_speed_kmh > 0.0)) add("run.dbl_speed_kmh", "must be > 0");
  if (!(c.sigma_rule.common_s_per_km >= 0.0)) add("run.sigma_common_s_per_km", "must be >= 0");
  if (!(c.sigma_rule.dbl_s_per_km >= 0.0)) add("run.sigma_dbl_s_per_km", "must be >= 0");
  if (std::abs(road_sum - c.ring_length_km) > kRingLengthTolerance) {
    add("run.ring_length_km", "must equal the sum of road segment lengths");
  }
  if (!(c.observation_period_s > 0.0)) add("run.observation_period_s", "must be > 0");

  // Bus-line segments: contiguous ring, each road used once.
  seen.clear();
  std::vector<int> road_uses(c.segments.size(), 0);
  std::vector<int> stop_ends(c.stops.size(), 0);
  const int n_bls = static_cast<int>(c.bus_line_segments.size());
  for (int i = 0; i < n_bls; ++i) {
    const auto& b = c.bus_line_segments[i];
    if (!seen.insert(b.id).second) add(field("bus_line_segments", b.id, "id"), "duplicate id");
    const int from = find_index(c.stops, b.from_stop);
    const int to = find_index(c.stops, b.to_stop);
    if (from < 0) add(field("bus_line_segments", b.id, "from_stop"), "unknown stop");
    if (to < 0) add(field("bus_line_segments", b.id, "to_stop"), "unknown stop");
    if (from >= 0 && to >= 0) {
      ++stop_ends[from];
      ++stop_ends[to];
      if ((from + 1) % n_stops != to) {
        add(field("bus_line_segments", b.id, "to_stop"), "must be the ring successor of from_stop");
      }
    }
    if (n_bls > 0) {
      const auto& next = c.bus_line_segments[(i + 1) % n_bls];
      if (next.from_stop != b.to_stop) {
        add(field("bus_line_segments", b.id, "to_stop"), "next segment must start where this one ends");
      }
    }
    if (b.road_segments.empty()) add(field("bus_line_segments", b.id, "road_segments"), "must not be empty");
    for (int rid : b.road_segments) {
      const int r = find_index(c.segments, rid);
      if (r < 0) {
        add(field("bus_line_segments", b.id, "road_segments"), "unknown road segment " + std::to_string(rid));
      } else {
        ++road_uses[r];
      }
    }
    if (std::find(b.action_set.begin(), b.action_set.end(), 0.0) == b.action_set.end()) {
      add(field("bus_line_segments", b.id, "action_set"), "must contain 0");
    }
    if (!b.eligible_for_dbl && !(b.action_set.size() == 1 && b.action_set[0] == 0.0)) {
      add(field("bus_line_segments", b.id, "action_set"), "must be {0} when not eligible");
    }
    for (double a : b.action_set) {
      if (!(c.dbl_speed_kmh + a > 0.0)) {
        add(field("bus_line_segments", b.id, "action_set"), "regulated speed must stay positive");
        break;
      }
    }
    if (b.influence_cost && !(*b.influence_cost >= 0.0)) {
      add(field("bus_line_segments", b.id, "influence_cost"), "must be >= 0");
    }
    if (b.money_cost && !(*b.money_cost >= 0.0)) {
      add(field("bus_line_segments", b.id, "money_cost"), "must be >= 0");
    }
  }
  for (std::size_t r = 0; r < road_uses.size(); ++r) {
    if (road_uses[r] != 1) {
      add(field("segments", c.segments[r].id, "id"), "must belong to exactly one bus-line segment");
    }
  }
  for (std::size_t s = 0; s < stop_ends.size(); ++s) {
    if (stop_ends[s] != 2) {
      add(field("stops", c.stops[s].id, "id"), "must be an endpoint of exactly two bus-line segments");
    }
  }

  seen.clear();
  for (const auto& p : c.signals) {
    const std::string k = "signals";
    if (!seen.insert(p.intersection_id).second) add(field(k, p.intersection_id, "intersection_id"), "duplicate id");
    if (find_index(c.bus_line_segments, p.host_segment) < 0) {
      add(field(k, p.intersection_id, "host_segment"), "unknown bus-line segment");
    }
    if (!(p.red_s > 0.0)) add(field(k, p.intersection_id, "red_s"), "must be > 0");
    if (!(p.green_s > 0.0)) add(field(k, p.intersection_id, "green_s"), "must be > 0");
    const double phase_len = p.initial_phase == SignalPhase::red ? p.red_s : p.green_s;
    if (!(p.initial_remaining_s >= 0.0 && p.initial_remaining_s <= phase_len)) {
      add(field(k, p.intersection_id, "initial_remaining_s"), "must lie within the initial phase");
    }
    if (p.position_on_segment && !(*p.position_on_segment >= 0.0 && *p.position_on_segment <= 1.0)) {
      add(field(k, p.intersection_id, "position_on_segment"), "must lie in [0, 1]");
    }
  }

  seen.clear();
  if (c.buses.empty()) add("buses", "at least one bus is required");
  for (const auto& b : c.buses) {
    if (!seen.insert(b.id).second) add(field("buses", b.id, "id"), "duplicate id");
    if (b.capacity <= 0) add(field("buses", b.id, "capacity"), "must be > 0");
    if (find_index(c.stops, b.initial_stop) < 0) add(field("buses", b.id, "initial_stop"), "unknown stop");
    if (!(b.initial_activation_delay_s >= 0.0)) {
      add(field("buses", b.id, "initial_activation_delay_s"), "must be >= 0");
    }
  }

  double share = 0.0;
  for (const auto& p : c.passenger_profiles) {
    share += p.share;
    if (!(p.share >= 0.0)) add("passenger_profiles[" + p.name + "].share", "must be >= 0");
    if (!(p.board_s > 0.0)) add("passenger_profiles[" + p.name + "].board_s", "must be > 0");
    if (!(p.alight_s > 0.0)) add("passenger_profiles[" + p.name + "].alight_s", "must be > 0");
  }
  if (c.passenger_profiles.empty() || std::abs(share - 1.0) > 1e-9) {
    add("passenger_profiles", "shares must sum to 1");
  }

  if (!(c.constraints.influence_limit >= 0.0)) add("constraints.influence_limit", "must be >= 0");
  if (!(c.constraints.budget_limit >= 0.0)) add("constraints.budget_limit", "must be >= 0");

  for (const auto& [name, ids] : c.run.presets) {
    for (const auto& e : validate_pattern(c, DeploymentPattern(ids))) {
      add("run.presets." + name, e.rule);
    }
  }
  return v;
}

std::vector<Violation> validate_pattern(const LineConfig& c, const DeploymentPattern& pattern) {
  std::vector<Violation> v;
  for (int id : pattern.ids()) {
    const int i = find_index(c.bus_line_segments, id);
    if (i < 0) {
      v.push_back({"pattern", "unknown bus-line segment " + std::to_string(id)});
    } else if (!c.bus_line_segments[i].eligible_for_dbl) {
      v.push_back({"pattern", "bus-line segment " + std::to_string(id) + " is not eligible"});
    }
  }
  return v;
}

ConstraintCheck constraint_check(const LineConfig& c, const DeploymentPattern& pattern,
                                 const ConstraintSpec& spec) {
  ConstraintCheck out;
  for (int id : pattern.ids()) {
    const auto& b = c.bus_line_segments[c.bls_index(id)];
    if (!b.influence_cost || !b.money_cost) {
      throw ConfigError("bus-line segment " + std::to_string(id) + " has no costs");
    }
    out.influence_sum += *b.influence_cost;
    out.money_sum += *b.money_cost;
  }
  // Costs are decimal data; absorb binary rounding of their sums.
  out.feasible = out.influence_sum <= spec.influence_limit + kCostTolerance &&
                 out.money_sum <= spec.budget_limit + kCostTolerance;
  return out;
}

}  // namespace dbl
