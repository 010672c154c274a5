#include "dbl/route.hpp"

#include <algorithm>
#include <cmath>

namespace dbl {

namespace {
constexpr double kSnapKm = 1e-9;
}

Route::Route(const LineConfig& c) {
  const std::size_t n_bls = c.bus_line_segments.size();
  const std::size_t n_roads = c.segments.size();
  const std::size_t n_stops = c.stops.size();

  road_start_km_.assign(n_roads, 0.0);
  road_length_km_.assign(n_roads, 0.0);
  road_bls_.assign(n_roads, -1);
  bls_start_km_.assign(n_bls, 0.0);
  bls_length_km_.assign(n_bls, 0.0);
  bls_roads_.assign(n_bls, {});
  bls_legs_.assign(n_bls, {});
  bls_to_stop_.assign(n_bls, -1);
  bls_from_stop_.assign(n_stops, -1);
  next_stop_.assign(n_stops, -1);
  stop_offset_km_.assign(n_stops, 0.0);

  double km = 0.0;
  for (std::size_t b = 0; b < n_bls; ++b) {
    const auto& seg = c.bus_line_segments[b];
    bls_ids_.push_back(seg.id);
    bls_start_km_[b] = km;
    for (int rid : seg.road_segments) {
      const int r = c.segment_index(rid);
      road_start_km_[r] = km;
      road_length_km_[r] = c.segments[r].length_km;
      road_bls_[r] = static_cast<int>(b);
      bls_roads_[b].push_back(r);
      km += c.segments[r].length_km;
    }
    bls_length_km_[b] = km - bls_start_km_[b];
    const int from = c.stop_index(seg.from_stop);
    const int to = c.stop_index(seg.to_stop);
    bls_from_stop_[from] = static_cast<int>(b);
    bls_to_stop_[b] = to;
    next_stop_[from] = to;
    stop_offset_km_[from] = bls_start_km_[b];
  }
  ring_length_km_ = km;
  for (std::size_t s = 0; s < n_stops; ++s) {
    if (bls_from_stop_[s] < 0) throw ConfigError("stop " + std::to_string(c.stops[s].id) + " starts no segment");
  }

  // Signals: explicit fractions, else successive road boundaries of the host
  // segment in listed order, else mid-segment.
  const std::size_t n_sig = c.signals.size();
  signal_offset_km_.assign(n_sig, 0.0);
  signal_fraction_.assign(n_sig, 0.0);
  signal_bls_.assign(n_sig, -1);
  std::vector<std::size_t> boundaries_used(n_bls, 0);
  std::vector<std::vector<std::pair<double, int>>> crossings(n_bls);
  for (std::size_t i = 0; i < n_sig; ++i) {
    const auto& p = c.signals[i];
    const int b = c.bls_index(p.host_segment);
    double local_km;
    if (p.position_on_segment) {
      local_km = *p.position_on_segment * bls_length_km_[b];
    } else if (boundaries_used[b] + 1 < bls_roads_[b].size()) {
      const int road_after = bls_roads_[b][++boundaries_used[b]];
      local_km = road_start_km_[road_after] - bls_start_km_[b];
    } else {
      local_km = 0.5 * bls_length_km_[b];
    }
    signal_bls_[i] = b;
    signal_fraction_[i] = local_km / bls_length_km_[b];
    signal_offset_km_[i] = wrap(bls_start_km_[b] + local_km);
    crossings[b].emplace_back(local_km, static_cast<int>(i));
  }

  for (std::size_t b = 0; b < n_bls; ++b) {
    auto& cs = crossings[b];
    std::stable_sort(cs.begin(), cs.end(), [](auto& x, auto& y) { return x.first < y.first; });
    std::size_t next = 0;
    const auto& roads = bls_roads_[b];
    for (std::size_t j = 0; j < roads.size(); ++j) {
      const int r = roads[j];
      const double a = road_start_km_[r] - bls_start_km_[b];
      const double len = road_length_km_[r];
      double from_frac = 0.0;
      while (next < cs.size() && cs[next].first <= a + len + kSnapKm) {
        double f = (cs[next].first - a) / len;
        f = std::clamp(f, 0.0, 1.0);
        if (std::abs(cs[next].first - (a + len)) <= kSnapKm) f = 1.0;
        bls_legs_[b].push_back({r, from_frac, f, cs[next].second});
        from_frac = f;
        ++next;
      }
      if (from_frac < 1.0) bls_legs_[b].push_back({r, from_frac, 1.0, -1});
    }
  }
}

double Route::wrap(double km) const {
  double x = std::fmod(km, ring_length_km_);
  if (x < 0.0) x += ring_length_km_;
  if (x >= ring_length_km_) x = 0.0;
  return x;
}

double Route::forward_distance(double from_km, double to_km) const {
  double d = to_km - from_km;
  if (d < 0.0) d += ring_length_km_;
  if (d >= ring_length_km_) d -= ring_length_km_;
  return d;
}

double Route::route_offset(int bls_id, double fraction) const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("fraction must lie in [0, 1]");
  const auto it = std::find(bls_ids_.begin(), bls_ids_.end(), bls_id);
  if (it == bls_ids_.end()) throw ConfigError("unknown bus-line segment id " + std::to_string(bls_id));
  const auto b = static_cast<std::size_t>(it - bls_ids_.begin());
  return wrap(bls_start_km_[b] + fraction * bls_length_km_[b]);
}

DeployedLine::DeployedLine(const LineConfig& config, const DeploymentPattern& pattern)
    : config_(&config), route_(config), pattern_(pattern) {
  const auto& c = config;
  deployed_.assign(c.bus_line_segments.size(), 0);
  for (int id : pattern.ids()) {
    const int b = c.bls_index(id);
    if (!c.bus_line_segments[b].eligible_for_dbl) {
      throw ConfigError("bus-line segment " + std::to_string(id) + " is not eligible for a dedicated lane");
    }
    deployed_[b] = 1;
  }
  roads_.resize(c.segments.size());
  for (std::size_t r = 0; r < c.segments.size(); ++r) {
    const bool dbl = c.segments[r].has_dbl && deployed_[route_.road_bls(static_cast<int>(r))];
    roads_[r].dbl = dbl;
    roads_[r].base_speed_kmh = dbl ? c.dbl_speed_kmh : c.common_speed_kmh;
    roads_[r].noise_sigma_s =
        (dbl ? c.sigma_rule.dbl_s_per_km : c.sigma_rule.common_s_per_km) * c.segments[r].length_km;
  }
  road_time_start_.assign(c.segments.size(), 0.0);
  double t = 0.0;
  for (std::size_t b = 0; b < route_.bls_count(); ++b) {
    for (int r : route_.bls_roads(static_cast<int>(b))) {
      road_time_start_[r] = t;
      t += road_time(r, 0.0);
    }
  }
  lap_time_ = t;
}

std::span<const double> DeployedLine::actions(int bls) const {
  if (!deployed_[bls]) return {kZeroAction, 1};
  return config_->bus_line_segments[bls].action_set;
}

double DeployedLine::road_time(int road, double action_kmh) const {
  const auto& p = roads_[road];
  const double v = p.dbl ? p.base_speed_kmh + action_kmh : p.base_speed_kmh;
  return kSecondsPerHour * route_.road_length(road) / v;
}

double DeployedLine::time_coordinate(double km) const {
  // Locate the road containing km: bus-line segments are contiguous in ring order.
  const auto& starts = route_;
  std::size_t lo = 0, hi = starts.bls_count();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (starts.bls_start(static_cast<int>(mid)) <= km) lo = mid; else hi = mid;
  }
  const auto& roads = route_.bls_roads(static_cast<int>(lo));
  int road = roads.front();
  for (int r : roads) {
    if (route_.road_start(r) <= km) road = r;
  }
  const double into = std::clamp(km - route_.road_start(road), 0.0, route_.road_length(road));
  return road_time_start_[road] + kSecondsPerHour * into / roads_[road].base_speed_kmh;
}

double DeployedLine::cruise_time(double from_km, double dist_km) const {
  if (dist_km <= 0.0) return 0.0;
  const double ring = route_.ring_length_km();
  const double end = from_km + dist_km;
  if (end <= ring) return time_coordinate(end) - time_coordinate(from_km);
  return (lap_time_ - time_coordinate(from_km)) + time_coordinate(std::min(end - ring, ring));
}

double DeployedLine::regulated_correction(int bls, double action_kmh, double from_km, double dist_km) const {
  if (action_kmh == 0.0 || dist_km <= 0.0 || !deployed_[bls]) return 0.0;
  const double ring = route_.ring_length_km();
  const double lo = from_km, hi = from_km + dist_km;
  double delta = 0.0;
  for (int r : route_.bls_roads(bls)) {
    const auto& p = roads_[r];
    if (!p.dbl) continue;
    const double s = route_.road_start(r), e = s + route_.road_length(r);
    double overlap = std::max(0.0, std::min(hi, e) - std::max(lo, s));
    overlap += std::max(0.0, std::min(hi, e + ring) - std::max(lo, s + ring));
    if (overlap > 0.0) {
      delta += kSecondsPerHour * overlap * (1.0 / (p.base_speed_kmh + action_kmh) - 1.0 / p.base_speed_kmh);
    }
  }
  return delta;
}

}  // namespace dbl
