#pragma once

#include <string>
#include <vector>

#include "dbl/line_config.hpp"
#include "dbl/scenario_io.hpp"

namespace testing {

inline dbl::LineConfig reference() { return dbl::load_scenario(std::string(DBL_DATA_DIR) + "/reference_line.json"); }

struct ToySegment {
  std::vector<double> roads_km;
  bool dbl = false;  // every road of the segment gets a lane when deployed
};

/// Ring of one bus-line segment per stop. Deterministic unless noise is set.
inline dbl::LineConfig toy_line(const std::vector<ToySegment>& segs, int buses, double rate_per_min = 0.0) {
  dbl::LineConfig c;
  const int n = static_cast<int>(segs.size());
  int road_id = 1;
  double ring = 0.0;
  for (int i = 0; i < n; ++i) {
    dbl::Stop s;
    s.id = i + 1;
    s.arrival_rate_per_min = rate_per_min;
    s.destination_series = {1.0};
    c.stops.push_back(s);
    dbl::BusLineSegment b;
    b.id = i + 1;
    b.from_stop = i + 1;
    b.to_stop = (i + 1) % n + 1;
    for (double km : segs[i].roads_km) {
      c.segments.push_back({road_id, km, segs[i].dbl});
      b.road_segments.push_back(road_id++);
      ring += km;
    }
    if (segs[i].dbl) {
      b.eligible_for_dbl = true;
      b.action_set = {-10.0, -5.0, 0.0, 5.0, 10.0};
      b.influence_cost = 1.0;
      b.money_cost = 1.0;
    }
    c.bus_line_segments.push_back(b);
  }
  for (int k = 0; k < buses; ++k) c.buses.push_back({k + 1, 50, (k * n) / buses + 1, 0.0});
  c.passenger_profiles = {{"type2", 1.0, 2.0, 0.5}};
  c.constraints = {100.0, 100.0};
  c.ring_length_km = ring;
  c.observation_period_s = 3600.0;
  c.sigma_rule = {0.0, 0.0};
  return c;
}

}  // namespace testing
