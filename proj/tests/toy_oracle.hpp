#pragma once

#include <algorithm>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "dbl/controller.hpp"
#include "support.hpp"

namespace testing {

using namespace dbl;

inline RolloutBus rollout_bus(int id, int target, std::size_t stops) {
  RolloutBus b;
  b.bus_id = id;
  b.target_stop = target;
  b.alight_s.assign(stops, 0.0);
  return b;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle. Written against the model description only: its own
// rollout bookkeeping, flat enumeration of every action path, and discounted
// path totals. Shares nothing with the library search except the headway
// conversion, which has its own tests.


struct OracleBus {
  int id, target;
  double arrival, activation, origin_km, origin_t;
  int reg;
  double action;
  std::vector<double> alight;
};

struct OracleState {
  std::vector<OracleBus> buses;
  std::vector<double> la;
  int first;
  double horizon;
};

struct Oracle {
  const LineConfig& c;
  const DeployedLine& line;
  double board;

  std::size_t n() const { return c.stops.size(); }

  double segment_time(int g, double a) const {
    const auto& b = c.bus_line_segments[g];
    double t = 0.0;
    for (int rid : b.road_segments) {
      const auto& road = c.segments[c.segment_index(rid)];
      const bool lane = road.has_dbl && line.pattern().contains(b.id);
      const double v = lane ? c.dbl_speed_kmh : c.common_speed_kmh;
      t += 3600.0 * road.length_km / (lane ? v + a : v);
    }
    for (const auto& sp : c.signals) {
      if (sp.host_segment == b.id) t += sp.red_s * sp.red_s / 2.0 / (sp.red_s + sp.green_s);
    }
    return t;
  }

  double stop_km(int stop) const {
    double x = 0.0;
    for (int g = 0; g < stop; ++g) {
      for (int rid : c.bus_line_segments[g].road_segments) x += c.segments[c.segment_index(rid)].length_km;
    }
    return x;
  }

  std::vector<double> actions_from(int stop) const {
    const auto& b = c.bus_line_segments[stop];
    if (!line.pattern().contains(b.id)) return {0.0};
    return b.action_set;
  }

  int pick(const OracleState& s) const {
    int best = 0;
    for (int i = 1; i < static_cast<int>(s.buses.size()); ++i) {
      const auto& x = s.buses[i];
      const auto& y = s.buses[best];
      if (x.activation < y.activation || (x.activation == y.activation && x.id < y.id)) best = i;
    }
    return best;
  }

  double step(OracleState& s, int bi, double a) const {
    auto& b = s.buses[bi];
    const double tau = b.activation;
    const int g = b.target;
    const int nxt = (g + 1) % static_cast<int>(n());
    const double arrive = tau + segment_time(g, a);
    const double rho = c.stops[nxt].arrival_rate_per_min / 60.0 * board;
    const double dwell = std::max(std::max(0.0, arrive - s.la[nxt]) * rho * (1.0 + rho), b.alight[nxt]);
    b.alight[nxt] = 0.0;
    s.la[nxt] = arrive;
    b.origin_km = stop_km(g);
    b.origin_t = tau;
    b.target = nxt;
    b.arrival = arrive;
    b.activation = arrive + dwell;
    const bool on = line.pattern().contains(c.bus_line_segments[g].id);
    b.reg = on ? g : -1;
    b.action = on ? a : 0.0;

    const double ring = c.ring_length_km;
    std::vector<BusPosition> pos;
    for (const auto& x : s.buses) {
      const double to = stop_km(x.target);
      if (tau >= x.arrival) {
        pos.push_back({to, -1, 0.0});
      } else if (tau <= x.origin_t) {
        pos.push_back({x.origin_km, x.reg, x.action});
      } else {
        double d = to - x.origin_km;
        if (d < 0) d += ring;
        double km = x.origin_km + d * (tau - x.origin_t) / (x.arrival - x.origin_t);
        if (km >= ring) km -= ring;
        pos.push_back({km, x.reg, x.action});
      }
    }
    const auto h = instantaneous_headways(line, pos);
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= static_cast<double>(h.size());
    double cost = 0.0;
    for (double v : h) cost += (v - mean) * (v - mean);
    return cost;
  }

  // Every path of length <= depth, as (first action, level costs).
  void paths(const OracleState& s, int level, int depth, std::vector<double>& costs, double first,
             std::vector<std::pair<double, std::vector<double>>>& out) const {
    const int bi = level == 1 ? s.first : pick(s);
    if (level > 1 && s.buses[bi].activation > s.horizon) {
      out.emplace_back(first, costs);
      return;
    }
    for (double a : actions_from(s.buses[bi].target)) {
      OracleState child = s;
      costs.push_back(step(child, bi, a));
      const double f = level == 1 ? a : first;
      if (level == depth) {
        out.emplace_back(f, costs);
      } else {
        paths(child, level + 1, depth, costs, f, out);
      }
      costs.pop_back();
    }
  }
};

struct OracleAnswer {
  double first_argmin;               // earliest first action reaching the minimum
  std::vector<double> best_actions;  // every first action within a rounding hair of the minimum
  double value;
};

inline OracleAnswer oracle_select(const Oracle& o, const OracleState& s, int depth, double gamma) {
  std::vector<std::pair<double, std::vector<double>>> all;
  std::vector<double> costs;
  o.paths(s, 1, depth, costs, 0.0, all);
  std::vector<std::pair<double, double>> per_first;  // first action -> min total
  for (const auto& [a, cs] : all) {
    double total = cs.back();
    for (int k = static_cast<int>(cs.size()) - 2; k >= 0; --k) total = cs[k] + gamma * total;
    auto it = std::find_if(per_first.begin(), per_first.end(), [&](const auto& p) { return p.first == a; });
    if (it == per_first.end()) {
      per_first.emplace_back(a, total);
    } else {
      it->second = std::min(it->second, total);
    }
  }
  double best = std::numeric_limits<double>::infinity(), arg = 0.0;
  for (const auto& p : per_first) {
    if (p.second < best) {
      best = p.second;
      arg = p.first;
    }
  }
  OracleAnswer ans{arg, {}, best};
  for (const auto& p : per_first) {
    if (p.second <= best + 1e-9 * std::max(1.0, best)) ans.best_actions.push_back(p.first);
  }
  return ans;
}

struct ToyCase {
  LineConfig config;
  DeploymentPattern pattern;
  RolloutState state;
  int depth;
  double gamma;
};

inline ToyCase random_case(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); };
  const int nseg = pick(3, 5);
  std::vector<testing::ToySegment> segs;
  for (int i = 0; i < nseg; ++i) {
    testing::ToySegment s;
    for (int r = pick(1, 2); r > 0; --r) s.roads_km.push_back(0.2 + 0.6 * u(g));
    s.dbl = i == 0 || u(g) < 0.5;
    segs.push_back(s);
  }
  const int nbus = pick(2, 3);
  ToyCase t{testing::toy_line(segs, nbus), {}, {}, pick(1, 3), u(g) < 0.3 ? 0.5 : 0.1 + 0.9 * u(g)};
  auto& c = t.config;
  for (auto& s : c.stops) s.arrival_rate_per_min = 3.0 * u(g);
  if (u(g) < 0.5) {
    SignalPlan sp;
    sp.intersection_id = 1;
    sp.host_segment = pick(1, nseg);
    sp.red_s = 20 + 40 * u(g);
    sp.green_s = 20 + 40 * u(g);
    sp.initial_remaining_s = 10;
    sp.position_on_segment = 0.5;
    c.signals.push_back(sp);
  }
  std::vector<int> deployed{1};
  for (int i = 2; i <= nseg; ++i) {
    if (segs[i - 1].dbl && u(g) < 0.6) deployed.push_back(i);
  }
  t.pattern = DeploymentPattern(deployed);

  const Route r(c);
  auto& s = t.state;
  const std::size_t n = c.stops.size();
  s.latest_arrival.resize(n);
  for (auto& v : s.latest_arrival) v = -150.0 * u(g);
  const std::vector<int> starts(deployed.begin(), deployed.end());
  for (int b = 0; b < nbus; ++b) {
    RolloutBus rb = rollout_bus(b + 1, 0, n);
    for (auto& a : rb.alight_s) a = u(g) < 0.5 ? 0.0 : 6.0 * u(g);
    if (b == 0) {
      rb.target_stop = starts[pick(0, static_cast<int>(starts.size()) - 1)] - 1;
      rb.t_arrival = -30.0 * u(g);
      rb.t_activation = 0.0;
      rb.origin_offset_km = r.stop_offset(rb.target_stop);
      rb.origin_time = rb.t_arrival;
      rb.alight_s[rb.target_stop] = 0.0;
    } else if (u(g) < 0.4) {
      rb.target_stop = pick(0, static_cast<int>(n) - 1);
      rb.t_arrival = -40.0 * u(g);
      rb.t_activation = u(g) < 0.2 ? 0.0 : 40.0 * u(g);
      rb.origin_offset_km = r.stop_offset(rb.target_stop);
      rb.origin_time = rb.t_arrival;
      rb.alight_s[rb.target_stop] = 0.0;
    } else {
      rb.target_stop = pick(0, static_cast<int>(n) - 1);
      const int in = (rb.target_stop + static_cast<int>(n) - 1) % static_cast<int>(n);
      rb.origin_offset_km = r.wrap(r.stop_offset(rb.target_stop) - r.bls_length(in) * (0.05 + 0.9 * u(g)));
      rb.origin_time = 0.0;
      rb.t_arrival = 1.0 + 80.0 * u(g);
      rb.t_activation = rb.t_arrival + 10.0 * u(g);
      if (t.pattern.contains(in + 1) && u(g) < 0.7) {
        rb.regulated_bls = in;
        rb.action_kmh = 5.0 * pick(-2, 2);
      }
    }
    s.buses.push_back(rb);
  }
  std::shuffle(s.buses.begin() + 1, s.buses.end(), g);
  s.departing = 0;
  if (u(g) < 0.3) s.horizon_s = 30.0 + 200.0 * u(g);
  return t;
}

inline OracleState to_oracle(const RolloutState& s) {
  OracleState o{{}, s.latest_arrival, s.departing, s.horizon_s};
  for (const auto& b : s.buses) {
    o.buses.push_back({b.bus_id, b.target_stop, b.t_arrival, b.t_activation, b.origin_offset_km, b.origin_time,
                       b.regulated_bls, b.action_kmh, b.alight_s});
  }
  return o;
}

}  // namespace testing
