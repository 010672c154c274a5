#include "dbl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dbl/metrics.hpp"

namespace dbl {

namespace {

double weighted_board_s(const LineConfig& c) {
  double s = 0.0;
  for (const auto& p : c.passenger_profiles) s += p.share * p.board_s;
  return s;
}

// Expected time from a moving bus's position to the end of its segment.
double remaining_time(const BusView& v, const DeployedLine& line, const ExpectedTimes& ex, double now) {
  const auto& route = line.route();
  const auto& legs = route.bls_legs(v.bls);
  const Leg& cur = legs[v.leg];
  const double len = route.road_length(cur.road);
  double f = cur.to_frac;
  if (v.phase == BusPhase::cruising) {
    double into = route.forward_distance(route.road_start(cur.road), v.offset_km);
    if (into > len) into = into > 0.5 * route.ring_length_km() ? 0.0 : len;
    f = std::clamp(into / len, cur.from_frac, cur.to_frac);
  }
  double t = (1.0 - f) * line.road_time(cur.road, v.action_kmh);
  const auto& roads = route.bls_roads(v.bls);
  auto it = std::find(roads.begin(), roads.end(), cur.road);
  for (++it; it != roads.end(); ++it) t += line.road_time(*it, v.action_kmh);
  for (std::size_t j = static_cast<std::size_t>(v.leg); j < legs.size(); ++j) {
    if (legs[j].signal < 0) continue;
    if (static_cast<int>(j) == v.leg && v.phase == BusPhase::at_signal) {
      t += std::max(0.0, v.signal_release_s - now);
    } else {
      t += ex.signal_delay(legs[j].signal);
    }
  }
  return t;
}

constexpr double kSentinel = std::numeric_limits<double>::max();

struct Search {
  const ExpectedTimes& ex;
  int depth;
  double gamma;
  std::vector<BusPosition> pos;
  std::vector<double> h;
  std::vector<int> order;

  double level_cost(const RolloutState& s, double t) {
    rollout_positions(s, ex.line().route(), t, pos);
    instantaneous_headways(ex.line(), pos, h, order);
    return action_cost(h);
  }

  double value(const RolloutState& s, int level, double* best_action) {
    const int b = level == 1 ? s.departing : next_active(s);
    if (level > 1 && s.buses[b].t_activation > s.horizon_s) return 0.0;
    const int g = ex.line().route().bls_from_stop(s.buses[b].target_stop);
    double best = kSentinel;
    for (double a : ex.line().actions(g)) {
      RolloutState child = s;
      const double tau = activate(child, ex, b, a);
      double total = level_cost(child, tau);
      if (level < depth) total += gamma * value(child, level + 1, nullptr);
      if (!std::isfinite(total)) throw ControllerError("non-finite rollout cost");
      if (total < best) {
        best = total;
        if (best_action) *best_action = a;
      }
    }
    if (best == kSentinel) throw ControllerError("rollout found no finite cost");
    return best;
  }
};

}  // namespace

ExpectedTimes::ExpectedTimes(const DeployedLine& line) : ExpectedTimes(line, weighted_board_s(line.config())) {}

ExpectedTimes::ExpectedTimes(const DeployedLine& line, double mean_board_s)
    : line_(&line), mean_board_s_(mean_board_s) {
  const auto& c = line.config();
  const auto& route = line.route();
  for (const auto& p : c.signals) signal_delay_s_.push_back(expected_intersection_delay(p));
  bls_time_s_.assign(route.bls_count(), 0.0);
  for (std::size_t b = 0; b < route.bls_count(); ++b) {
    for (int r : route.bls_roads(static_cast<int>(b))) bls_time_s_[b] += line.road_time(r, 0.0);
  }
  for (std::size_t i = 0; i < c.signals.size(); ++i) bls_time_s_[route.signal_bls(static_cast<int>(i))] += signal_delay_s_[i];
  for (const auto& s : c.stops) rate_per_s_.push_back(s.arrival_rate_per_min / 60.0);
}

double ExpectedTimes::delta(int bls, double action_kmh) const { return delta_travel_time(*line_, bls, action_kmh); }

double expected_intersection_delay(const SignalPlan& plan) {
  const double cycle = plan.red_s + plan.green_s;
  if (cycle <= 0.0) return 0.0;
  return plan.red_s * plan.red_s / (2.0 * cycle);
}

double expected_dwell(double arrival_s, double last_s, double rate_per_s, double board_s, double alight_s) {
  const double rho = rate_per_s * board_s;
  if (rho >= 1.0) throw ControllerError("unstable stop: arrival rate times boarding time is " + std::to_string(rho));
  if (arrival_s < last_s) throw ControllerError("estimated arrival precedes the latest arrival");
  return std::max((arrival_s - last_s) * rho * (1.0 + rho), alight_s);
}

double delta_travel_time(const DeployedLine& line, int bls, double action_kmh) {
  if (action_kmh == 0.0) return 0.0;
  double d = 0.0;
  for (int r : line.route().bls_roads(bls)) {
    const auto& p = line.road(r);
    if (!p.dbl) continue;
    if (p.base_speed_kmh + action_kmh <= 0.0) throw ControllerError("regulating speed stops the bus");
    d += kSecondsPerHour * line.route().road_length(r) * (1.0 / (p.base_speed_kmh + action_kmh) - 1.0 / p.base_speed_kmh);
  }
  return d;
}

RolloutState build_state(const SimSnapshot& snap, const ExpectedTimes& ex) {
  const DeployedLine& line = *snap.line;
  const auto& route = line.route();
  RolloutState s;
  s.departing = snap.departing_bus;
  s.horizon_s = snap.horizon_end_s - snap.now;
  for (double t : snap.last_arrival_s) s.latest_arrival.push_back(t - snap.now);

  std::vector<int> moving;
  for (std::size_t i = 0; i < snap.buses.size(); ++i) {
    const auto& v = snap.buses[i];
    RolloutBus rb;
    rb.bus_id = v.bus_id;
    rb.target_stop = v.target_stop;
    rb.alight_s = v.alight_by_stop_s;
    if (v.phase == BusPhase::dwelling) {
      rb.t_arrival = v.arrival_s - snap.now;
      rb.t_activation = static_cast<int>(i) == snap.departing_bus ? 0.0 : std::max(0.0, v.departure_s - snap.now);
      rb.origin_offset_km = route.stop_offset(v.target_stop);
      rb.origin_time = rb.t_arrival;
    } else {
      rb.origin_offset_km = v.offset_km;
      rb.origin_time = 0.0;
      rb.regulated_bls = v.regulated_bls;
      rb.action_kmh = v.action_kmh;
      rb.t_arrival = remaining_time(v, line, ex, snap.now);
      moving.push_back(static_cast<int>(i));
    }
    s.buses.push_back(std::move(rb));
  }
  std::stable_sort(moving.begin(), moving.end(),
                   [&](int a, int b) { return s.buses[a].t_arrival < s.buses[b].t_arrival; });
  for (int i : moving) {
    auto& rb = s.buses[i];
    const int e = rb.target_stop;
    const double gap = std::max(0.0, rb.t_arrival - s.latest_arrival[e]);
    rb.t_activation = rb.t_arrival + expected_dwell(gap, 0.0, ex.rate_per_s(e), ex.mean_board_s(), rb.alight_s[e]);
    rb.alight_s[e] = 0.0;
    s.latest_arrival[e] = std::max(s.latest_arrival[e], rb.t_arrival);
  }
  return s;
}

double activate(RolloutState& s, const ExpectedTimes& ex, int b, double a) {
  const auto& line = ex.line();
  const auto& route = line.route();
  auto& rb = s.buses[b];
  const double tau = rb.t_activation;
  const int e = rb.target_stop;
  const int g = route.bls_from_stop(e);
  const int next = route.next_stop(e);
  const double arrival = tau + ex.bls_time(g) + ex.delta(g, a);
  const double gap = std::max(0.0, arrival - s.latest_arrival[next]);
  const double dwell = expected_dwell(gap, 0.0, ex.rate_per_s(next), ex.mean_board_s(), rb.alight_s[next]);
  rb.alight_s[next] = 0.0;
  s.latest_arrival[next] = arrival;
  rb.origin_offset_km = route.stop_offset(e);
  rb.origin_time = tau;
  rb.target_stop = next;
  rb.t_arrival = arrival;
  rb.t_activation = arrival + dwell;
  rb.regulated_bls = line.deployed(g) ? g : -1;
  rb.action_kmh = line.deployed(g) ? a : 0.0;
  return tau;
}

void rollout_positions(const RolloutState& s, const Route& route, double t, std::vector<BusPosition>& out) {
  out.resize(s.buses.size());
  for (std::size_t i = 0; i < s.buses.size(); ++i) {
    const auto& rb = s.buses[i];
    const double target = route.stop_offset(rb.target_stop);
    auto& p = out[i];
    if (t >= rb.t_arrival) {
      p = {target, -1, 0.0};
      continue;
    }
    p.regulated_bls = rb.regulated_bls;
    p.action_kmh = rb.action_kmh;
    if (t <= rb.origin_time) {
      p.offset_km = rb.origin_offset_km;
    } else {
      const double dist = route.forward_distance(rb.origin_offset_km, target);
      const double frac = (t - rb.origin_time) / (rb.t_arrival - rb.origin_time);
      p.offset_km = route.wrap(rb.origin_offset_km + frac * dist);
    }
  }
}

int next_active(const RolloutState& s) {
  int best = 0;
  for (std::size_t i = 1; i < s.buses.size(); ++i) {
    const auto& a = s.buses[i];
    const auto& b = s.buses[best];
    if (a.t_activation < b.t_activation || (a.t_activation == b.t_activation && a.bus_id < b.bus_id)) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

Selection select_action(const RolloutState& state, const ExpectedTimes& expected, int depth, double gamma) {
  if (depth < 1) throw ControllerError("look-ahead depth must be at least 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ControllerError("discount must lie in (0, 1]");
  Search search{expected, depth, gamma, {}, {}, {}};
  Selection sel;
  sel.value = search.value(state, 1, &sel.action_kmh);
  return sel;
}

LookaheadPolicy::LookaheadPolicy(int depth, double gamma) : depth_(depth), gamma_(gamma) {
  if (depth < 1) throw ControllerError("look-ahead depth must be at least 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ControllerError("discount must lie in (0, 1]");
}

double LookaheadPolicy::decide(const SimSnapshot& snapshot) {
  const ExpectedTimes ex(*snapshot.line);
  return select_action(build_state(snapshot, ex), ex, depth_, gamma_).action_kmh;
}

}  // namespace dbl
