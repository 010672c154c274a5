#include "dbl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>

namespace dbl {

// ---------------------------------------------------------------------------
// PassengerSource

PassengerSource::PassengerSource(const LineConfig& config, int stop, Engine engine, double horizon_s)
    : stop_(stop),
      stop_count_(static_cast<int>(config.stops.size())),
      rate_per_s_(config.stops[stop].arrival_rate_per_min / 60.0),
      horizon_s_(horizon_s),
      engine_(std::move(engine)),
      gap_(rate_per_s_ > 0.0 ? rate_per_s_ : 1.0) {
  const auto& series = config.stops[stop].destination_series;
  destination_ = std::discrete_distribution<int>(series.begin(), series.end());
  std::vector<double> shares;
  for (const auto& p : config.passenger_profiles) shares.push_back(p.share);
  profile_ = std::discrete_distribution<int>(shares.begin(), shares.end());
  draw_next();
}

void PassengerSource::draw_next() {
  next_arrival_s_ = rate_per_s_ > 0.0 ? next_arrival_s_ + gap_(engine_) : horizon_s_ + 1.0;
}

void PassengerSource::fill_until(StopQueue& queue, double t) {
  const double until = std::min(t, horizon_s_);
  while (next_arrival_s_ <= until) {
    WaitingPassenger p;
    p.arrival_s = next_arrival_s_;
    p.destination = (stop_ + 1 + destination_(engine_)) % stop_count_;
    p.profile = profile_(engine_);
    queue.waiting.push_back(p);
    ++generated_;
    draw_next();
  }
}

// ---------------------------------------------------------------------------
// Elementary operations

double sample_travel_time(const RoadProfile& road, double length_km, double action_kmh, NoiseStream& noise) {
  const double v = road.dbl ? road.base_speed_kmh + action_kmh : road.base_speed_kmh;
  if (!(v > 0.0)) throw SimulationError("non-positive cruise speed");
  const double mean = kSecondsPerHour * length_km / v;
  const double z = noise.draw();
  return std::max(0.2 * mean, mean + road.noise_sigma_s * z);
}

double signal_delay(const SignalPlan& plan, double arrival_s) {
  const double cycle = plan.green_s + plan.red_s;
  // Position in a cycle that starts with green.
  const double pos0 = plan.initial_phase == SignalPhase::green ? plan.green_s - plan.initial_remaining_s
                                                                : plan.green_s + (plan.red_s - plan.initial_remaining_s);
  double pos = std::fmod(pos0 + arrival_s, cycle);
  if (pos < 0.0) pos += cycle;
  if (pos < plan.green_s) return 0.0;
  return cycle - pos;
}

DwellOutcome execute_dwell(BusCabin& cabin, StopQueue& queue, double arrival_s, PassengerSource& source,
                           std::span<const PassengerProfile> profiles, std::vector<CompletedTrip>* completed) {
  DwellOutcome out;
  double alight_total = 0.0;
  auto& onboard = cabin.onboard;
  for (std::size_t i = 0; i < onboard.size();) {
    if (onboard[i].destination == queue.stop) {
      alight_total += profiles[onboard[i].profile].alight_s;
      if (completed) {
        completed->push_back({onboard[i].boarded_s - onboard[i].arrival_s, arrival_s - onboard[i].boarded_s});
      }
      onboard[i] = onboard.back();
      onboard.pop_back();
      ++out.alighted;
    } else {
      ++i;
    }
  }

  double board_total = 0.0;
  double close = arrival_s + alight_total;
  source.fill_until(queue, close);
  while (!queue.waiting.empty() && queue.waiting.front().arrival_s <= close) {
    if (static_cast<int>(onboard.size()) >= cabin.capacity) {
      for (const auto& w : queue.waiting) {
        if (w.arrival_s > close) break;
        ++out.denied;
      }
      break;
    }
    const auto p = queue.waiting.front();
    queue.waiting.pop_front();
    onboard.push_back({p.destination, p.profile, p.arrival_s, std::max(arrival_s, p.arrival_s)});
    board_total += profiles[p.profile].board_s;
    ++out.boarded;
    close = arrival_s + std::max(board_total, alight_total);
    source.fill_until(queue, close);
  }
  out.departure_s = arrival_s + std::max(board_total, alight_total);
  return out;
}

// ---------------------------------------------------------------------------
// Bunching

bool detect_bunching(const Route& route, std::span<const PositionSample> samples, const BunchingRule& rule) {
  std::map<std::pair<int, int>, double> run_start;
  std::vector<BusPosition> pos;
  for (const auto& s : samples) {
    pos.assign(s.offsets_km.size(), {});
    for (std::size_t b = 0; b < pos.size(); ++b) pos[b].offset_km = s.offsets_km[b];
    if (pos.size() < 2) return false;
    const auto order = ring_order(route, pos);
    std::map<std::pair<int, int>, double> next;
    for (std::size_t b = 0; b < pos.size(); ++b) {
      if (order.gap_km[b] >= rule.spacing_km) continue;
      const int a = static_cast<int>(b), c = order.preceding[b];
      const auto key = std::minmax(a, c);
      const auto it = run_start.find(key);
      const double start = it == run_start.end() ? s.time_s : it->second;
      if (s.time_s - start >= rule.min_duration_s) return true;
      next.emplace(key, start);
    }
    run_start = std::move(next);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

enum class EventKind : int { sample = 0, leg_end = 1, signal_release = 2, depart = 3 };

struct Event {
  double time;
  EventKind kind;
  int bus;
  std::uint64_t seq;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    if (bus != o.bus) return bus > o.bus;
    return seq > o.seq;
  }
};

struct SimBus {
  int id = 0;
  BusPhase phase = BusPhase::dwelling;
  int stop = 0;  // dwelling stop, or the stop the current segment leads to
  int bls = -1;
  int leg = -1;
  double leg_start_s = 0.0;
  double leg_duration_s = 0.0;
  double road_time_s = 0.0;  // sampled time of the road being traversed
  double action = 0.0;
  double arrival_s = 0.0;
  double departure_s = 0.0;
  double release_s = 0.0;
  BusCabin cabin;
};

class SimEngine {
 public:
  SimEngine(const LineConfig& config, const DeploymentPattern& pattern, SpeedPolicy& policy, std::uint64_t seed,
         std::uint64_t replication, const SimOptions& options)
      : config_(config), line_(config, pattern), route_(line_.route()), policy_(policy), options_(options) {
    const double horizon = config.observation_period_s;
    for (std::size_t s = 0; s < config.stops.size(); ++s) {
      queues_.push_back({static_cast<int>(s), {}, 0.0, 0.0});
      sources_.emplace_back(config, static_cast<int>(s),
                            make_stream(seed, replication, StreamKind::passengers, s), horizon);
    }
    for (std::size_t r = 0; r < config.segments.size(); ++r) {
      noise_.push_back({make_stream(seed, replication, StreamKind::travel, r)});
    }
    buses_.resize(config.buses.size());
    out_.trajectories.resize(config.buses.size());
    for (std::size_t b = 0; b < buses_.size(); ++b) {
      const auto& spec = config.buses[b];
      auto& bus = buses_[b];
      bus.id = spec.id;
      bus.stop = config.stop_index(spec.initial_stop);
      bus.cabin.capacity = spec.capacity;
      bus.arrival_s = 0.0;
      bus.departure_s = spec.initial_activation_delay_s;
      push(bus.departure_s, EventKind::depart, static_cast<int>(b));
    }
    push(0.0, EventKind::sample, -1);
  }

  SimOutcome run() {
    const double end = config_.observation_period_s;
    while (!events_.empty() && events_.top().time <= end) {
      const Event ev = events_.top();
      events_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case EventKind::sample: on_sample(); break;
        case EventKind::leg_end: on_leg_end(ev.bus); break;
        case EventKind::signal_release: on_release(ev.bus); break;
        case EventKind::depart: on_depart(ev.bus); break;
      }
    }
    finish();
    return std::move(out_);
  }

 private:
  void push(double t, EventKind kind, int bus) { events_.push({t, kind, bus, seq_++}); }

  double offset_of(const SimBus& bus) const {
    if (bus.phase == BusPhase::dwelling) return route_.stop_offset(bus.stop);
    const Leg& leg = route_.bls_legs(bus.bls)[bus.leg];
    double frac = leg.to_frac;
    if (bus.phase == BusPhase::cruising && bus.leg_duration_s > 0.0) {
      const double p = std::clamp((now_ - bus.leg_start_s) / bus.leg_duration_s, 0.0, 1.0);
      frac = leg.from_frac + (leg.to_frac - leg.from_frac) * p;
    }
    return route_.wrap(route_.road_start(leg.road) + frac * route_.road_length(leg.road));
  }

  BusPosition position_of(const SimBus& bus) const {
    BusPosition p{offset_of(bus), -1, 0.0};
    if (bus.phase != BusPhase::dwelling && line_.deployed(bus.bls)) {
      p.regulated_bls = bus.bls;
      p.action_kmh = bus.action;
    }
    return p;
  }

  void on_sample() {
    PositionSample s;
    s.time_s = now_;
    for (const auto& bus : buses_) s.offsets_km.push_back(offset_of(bus));
    out_.samples.push_back(std::move(s));
    push(now_ + options_.sample_interval_s, EventKind::sample, -1);
  }

  SimSnapshot snapshot(int departing) const {
    SimSnapshot snap;
    snap.line = &line_;
    snap.now = now_;
    snap.horizon_end_s = config_.observation_period_s;
    snap.departing_bus = departing;
    for (const auto& q : queues_) {
      snap.last_arrival_s.push_back(q.last_arrival_s);
      snap.last_departure_s.push_back(q.last_departure_s);
    }
    for (const auto& bus : buses_) {
      BusView v;
      v.bus_id = bus.id;
      v.phase = bus.phase;
      v.target_stop = bus.stop;
      const auto p = position_of(bus);
      v.offset_km = p.offset_km;
      v.regulated_bls = p.regulated_bls;
      v.action_kmh = bus.phase == BusPhase::dwelling ? 0.0 : bus.action;
      v.arrival_s = bus.arrival_s;
      v.departure_s = bus.departure_s;
      v.bls = bus.phase == BusPhase::dwelling ? -1 : bus.bls;
      v.leg = bus.phase == BusPhase::dwelling ? -1 : bus.leg;
      v.signal_release_s = bus.release_s;
      v.alight_by_stop_s.assign(config_.stops.size(), 0.0);
      for (const auto& o : bus.cabin.onboard) {
        v.alight_by_stop_s[o.destination] += config_.passenger_profiles[o.profile].alight_s;
      }
      snap.buses.push_back(std::move(v));
    }
    return snap;
  }

  void board_at_activation(SimBus& bus) {
    auto& q = queues_[bus.stop];
    sources_[bus.stop].fill_until(q, now_);
    while (!q.waiting.empty() && static_cast<int>(bus.cabin.onboard.size()) < bus.cabin.capacity) {
      const auto p = q.waiting.front();
      q.waiting.pop_front();
      bus.cabin.onboard.push_back({p.destination, p.profile, p.arrival_s, now_});
    }
    if (!q.waiting.empty()) out_.passengers.denied_events += static_cast<std::int64_t>(q.waiting.size());
  }

  void on_depart(int b) {
    auto& bus = buses_[b];
    if (out_.trajectories[b].empty()) {
      board_at_activation(bus);
      out_.trajectories[b].push_back({config_.stops[bus.stop].id, bus.arrival_s, now_});
    }
    note_load(bus);
    queues_[bus.stop].last_departure_s = now_;
    const int g = route_.bls_from_stop(bus.stop);
    double action = 0.0;
    if (line_.deployed(g)) {
      const auto snap = snapshot(b);
      try {
        action = policy_.decide(snap);
      } catch (const std::exception& e) {
        throw SimulationError("controller failed for bus " + std::to_string(bus.id) + " at t=" +
                              std::to_string(now_) + ": " + e.what());
      }
      const auto acts = line_.actions(g);
      if (std::find(acts.begin(), acts.end(), action) == acts.end()) {
        throw SimulationError("controller returned " + std::to_string(action) + " outside the action set of segment " +
                              std::to_string(config_.bus_line_segments[g].id));
      }
      out_.decisions.push_back(action);
      if (action != 0.0) out_.action_log.push_back(action);
    }

    const int from_stop = bus.stop;
    bus.phase = BusPhase::cruising;
    bus.bls = g;
    bus.leg = 0;
    bus.action = action;
    bus.stop = route_.bls_to_stop(g);
    bus.leg_start_s = now_;
    bus.leg_duration_s = 0.0;

    CtpRecord rec;
    rec.time_s = now_;
    rec.departing_bus = bus.id;
    rec.stop_id = config_.stops[from_stop].id;
    rec.action_kmh = action;
    positions_.clear();
    for (const auto& other : buses_) positions_.push_back(position_of(other));
    instantaneous_headways(line_, positions_, rec.headways, order_);
    out_.ctp_records.push_back(std::move(rec));

    start_leg(b);
  }

  void start_leg(int b) {
    auto& bus = buses_[b];
    const Leg& leg = route_.bls_legs(bus.bls)[bus.leg];
    if (leg.from_frac == 0.0) {
      bus.road_time_s = sample_travel_time(line_.road(leg.road), route_.road_length(leg.road), bus.action,
                                           noise_[leg.road]);
    }
    bus.phase = BusPhase::cruising;
    bus.leg_start_s = now_;
    bus.leg_duration_s = bus.road_time_s * (leg.to_frac - leg.from_frac);
    push(now_ + bus.leg_duration_s, EventKind::leg_end, b);
  }

  void on_leg_end(int b) {
    auto& bus = buses_[b];
    const Leg& leg = route_.bls_legs(bus.bls)[bus.leg];
    if (leg.signal >= 0) {
      const double wait = signal_delay(config_.signals[leg.signal], now_);
      if (wait > 0.0) {
        bus.phase = BusPhase::at_signal;
        bus.release_s = now_ + wait;
        push(bus.release_s, EventKind::signal_release, b);
        return;
      }
    }
    advance(b);
  }

  void on_release(int b) { advance(b); }

  void advance(int b) {
    auto& bus = buses_[b];
    if (bus.leg + 1 < static_cast<int>(route_.bls_legs(bus.bls).size())) {
      ++bus.leg;
      start_leg(b);
      return;
    }
    arrive(b);
  }

  void arrive(int b) {
    auto& bus = buses_[b];
    bus.phase = BusPhase::dwelling;
    bus.action = 0.0;
    bus.arrival_s = now_;
    auto& q = queues_[bus.stop];
    sources_[bus.stop].fill_until(q, now_);
    const auto d = execute_dwell(bus.cabin, q, now_, sources_[bus.stop], config_.passenger_profiles,
                                 &out_.completed_trips);
    out_.passengers.denied_events += d.denied;
    q.last_arrival_s = now_;
    bus.departure_s = d.departure_s;
    note_load(bus);
    out_.trajectories[b].push_back({config_.stops[bus.stop].id, now_, d.departure_s});
    push(d.departure_s, EventKind::depart, b);
  }

  void note_load(const SimBus& bus) {
    const int load = static_cast<int>(bus.cabin.onboard.size());
    if (load > bus.cabin.capacity) throw SimulationError("capacity exceeded on bus " + std::to_string(bus.id));
    out_.passengers.max_load_seen = std::max(out_.passengers.max_load_seen, load);
  }

  void finish() {
    auto& led = out_.passengers;
    for (std::size_t s = 0; s < queues_.size(); ++s) {
      sources_[s].fill_until(queues_[s], config_.observation_period_s);
      led.generated += sources_[s].generated();
      led.waiting_at_end += static_cast<std::int64_t>(queues_[s].waiting.size());
    }
    for (const auto& bus : buses_) led.onboard_at_end += static_cast<std::int64_t>(bus.cabin.onboard.size());
    led.completed = static_cast<std::int64_t>(out_.completed_trips.size());
    out_.bunched = detect_bunching(route_, out_.samples, options_.bunching);
  }

  const LineConfig& config_;
  DeployedLine line_;
  const Route& route_;
  SpeedPolicy& policy_;
  SimOptions options_;
  std::vector<StopQueue> queues_;
  std::vector<PassengerSource> sources_;
  std::vector<NoiseStream> noise_;
  std::vector<SimBus> buses_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  SimOutcome out_;
  std::vector<BusPosition> positions_;
  std::vector<int> order_;
};

}  // namespace

SimOutcome run_simulation(const LineConfig& config, const DeploymentPattern& pattern, SpeedPolicy& policy,
                          std::uint64_t seed, std::uint64_t replication, const SimOptions& options) {
  SimEngine engine(config, pattern, policy, seed, replication, options);
  return engine.run();
}

}  // namespace dbl
