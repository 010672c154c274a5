#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "dbl/headway.hpp"
#include "dbl/line_config.hpp"
#include "dbl/rng.hpp"
#include "dbl/route.hpp"

namespace dbl {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BusPhase { dwelling, cruising, at_signal };

// ---------------------------------------------------------------------------
// Passengers

struct WaitingPassenger {
  double arrival_s = 0.0;
  int destination = 0;  // stop index
  int profile = 0;
};

struct StopQueue {
  int stop = 0;  // stop index
  std::deque<WaitingPassenger> waiting;  // ordered by arrival_s
  double last_arrival_s = 0.0;
  double last_departure_s = 0.0;
};

struct OnboardPassenger {
  int destination = 0;
  int profile = 0;
  double arrival_s = 0.0;
  double boarded_s = 0.0;
};

struct BusCabin {
  int capacity = 0;
  std::vector<OnboardPassenger> onboard;
};

struct CompletedTrip {
  double wait_s = 0.0;
  double ride_s = 0.0;
};

/// Homogeneous Poisson arrivals at one stop, generated lazily up to a horizon.
/// Destinations follow the stop's destination series; profiles follow shares.
class PassengerSource {
 public:
  PassengerSource(const LineConfig& config, int stop, Engine engine, double horizon_s);

  /// Appends every arrival with time <= min(t, horizon) not yet generated.
  void fill_until(StopQueue& queue, double t);
  std::int64_t generated() const { return generated_; }

 private:
  void draw_next();

  int stop_ = 0;
  int stop_count_ = 0;
  double rate_per_s_ = 0.0;
  double horizon_s_ = 0.0;
  Engine engine_;
  std::exponential_distribution<double> gap_;
  std::discrete_distribution<int> destination_;
  std::discrete_distribution<int> profile_;
  double next_arrival_s_ = 0.0;
  std::int64_t generated_ = 0;
};

// ---------------------------------------------------------------------------
// Elementary operations

/// max(0.2 * mean, mean + sigma * z) with mean = 3600 * length / (speed + action
/// on dedicated lanes). Always consumes exactly one normal draw.
double sample_travel_time(const RoadProfile& road, double length_km, double action_kmh, NoiseStream& noise);

/// Seconds a bus arriving at `arrival_s` waits at a pre-timed two-phase signal.
double signal_delay(const SignalPlan& plan, double arrival_s);

struct DwellOutcome {
  double departure_s = 0.0;
  int boarded = 0;
  int alighted = 0;
  int denied = 0;
};

/// Alights passengers destined for `queue.stop`, then boards FIFO (including
/// arrivals before the provisional door close) while capacity allows.
/// Dwell = max(total boarding time, total alighting time).
DwellOutcome execute_dwell(BusCabin& cabin, StopQueue& queue, double arrival_s, PassengerSource& source,
                           std::span<const PassengerProfile> profiles, std::vector<CompletedTrip>* completed);

// ---------------------------------------------------------------------------
// Controller interface

/// What a controller sees of one bus at a decision instant.
struct BusView {
  int bus_id = 0;
  BusPhase phase = BusPhase::dwelling;
  /// Dwelling stop, or the next stop ahead for a moving bus (stop index).
  int target_stop = 0;
  double offset_km = 0.0;
  int regulated_bls = -1;
  double action_kmh = 0.0;
  /// Dwelling buses: actual arrival and scheduled departure at target_stop.
  double arrival_s = 0.0;
  double departure_s = 0.0;
  /// Moving buses: current bus-line segment and first leg not yet completed.
  int bls = -1;
  int leg = -1;
  /// Buses held at a signal: release time.
  double signal_release_s = 0.0;
  /// Seconds of alighting work per stop index for passengers on board.
  std::vector<double> alight_by_stop_s;
};

struct SimSnapshot {
  const DeployedLine* line = nullptr;
  double now = 0.0;
  double horizon_end_s = 0.0;
  int departing_bus = 0;  // index into buses
  std::vector<BusView> buses;
  std::vector<double> last_arrival_s;  // per stop index
  std::vector<double> last_departure_s;
};

/// Returns the regulating speed for the departing bus's next segment. Must be
/// an element of that segment's action set.
class SpeedPolicy {
 public:
  virtual ~SpeedPolicy() = default;
  virtual double decide(const SimSnapshot& snapshot) = 0;
};

class NullPolicy final : public SpeedPolicy {
 public:
  double decide(const SimSnapshot&) override { return 0.0; }
};

// ---------------------------------------------------------------------------
// Run records

struct TrajectoryPoint {
  int stop_id = 0;
  double arrival_s = 0.0;
  double departure_s = 0.0;
};

struct CtpRecord {
  double time_s = 0.0;
  int departing_bus = 0;  // bus id
  int stop_id = 0;
  std::vector<double> headways;  // by bus index
  double action_kmh = 0.0;
};

struct PositionSample {
  double time_s = 0.0;
  std::vector<double> offsets_km;  // by bus index
};

struct PassengerLedger {
  std::int64_t generated = 0;
  std::int64_t completed = 0;
  std::int64_t onboard_at_end = 0;
  std::int64_t waiting_at_end = 0;
  std::int64_t denied_events = 0;
  int max_load_seen = 0;
};

struct SimOutcome {
  std::vector<CtpRecord> ctp_records;
  std::vector<std::vector<TrajectoryPoint>> trajectories;  // by bus index
  std::vector<CompletedTrip> completed_trips;
  /// Nonzero regulating speeds, in decision order.
  std::vector<double> action_log;
  /// Every controller decision on a deployed segment, zeros included.
  std::vector<double> decisions;
  std::vector<PositionSample> samples;
  PassengerLedger passengers;
  bool bunched = false;
};

struct BunchingRule {
  double spacing_km = 0.05;
  double min_duration_s = 300.0;
};

struct SimOptions {
  double sample_interval_s = 5.0;
  BunchingRule bunching;
};

/// True iff some pair of consecutive buses stays closer than `rule.spacing_km`
/// on every sample over a span of at least `rule.min_duration_s`.
bool detect_bunching(const Route& route, std::span<const PositionSample> samples, const BunchingRule& rule = {});

/// Event-driven run over [0, observation period].
SimOutcome run_simulation(const LineConfig& config, const DeploymentPattern& pattern, SpeedPolicy& policy,
                          std::uint64_t seed, std::uint64_t replication = 0, const SimOptions& options = {});

}  // namespace dbl
