#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "dbl/headway.hpp"
#include "dbl/route.hpp"
#include "dbl/simulator.hpp"

namespace dbl {

class ControllerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One bus in the expected-value copy of the line. Times are relative to the
/// decision instant.
struct RolloutBus {
  int bus_id = 0;
  int target_stop = 0;
  double t_arrival = 0.0;
  double t_activation = 0.0;
  /// The bus moves linearly from origin to the target stop over
  /// [origin_time, t_arrival] and then dwells there until t_activation.
  double origin_offset_km = 0.0;
  double origin_time = 0.0;
  int regulated_bls = -1;
  double action_kmh = 0.0;
  /// Expected alighting seconds per stop index.
  std::vector<double> alight_s;
};

struct RolloutState {
  std::vector<RolloutBus> buses;
  /// Modified latest arrival per stop index.
  std::vector<double> latest_arrival;
  /// Bus activated first; its target stop is the stop it is leaving.
  int departing = 0;
  /// Activations later than this are not rolled.
  double horizon_s = std::numeric_limits<double>::infinity();
};

/// Expected-value inputs of the rollout for one deployed line.
class ExpectedTimes {
 public:
  explicit ExpectedTimes(const DeployedLine& line, double mean_board_s);
  explicit ExpectedTimes(const DeployedLine& line);  // demand-weighted boarding time

  const DeployedLine& line() const { return *line_; }
  /// Expected traversal of a bus-line segment at zero action, signals included.
  double bls_time(int bls) const { return bls_time_s_[bls]; }
  double signal_delay(int signal) const { return signal_delay_s_[signal]; }
  double rate_per_s(int stop) const { return rate_per_s_[stop]; }
  double mean_board_s() const { return mean_board_s_; }
  double delta(int bls, double action_kmh) const;

 private:
  const DeployedLine* line_;
  double mean_board_s_ = 0.0;
  std::vector<double> bls_time_s_, signal_delay_s_, rate_per_s_;
};

double expected_intersection_delay(const SignalPlan& plan);

/// max{(tA - tD) r tb (1 + r tb), t_alight}, r in passengers per second.
double expected_dwell(double arrival_s, double last_s, double rate_per_s, double board_s, double alight_s);

/// Change in expected traversal time of bus-line segment `bls` when `action_kmh`
/// is applied on its dedicated lanes.
double delta_travel_time(const DeployedLine& line, int bls, double action_kmh);

RolloutState build_state(const SimSnapshot& snapshot, const ExpectedTimes& expected);

/// Applies the level transition for `bus` with `action`: the bus leaves its
/// target stop at its activation time, and the arrival, dwell and latest
/// arrival at the next stop are updated. Returns the activation time.
double activate(RolloutState& state, const ExpectedTimes& expected, int bus, double action_kmh);

/// Rollout ring positions at time `t` (relative to the decision instant).
void rollout_positions(const RolloutState& state, const Route& route, double t, std::vector<BusPosition>& out);

/// Bus activated next: smallest activation time, ties to the lowest bus id.
int next_active(const RolloutState& state);

struct Selection {
  double action_kmh = 0.0;
  double value = 0.0;
};

/// Depth-limited nested minimization of c(a1) + g*(c(a2) + g*(...)).
Selection select_action(const RolloutState& state, const ExpectedTimes& expected, int depth, double gamma);

class LookaheadPolicy final : public SpeedPolicy {
 public:
  LookaheadPolicy(int depth, double gamma);
  double decide(const SimSnapshot& snapshot) override;

 private:
  int depth_;
  double gamma_;
};

}  // namespace dbl
