#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dbl/simulator.hpp"

namespace dbl {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mean headway.
double dch(std::span<const double> headways);
/// Population standard deviation of headways (divides by n).
double sigma_h(std::span<const double> headways);
/// Sum of squared deviations from the mean headway.
double action_cost(std::span<const double> headways);
/// Mean of the per-record sigma_h series.
double fsi(std::span<const double> sigma_series);
/// Sample standard deviation (n - 1) of the sigma_h series.
double fsi_std(std::span<const double> sigma_series);

std::vector<double> sigma_series(std::span<const CtpRecord> records);

struct StabilityReport {
  double fsi = 0.0;
  double fsi_std = 0.0;
  int n_ctp = 0;
  double action_abs_sum = 0.0;
  double action_abs_mean = 0.0;
  double action_abs_std = 0.0;
  int n_actions = 0;
  /// Controller decisions on deployed segments, zeros included.
  int n_decisions = 0;
  double decision_abs_mean = 0.0;
  bool bunched = false;
};

struct PassengerReport {
  /// False when no trip completed; every other field is then zero.
  bool has_trips = false;
  int n_p = 0;
  double wait_mean = 0.0, wait_std = 0.0;
  double ride_mean = 0.0, ride_std = 0.0;
  double travel_mean = 0.0, travel_std = 0.0;
};

/// Action statistics use |a| over nonzero actions; the std is n - 1 based and
/// zero with fewer than two actions.
StabilityReport stability_report(const SimOutcome& outcome);
PassengerReport passenger_stats(std::span<const CompletedTrip> trips);

}  // namespace dbl
