#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dbl/controller.hpp"
#include "dbl/metrics.hpp"

namespace dbl {

std::unique_ptr<SpeedPolicy> make_policy(const ControllerSpec& spec);

struct ReplicationRow {
  int replication = 0;
  StabilityReport stability;
  PassengerReport passengers;
  PassengerLedger ledger;
};

ReplicationRow summarize(int replication, const SimOutcome& outcome);

/// Runs replications 0..n-1 with seed (base_seed, j).
std::vector<ReplicationRow> run_replications(const LineConfig& config, const DeploymentPattern& pattern,
                                             const ControllerSpec& controller, int n, std::uint64_t base_seed);

/// Field-wise mean over replications; `bunch_fraction` is the share of bunched runs.
struct AggregateRow {
  int replications = 0;
  double fsi = 0.0, fsi_std = 0.0, fsi_across_std = 0.0, n_ctp = 0.0;
  double action_abs_sum = 0.0, action_abs_mean = 0.0, action_abs_std = 0.0, n_actions = 0.0;
  double n_decisions = 0.0, decision_abs_mean = 0.0;
  double bunch_fraction = 0.0;
  double n_p = 0.0;
  double wait_mean = 0.0, wait_std = 0.0, ride_mean = 0.0, ride_std = 0.0, travel_mean = 0.0, travel_std = 0.0;

  bool bunched() const { return bunch_fraction > 0.5; }
};

AggregateRow aggregate(const std::vector<ReplicationRow>& rows);

}  // namespace dbl
