#include "dbl/experiment.hpp"

#include <cmath>

namespace dbl {

std::unique_ptr<SpeedPolicy> make_policy(const ControllerSpec& spec) {
  if (spec.kind == ControllerSpec::Kind::lookahead) return std::make_unique<LookaheadPolicy>(spec.depth, spec.gamma);
  return std::make_unique<NullPolicy>();
}

ReplicationRow summarize(int replication, const SimOutcome& outcome) {
  return {replication, stability_report(outcome), passenger_stats(outcome.completed_trips), outcome.passengers};
}

std::vector<ReplicationRow> run_replications(const LineConfig& config, const DeploymentPattern& pattern,
                                             const ControllerSpec& controller, int n, std::uint64_t base_seed) {
  std::vector<ReplicationRow> rows;
  for (int j = 0; j < n; ++j) {
    auto policy = make_policy(controller);
    rows.push_back(summarize(j, run_simulation(config, pattern, *policy, base_seed, static_cast<std::uint64_t>(j))));
  }
  return rows;
}

AggregateRow aggregate(const std::vector<ReplicationRow>& rows) {
  AggregateRow a;
  a.replications = static_cast<int>(rows.size());
  if (rows.empty()) return a;
  for (const auto& r : rows) {
    const auto& s = r.stability;
    const auto& p = r.passengers;
    a.fsi += s.fsi;
    a.fsi_std += s.fsi_std;
    a.n_ctp += s.n_ctp;
    a.action_abs_sum += s.action_abs_sum;
    a.action_abs_mean += s.action_abs_mean;
    a.action_abs_std += s.action_abs_std;
    a.n_actions += s.n_actions;
    a.n_decisions += s.n_decisions;
    a.decision_abs_mean += s.decision_abs_mean;
    a.bunch_fraction += s.bunched ? 1.0 : 0.0;
    a.n_p += p.n_p;
    a.wait_mean += p.wait_mean;
    a.wait_std += p.wait_std;
    a.ride_mean += p.ride_mean;
    a.ride_std += p.ride_std;
    a.travel_mean += p.travel_mean;
    a.travel_std += p.travel_std;
  }
  const double n = static_cast<double>(rows.size());
  for (double* f : {&a.fsi, &a.fsi_std, &a.n_ctp, &a.action_abs_sum, &a.action_abs_mean, &a.action_abs_std,
                    &a.n_actions, &a.n_decisions, &a.decision_abs_mean, &a.bunch_fraction, &a.n_p, &a.wait_mean,
                    &a.wait_std, &a.ride_mean, &a.ride_std, &a.travel_mean, &a.travel_std}) {
    *f /= n;
  }
  if (rows.size() > 1) {
    double ss = 0.0;
    for (const auto& r : rows) ss += (r.stability.fsi - a.fsi) * (r.stability.fsi - a.fsi);
    a.fsi_across_std = std::sqrt(ss / (n - 1.0));
  }
  return a;
}

}  // namespace dbl
