#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbl/experiment.hpp"
#include "dbl/optimizer.hpp"

namespace dbl {

struct RunInfo {
  std::string scenario;
  DeploymentPattern pattern;
  ControllerSpec controller;
  unsigned long long seed = 0;
};

nlohmann::json controller_json(const ControllerSpec& spec);
nlohmann::json stability_json(const StabilityReport& r);
nlohmann::json passengers_json(const PassengerReport& r);
nlohmann::json ledger_json(const PassengerLedger& l);
nlohmann::json replication_json(const RunInfo& info, const ReplicationRow& row);
nlohmann::json aggregate_json(const RunInfo& info, const AggregateRow& row);
nlohmann::json search_json(const SearchResult& result, const std::vector<int>& candidates,
                           const ConstraintSpec& limits, const ConstraintCheck& sums);

void write_trajectories_csv(std::ostream& out, const LineConfig& config, const SimOutcome& outcome);
void write_ctps_csv(std::ostream& out, const LineConfig& config, const SimOutcome& outcome);
void write_replications_csv(std::ostream& out, const std::vector<ReplicationRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::string& label, const AggregateRow& row);
void write_search_log_csv(std::ostream& out, const SearchResult& result);

/// Shortest round-trip decimal form.
std::string format_number(double x);

}  // namespace dbl
