#include "dbl/report_io.hpp"

#include <charconv>

namespace dbl {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(ids[i]);
  }
  return s;
}

}  // namespace

json controller_json(const ControllerSpec& spec) {
  if (spec.kind == ControllerSpec::Kind::none) return {{"type", "none"}};
  return {{"type", "lookahead"}, {"depth", spec.depth}, {"gamma", spec.gamma}};
}

json stability_json(const StabilityReport& r) {
  return {{"fsi", r.fsi},
          {"fsi_std", r.fsi_std},
          {"n_ctp", r.n_ctp},
          {"action_abs_sum", r.action_abs_sum},
          {"action_abs_mean", r.action_abs_mean},
          {"action_abs_std", r.action_abs_std},
          {"n_actions", r.n_actions},
          {"n_decisions", r.n_decisions},
          {"decision_abs_mean", r.decision_abs_mean},
          {"bunched", r.bunched}};
}

json passengers_json(const PassengerReport& r) {
  return {{"has_trips", r.has_trips}, {"n_p", r.n_p},
          {"wait_mean", r.wait_mean}, {"wait_std", r.wait_std},
          {"ride_mean", r.ride_mean}, {"ride_std", r.ride_std},
          {"travel_mean", r.travel_mean}, {"travel_std", r.travel_std}};
}

json ledger_json(const PassengerLedger& l) {
  return {{"generated", l.generated},         {"completed", l.completed},
          {"onboard_at_end", l.onboard_at_end}, {"waiting_at_end", l.waiting_at_end},
          {"denied_events", l.denied_events}, {"max_load_seen", l.max_load_seen}};
}

json replication_json(const RunInfo& info, const ReplicationRow& row) {
  return {{"scenario", info.scenario},
          {"pattern", info.pattern.ids()},
          {"controller", controller_json(info.controller)},
          {"seed", info.seed},
          {"replication", row.replication},
          {"stability", stability_json(row.stability)},
          {"passengers", passengers_json(row.passengers)},
          {"ledger", ledger_json(row.ledger)}};
}

json aggregate_json(const RunInfo& info, const AggregateRow& a) {
  return {{"scenario", info.scenario},
          {"pattern", info.pattern.ids()},
          {"controller", controller_json(info.controller)},
          {"seed", info.seed},
          {"replications", a.replications},
          {"fsi", a.fsi},
          {"fsi_std", a.fsi_std},
          {"fsi_across_std", a.fsi_across_std},
          {"n_ctp", a.n_ctp},
          {"action_abs_sum", a.action_abs_sum},
          {"action_abs_mean", a.action_abs_mean},
          {"action_abs_std", a.action_abs_std},
          {"n_actions", a.n_actions},
          {"n_decisions", a.n_decisions},
          {"decision_abs_mean", a.decision_abs_mean},
          {"bunch_fraction", a.bunch_fraction},
          {"bunched", a.bunched()},
          {"n_p", a.n_p},
          {"wait_mean", a.wait_mean},
          {"wait_std", a.wait_std},
          {"ride_mean", a.ride_mean},
          {"ride_std", a.ride_std},
          {"travel_mean", a.travel_mean},
          {"travel_std", a.travel_std}};
}

json search_json(const SearchResult& r, const std::vector<int>& candidates, const ConstraintSpec& limits,
                 const ConstraintCheck& sums) {
  json j = {{"candidates", candidates},
            {"influence_limit", limits.influence_limit},
            {"budget_limit", limits.budget_limit},
            {"found", r.found},
            {"nodes_generated", r.nodes_generated},
            {"feasible_nodes", r.feasible_nodes},
            {"evaluations", r.evaluations},
            {"monotonicity_violations", r.monotonicity_violations}};
  if (r.found) {
    j["optimal_locations"] = r.optimal.ids();
    j["objective"] = r.objective;
    j["influence_sum"] = sums.influence_sum;
    j["money_sum"] = sums.money_sum;
  }
  return j;
}

void write_trajectories_csv(std::ostream& out, const LineConfig& config, const SimOutcome& o) {
  out << "bus_id,stop_id,arrival_s,departure_s\n";
  for (std::size_t b = 0; b < o.trajectories.size(); ++b) {
    for (const auto& p : o.trajectories[b]) {
      out << config.buses[b].id << ',' << p.stop_id << ',' << format_number(p.arrival_s) << ','
          << format_number(p.departure_s) << '\n';
    }
  }
}

void write_ctps_csv(std::ostream& out, const LineConfig& config, const SimOutcome& o) {
  out << "time_s,bus_id";
  for (const auto& b : config.buses) out << ",h_" << b.id;
  out << ",action\n";
  for (const auto& r : o.ctp_records) {
    out << format_number(r.time_s) << ',' << r.departing_bus;
    for (double h : r.headways) out << ',' << format_number(h);
    out << ',' << format_number(r.action_kmh) << '\n';
  }
}

void write_replications_csv(std::ostream& out, const std::vector<ReplicationRow>& rows) {
  out << "replication,fsi,fsi_std,n_ctp,action_abs_sum,action_abs_mean,action_abs_std,n_actions,n_decisions,"
         "decision_abs_mean,bunched,n_p,wait_mean,wait_std,ride_mean,ride_std,travel_mean,travel_std\n";
  for (const auto& r : rows) {
    const auto& s = r.stability;
    const auto& p = r.passengers;
    out << r.replication << ',' << format_number(s.fsi) << ',' << format_number(s.fsi_std) << ',' << s.n_ctp << ','
        << format_number(s.action_abs_sum) << ',' << format_number(s.action_abs_mean) << ','
        << format_number(s.action_abs_std) << ',' << s.n_actions << ',' << s.n_decisions << ','
        << format_number(s.decision_abs_mean) << ',' << (s.bunched ? 1 : 0) << ',' << p.n_p << ','
        << format_number(p.wait_mean) << ',' << format_number(p.wait_std) << ',' << format_number(p.ride_mean) << ','
        << format_number(p.ride_std) << ',' << format_number(p.travel_mean) << ',' << format_number(p.travel_std)
        << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::string& label, const AggregateRow& a) {
  out << "strategy,replications,fsi,fsi_std,n_ctp,action_abs_sum,action_abs_mean,action_abs_std,n_actions,"
         "bunch_fraction,bunch,n_p,wait_mean,wait_std,ride_mean,ride_std,travel_mean,travel_std\n";
  out << label << ',' << a.replications << ',' << format_number(a.fsi) << ',' << format_number(a.fsi_std) << ','
      << format_number(a.n_ctp) << ',' << format_number(a.action_abs_sum) << ',' << format_number(a.action_abs_mean)
      << ',' << format_number(a.action_abs_std) << ',' << format_number(a.n_actions) << ','
      << format_number(a.bunch_fraction) << ',' << (a.bunched() ? "Yes" : "No") << ',' << format_number(a.n_p) << ','
      << format_number(a.wait_mean) << ',' << format_number(a.wait_std) << ',' << format_number(a.ride_mean) << ','
      << format_number(a.ride_std) << ',' << format_number(a.travel_mean) << ',' << format_number(a.travel_std)
      << '\n';
}

void write_search_log_csv(std::ostream& out, const SearchResult& r) {
  out << "node_id,parent_id,removed_location,chosen_set,objective,feasible,pruned\n";
  for (const auto& n : r.nodes) {
    out << n.id << ',';
    if (n.parent >= 0) out << n.parent;
    out << ',';
    if (n.removed_location >= 0) out << n.removed_location;
    out << ',' << join_ids(n.chosen) << ',' << format_number(n.objective) << ',' << (n.feasible ? 1 : 0) << ','
        << (n.pruned ? 1 : 0) << '\n';
  }
}

}  // namespace dbl
