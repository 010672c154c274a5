#include "dbl/optimizer.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "dbl/experiment.hpp"

namespace dbl {

double Evaluator::evaluate(const DeploymentPattern& pattern) {
  ++lookups_;
  const auto it = memo_.find(pattern);
  if (it != memo_.end()) return it->second;
  const double v = compute(pattern);
  memo_.emplace(pattern, v);
  return v;
}

double evaluate_pattern(Evaluator& evaluator, const DeploymentPattern& pattern) { return evaluator.evaluate(pattern); }

MonteCarloEvaluator::MonteCarloEvaluator(const LineConfig& config, ControllerSpec controller, int replications,
                                         std::uint64_t base_seed, bool common_random_numbers)
    : config_(&config), controller_(controller), replications_(replications), base_seed_(base_seed),
      crn_(common_random_numbers) {
  if (replications < 1) throw SearchError("at least one replication is required");
}

double MonteCarloEvaluator::compute(const DeploymentPattern& pattern) {
  std::uint64_t seed = base_seed_;
  if (!crn_) {
    // FNV-1a over the chosen ids.
    std::uint64_t h = 1469598103934665603ULL;
    for (int id : pattern.ids()) {
      h ^= static_cast<std::uint64_t>(id) + 1;
      h *= 1099511628211ULL;
    }
    seed ^= h;
  }
  double sum = 0.0;
  for (int j = 0; j < replications_; ++j) {
    auto policy = make_policy(controller_);
    try {
      sum += stability_report(run_simulation(*config_, pattern, *policy, seed, static_cast<std::uint64_t>(j))).fsi;
    } catch (const std::exception& e) {
      throw SearchError("replication " + std::to_string(j) + " of pattern " + pattern.to_string() +
                        " failed: " + e.what());
    }
  }
  return sum / replications_;
}

Feasibility cost_feasibility(const LineConfig& config, const ConstraintSpec& spec) {
  return [&config, spec](const DeploymentPattern& p) { return constraint_check(config, p, spec).feasible; };
}

namespace {

void check_candidates(const std::vector<int>& candidates) {
  std::set<int> seen;
  for (int i : candidates) {
    if (!seen.insert(i).second) throw SearchError("duplicate candidate location " + std::to_string(i));
  }
}

}  // namespace

SearchResult branch_and_bound(const std::vector<int>& candidates, const Feasibility& feasible, Evaluator& evaluator) {
  check_candidates(candidates);
  SearchResult res;
  const std::size_t evals_before = evaluator.evaluations();
  if (!feasible(DeploymentPattern{})) return res;

  constexpr double kUnset = std::numeric_limits<double>::max();
  double gamma = kUnset;
  int best = -1;
  std::set<std::vector<int>> seen;

  auto make_node = [&](int parent, int removed, std::vector<int> chosen, std::vector<int> remaining) {
    SearchNode n;
    n.id = static_cast<int>(res.nodes.size());
    n.parent = parent;
    n.removed_location = removed;
    n.chosen = std::move(chosen);
    n.remaining = std::move(remaining);
    std::vector<int> key = n.chosen;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) throw SearchError("search tree generated a chosen set twice");
    const DeploymentPattern p(n.chosen);
    n.objective = evaluator.evaluate(p);
    n.feasible = feasible(p);
    if (n.feasible) ++res.feasible_nodes;
    if (parent >= 0 && n.objective < res.nodes[parent].objective) {
      res.monotonicity_violations.push_back("node " + std::to_string(n.id) + " " + p.to_string() + " objective " +
                                            std::to_string(n.objective) + " below parent " +
                                            std::to_string(res.nodes[parent].objective));
    }
    res.nodes.push_back(std::move(n));
    return static_cast<int>(res.nodes.size()) - 1;
  };

  int cur = make_node(-1, -1, candidates, candidates);
  while (true) {
    SearchNode& n = res.nodes[cur];
    if (n.objective >= gamma) {
      n.pruned = true;
      if (n.parent < 0) break;
      cur = n.parent;
      continue;
    }
    if (n.feasible) {
      gamma = n.objective;
      best = cur;
      if (n.parent < 0) break;
      cur = n.parent;
      continue;
    }
    if (n.remaining.empty()) {
      if (n.parent < 0) break;
      cur = n.parent;
      continue;
    }
    const int removed = n.remaining.front();
    n.remaining.erase(n.remaining.begin());
    std::vector<int> chosen;
    for (int i : n.chosen) {
      if (i != removed) chosen.push_back(i);
    }
    std::vector<int> remaining = n.remaining;
    cur = make_node(cur, removed, std::move(chosen), std::move(remaining));
  }

  res.nodes_generated = static_cast<int>(res.nodes.size());
  res.evaluations = evaluator.evaluations() - evals_before;
  if (best >= 0) {
    res.nodes[best].incumbent = true;
    res.found = true;
    res.optimal = DeploymentPattern(res.nodes[best].chosen);
    res.objective = gamma;
    if (!feasible(res.optimal)) throw SearchError("incumbent violates the constraints");
    if (res.objective == kUnset) throw SearchError("incumbent bound was never set");
  }
  return res;
}

SearchResult branch_and_bound(const LineConfig& config, const std::vector<int>& candidates,
                              const ConstraintSpec& spec, Evaluator& evaluator) {
  return branch_and_bound(candidates, cost_feasibility(config, spec), evaluator);
}

SearchResult enumerate_oracle(const std::vector<int>& candidates, const Feasibility& feasible, Evaluator& evaluator) {
  check_candidates(candidates);
  if (candidates.size() > kOracleMaxLocations) {
    throw SearchError("enumeration is limited to " + std::to_string(kOracleMaxLocations) + " locations");
  }
  SearchResult res;
  const std::size_t evals_before = evaluator.evaluations();
  const std::uint32_t n = static_cast<std::uint32_t>(candidates.size());
  std::vector<int> best_ids;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> ids;
    for (std::uint32_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) ids.push_back(candidates[k]);
    }
    const DeploymentPattern p(ids);
    ++res.nodes_generated;
    if (!feasible(p)) continue;
    ++res.feasible_nodes;
    const double v = evaluator.evaluate(p);
    if (!res.found || v < res.objective || (v == res.objective && p.ids() < best_ids)) {
      res.found = true;
      res.objective = v;
      res.optimal = p;
      best_ids = p.ids();
    }
  }
  res.evaluations = evaluator.evaluations() - evals_before;
  return res;
}

SearchResult enumerate_oracle(const LineConfig& config, const std::vector<int>& candidates,
                              const ConstraintSpec& spec, Evaluator& evaluator) {
  return enumerate_oracle(candidates, cost_feasibility(config, spec), evaluator);
}

}  // namespace dbl
