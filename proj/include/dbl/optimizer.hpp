#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbl/line_config.hpp"

namespace dbl {

class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pattern -> objective estimate, memoized per pattern.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  double evaluate(const DeploymentPattern& pattern);
  /// Distinct patterns actually computed.
  std::size_t evaluations() const { return memo_.size(); }
  std::size_t lookups() const { return lookups_; }

 protected:
  virtual double compute(const DeploymentPattern& pattern) = 0;

 private:
  std::map<DeploymentPattern, double> memo_;
  std::size_t lookups_ = 0;
};

class SyntheticEvaluator final : public Evaluator {
 public:
  explicit SyntheticEvaluator(std::function<double(const DeploymentPattern&)> f) : f_(std::move(f)) {}

 protected:
  double compute(const DeploymentPattern& pattern) override { return f_(pattern); }

 private:
  std::function<double(const DeploymentPattern&)> f_;
};

/// Mean FSI over `replications` simulation runs. With common random numbers,
/// run j of every pattern uses seed (base_seed, j); otherwise the seed also
/// depends on the pattern.
class MonteCarloEvaluator final : public Evaluator {
 public:
  MonteCarloEvaluator(const LineConfig& config, ControllerSpec controller, int replications, std::uint64_t base_seed,
                      bool common_random_numbers = true);

 protected:
  double compute(const DeploymentPattern& pattern) override;

 private:
  const LineConfig* config_;
  ControllerSpec controller_;
  int replications_;
  std::uint64_t base_seed_;
  bool crn_;
};

double evaluate_pattern(Evaluator& evaluator, const DeploymentPattern& pattern);

using Feasibility = std::function<bool(const DeploymentPattern&)>;

/// Feasibility under the configured influence and money costs.
Feasibility cost_feasibility(const LineConfig& config, const ConstraintSpec& spec);

struct SearchNode {
  int id = 0;
  int parent = -1;
  int removed_location = -1;  // -1 at the root
  std::vector<int> chosen;
  std::vector<int> remaining;
  double objective = 0.0;
  bool feasible = false;
  bool pruned = false;
  bool incumbent = false;
};

struct SearchResult {
  bool found = false;
  DeploymentPattern optimal;
  double objective = 0.0;
  int nodes_generated = 0;
  int feasible_nodes = 0;
  std::size_t evaluations = 0;
  std::vector<SearchNode> nodes;
  /// Children whose objective fell below their parent's.
  std::vector<std::string> monotonicity_violations;
};

/// Depth-first search from the full candidate list, removing one location per
/// branch in list order; a node is pruned when its objective reaches the
/// incumbent and never branched once feasible.
SearchResult branch_and_bound(const std::vector<int>& candidates, const Feasibility& feasible, Evaluator& evaluator);
SearchResult branch_and_bound(const LineConfig& config, const std::vector<int>& candidates,
                              const ConstraintSpec& spec, Evaluator& evaluator);

constexpr std::size_t kOracleMaxLocations = 20;

/// Exhaustive search over all subsets; ties go to the lexicographically
/// smallest chosen set.
SearchResult enumerate_oracle(const std::vector<int>& candidates, const Feasibility& feasible, Evaluator& evaluator);
SearchResult enumerate_oracle(const LineConfig& config, const std::vector<int>& candidates,
                              const ConstraintSpec& spec, Evaluator& evaluator);

}  // namespace dbl
