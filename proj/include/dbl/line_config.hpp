#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbl {

/// Raised for malformed input that cannot be represented as a violation list
/// (unknown ids, bad JSON shapes, out-of-domain arguments).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SignalPhase { red, green };

struct Stop {
  int id = 0;
  double arrival_rate_per_min = 0.0;
  /// n-th entry is the probability that the n-th downstream stop is the destination.
  std::vector<double> destination_series;
};

struct RoadSegment {
  int id = 0;
  double length_km = 0.0;
  /// The segment receives a dedicated lane when its bus-line segment is deployed.
  bool has_dbl = false;
};

struct BusLineSegment {
  int id = 0;
  std::vector<int> road_segments;
  int from_stop = 0;
  int to_stop = 0;
  bool eligible_for_dbl = false;
  /// Regulating speeds in km/h.
  std::vector<double> action_set{0.0};
  std::optional<double> influence_cost;
  std::optional<double> money_cost;
};

struct SignalPlan {
  int intersection_id = 0;
  int host_segment = 0;
  double red_s = 0.0;
  double green_s = 0.0;
  SignalPhase initial_phase = SignalPhase::green;
  double initial_remaining_s = 0.0;
  /// Fraction of the host bus-line segment length. Derived when absent.
  std::optional<double> position_on_segment;
};

struct BusSpec {
  int id = 0;
  int capacity = 0;
  int initial_stop = 0;
  double initial_activation_delay_s = 0.0;
};

struct PassengerProfile {
  std::string name;
  double share = 0.0;
  double board_s = 0.0;
  double alight_s = 0.0;
};

/// Travel-time noise standard deviation per km of road, in seconds.
struct SigmaRule {
  double common_s_per_km = 5.0;
  double dbl_s_per_km = 2.0;
};

struct ConstraintSpec {
  double influence_limit = 0.0;
  double budget_limit = 0.0;
};

struct ControllerSpec {
  enum class Kind { none, lookahead };
  Kind kind = Kind::none;
  int depth = 3;
  double gamma = 0.5;

  static ControllerSpec none() { return {}; }
  static ControllerSpec lookahead(int depth, double gamma) {
    return {Kind::lookahead, depth, gamma};
  }
};

/// Defaults for a run, carried in the scenario's `run` block.
struct RunDefaults {
  std::map<std::string, std::vector<int>> presets;
  /// Preset name or empty when `pattern_ids` is used.
  std::string pattern_preset;
  std::vector<int> pattern_ids;
  std::string candidates_preset;
  std::vector<int> candidate_ids;
  ControllerSpec controller;
  int replications = 1;
  unsigned long long seed = 1;
};

struct LineConfig {
  std::vector<Stop> stops;
  std::vector<RoadSegment> segments;
  std::vector<BusLineSegment> bus_line_segments;
  std::vector<SignalPlan> signals;
  std::vector<BusSpec> buses;
  std::vector<PassengerProfile> passenger_profiles;
  ConstraintSpec constraints;

  double ring_length_km = 0.0;
  double observation_period_s = 0.0;
  double common_speed_kmh = 35.0;
  double dbl_speed_kmh = 50.0;
  SigmaRule sigma_rule;
  RunDefaults run;

  int stop_index(int stop_id) const;
  int segment_index(int road_segment_id) const;
  int bls_index(int bls_id) const;
  /// Ids of all bus-line segments eligible for a dedicated lane, in ring order.
  std::vector<int> eligible_ids() const;
  /// Resolves a preset name against `run.presets`.
  std::vector<int> preset(const std::string& name) const;
};

/// Set of deployed bus-line segment ids, kept sorted and unique.
class DeploymentPattern {
 public:
  DeploymentPattern() = default;
  explicit DeploymentPattern(std::vector<int> ids);

  const std::vector<int>& ids() const { return ids_; }
  bool contains(int bls_id) const;
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::string to_string() const;

  friend bool operator==(const DeploymentPattern&, const DeploymentPattern&) = default;
  friend auto operator<=>(const DeploymentPattern&, const DeploymentPattern&) = default;

 private:
  std::vector<int> ids_;
};

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate(const LineConfig& config);
/// Additional check: every id in `pattern` names an eligible bus-line segment.
std::vector<Violation> validate_pattern(const LineConfig& config, const DeploymentPattern& pattern);

struct ConstraintCheck {
  bool feasible = false;
  double influence_sum = 0.0;
  double money_sum = 0.0;
};

/// Sums influence and money costs over the chosen segments and compares them
/// with the limits. Unpriced segments raise ConfigError.
ConstraintCheck constraint_check(const LineConfig& config, const DeploymentPattern& pattern,
                                 const ConstraintSpec& spec);

constexpr double kSecondsPerHour = 3600.0;
constexpr double kDestinationSumTolerance = 1e-3;
constexpr double kRingLengthTolerance = 1e-6;
constexpr double kCostTolerance = 1e-9;

}  // namespace dbl
