#pragma once

#include <span>
#include <vector>

#include "dbl/line_config.hpp"

namespace dbl {

/// Piece of a bus-line segment traversal: a fraction range of one road
/// segment, optionally ending at a signalised intersection.
struct Leg {
  int road = 0;  // road segment index
  double from_frac = 0.0;
  double to_frac = 1.0;
  int signal = -1;  // signal index crossed at the end of the leg, or -1
};

/// Pattern-independent ring geometry. All indices are 0-based positions in the
/// corresponding LineConfig vectors; ids stay 1-based.
class Route {
 public:
  explicit Route(const LineConfig& config);

  double ring_length_km() const { return ring_length_km_; }
  std::size_t stop_count() const { return stop_offset_km_.size(); }
  std::size_t bls_count() const { return bls_start_km_.size(); }
  std::size_t road_count() const { return road_start_km_.size(); }

  /// Offset of `fraction` along bus-line segment `bls_id`, wrapped into [0, ring).
  double route_offset(int bls_id, double fraction) const;

  double stop_offset(int stop) const { return stop_offset_km_[stop]; }
  double bls_start(int bls) const { return bls_start_km_[bls]; }
  double bls_length(int bls) const { return bls_length_km_[bls]; }
  double road_start(int road) const { return road_start_km_[road]; }
  double road_length(int road) const { return road_length_km_[road]; }
  int road_bls(int road) const { return road_bls_[road]; }
  const std::vector<int>& bls_roads(int bls) const { return bls_roads_[bls]; }
  const std::vector<Leg>& bls_legs(int bls) const { return bls_legs_[bls]; }

  /// Bus-line segment leaving `stop` and the stop it leads to.
  int bls_from_stop(int stop) const { return bls_from_stop_[stop]; }
  int next_stop(int stop) const { return next_stop_[stop]; }
  int bls_to_stop(int bls) const { return bls_to_stop_[bls]; }

  double signal_offset(int signal) const { return signal_offset_km_[signal]; }
  double signal_fraction(int signal) const { return signal_fraction_[signal]; }
  int signal_bls(int signal) const { return signal_bls_[signal]; }

  /// Forward ring distance from `from_km` to `to_km`, in [0, ring).
  double forward_distance(double from_km, double to_km) const;
  double wrap(double km) const;

 private:
  double ring_length_km_ = 0.0;
  std::vector<int> bls_ids_;
  std::vector<double> road_start_km_, road_length_km_;
  std::vector<int> road_bls_;
  std::vector<double> bls_start_km_, bls_length_km_;
  std::vector<std::vector<int>> bls_roads_;
  std::vector<std::vector<Leg>> bls_legs_;
  std::vector<int> bls_from_stop_, bls_to_stop_, next_stop_;
  std::vector<double> stop_offset_km_;
  std::vector<double> signal_offset_km_, signal_fraction_;
  std::vector<int> signal_bls_;
};

/// Resolved per-road speeds and noise for one deployment pattern.
struct RoadProfile {
  bool dbl = false;
  double base_speed_kmh = 0.0;
  double noise_sigma_s = 0.0;
};

/// Route plus everything that depends on which segments carry dedicated lanes.
class DeployedLine {
 public:
  DeployedLine(const LineConfig& config, const DeploymentPattern& pattern);

  const LineConfig& config() const { return *config_; }
  const Route& route() const { return route_; }
  const DeploymentPattern& pattern() const { return pattern_; }

  const RoadProfile& road(int road) const { return roads_[road]; }
  /// True when the bus-line segment is in the pattern and eligible.
  bool deployed(int bls) const { return deployed_[bls]; }
  /// Action set in force: the configured set when deployed, {0} otherwise.
  std::span<const double> actions(int bls) const;

  /// Expected cruise time over `[from_km, from_km + dist_km)` at base speeds,
  /// signals and dwells excluded. `dist_km` may not exceed one lap.
  double cruise_time(double from_km, double dist_km) const;
  /// Change in cruise time over the same span when `action_kmh` is applied on
  /// the dedicated-lane roads of bus-line segment `bls`.
  double regulated_correction(int bls, double action_kmh, double from_km, double dist_km) const;
  /// Expected time to traverse one road at its base speed plus `action_kmh`
  /// (action ignored on roads without a dedicated lane).
  double road_time(int road, double action_kmh) const;

 private:
  double time_coordinate(double km) const;

  const LineConfig* config_;
  Route route_;
  DeploymentPattern pattern_;
  std::vector<RoadProfile> roads_;
  std::vector<char> deployed_;
  std::vector<double> road_time_start_;  // cumulative cruise time at road starts
  double lap_time_ = 0.0;
  static constexpr double kZeroAction[1] = {0.0};
};

}  // namespace dbl
