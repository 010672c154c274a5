#pragma once

#include <span>
#include <vector>

#include "dbl/route.hpp"

namespace dbl {

/// Where a bus is and which regulating speed it is currently carrying.
struct BusPosition {
  double offset_km = 0.0;
  /// Bus-line segment whose dedicated lanes the bus is regulated on, or -1.
  int regulated_bls = -1;
  double action_kmh = 0.0;
};

struct RingOrder {
  /// Index of the nearest preceding bus for each bus.
  std::vector<int> preceding;
  /// Forward ring distance to that bus, km. Gaps sum to the ring length.
  std::vector<double> gap_km;
};

/// Co-located buses are ordered by index: the lower index sees a zero gap.
RingOrder ring_order(const Route& route, std::span<const BusPosition> buses);

/// Time for each bus to reach the current position of its nearest preceding
/// bus at expected cruise speeds (its own regulated lanes at base + action).
/// Dwell and signal delays are not part of the headway.
std::vector<double> instantaneous_headways(const DeployedLine& line, std::span<const BusPosition> buses);

double instantaneous_headway(const DeployedLine& line, std::span<const BusPosition> buses, int bus);

/// Allocation-free variant for hot loops; `out` and `order_scratch` are resized.
void instantaneous_headways(const DeployedLine& line, std::span<const BusPosition> buses,
                            std::vector<double>& out, std::vector<int>& order_scratch);

}  // namespace dbl
