#include "dbl/headway.hpp"

#include <algorithm>
#include <numeric>

namespace dbl {

namespace {

void sort_ring(std::span<const BusPosition> buses, std::vector<int>& order) {
  order.resize(buses.size());
  std::iota(order.begin(), order.end(), 0);
  // Insertion sort: fleets are small and this runs inside the look-ahead.
  for (std::size_t i = 1; i < order.size(); ++i) {
    const int x = order[i];
    std::size_t j = i;
    while (j > 0) {
      const int y = order[j - 1];
      if (buses[y].offset_km < buses[x].offset_km ||
          (buses[y].offset_km == buses[x].offset_km && y < x)) {
        break;
      }
      order[j] = y;
      --j;
    }
    order[j] = x;
  }
}

double gap_to_next(const Route& route, std::span<const BusPosition> buses, const std::vector<int>& order,
                   std::size_t k) {
  const std::size_t n = order.size();
  const int cur = order[k];
  const int nxt = order[(k + 1) % n];
  if (k + 1 == n) return buses[nxt].offset_km + route.ring_length_km() - buses[cur].offset_km;
  return buses[nxt].offset_km - buses[cur].offset_km;
}

}  // namespace

RingOrder ring_order(const Route& route, std::span<const BusPosition> buses) {
  RingOrder out;
  const std::size_t n = buses.size();
  out.preceding.assign(n, -1);
  out.gap_km.assign(n, 0.0);
  std::vector<int> order;
  sort_ring(buses, order);
  for (std::size_t k = 0; k < n; ++k) {
    out.preceding[order[k]] = order[(k + 1) % n];
    out.gap_km[order[k]] = gap_to_next(route, buses, order, k);
  }
  return out;
}

void instantaneous_headways(const DeployedLine& line, std::span<const BusPosition> buses,
                            std::vector<double>& out, std::vector<int>& order) {
  const auto& route = line.route();
  const std::size_t n = buses.size();
  out.assign(n, 0.0);
  sort_ring(buses, order);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& b = buses[order[k]];
    const double gap = gap_to_next(route, buses, order, k);
    double h = line.cruise_time(b.offset_km, gap);
    if (b.regulated_bls >= 0) h += line.regulated_correction(b.regulated_bls, b.action_kmh, b.offset_km, gap);
    out[order[k]] = h;
  }
}

std::vector<double> instantaneous_headways(const DeployedLine& line, std::span<const BusPosition> buses) {
  std::vector<double> out;
  std::vector<int> order;
  instantaneous_headways(line, buses, out, order);
  return out;
}

double instantaneous_headway(const DeployedLine& line, std::span<const BusPosition> buses, int bus) {
  return instantaneous_headways(line, buses).at(static_cast<std::size_t>(bus));
}

}  // namespace dbl
