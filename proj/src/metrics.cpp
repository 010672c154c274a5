#include "dbl/metrics.hpp"

#include <cmath>
#include <numeric>

namespace dbl {

namespace {

void require_nonempty(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw MetricError(std::string(what) + " of an empty list");
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Deviations are taken from the first value so that a constant list gives
// exactly zero.
double sum_sq_dev(std::span<const double> xs) {
  const double x0 = xs.front();
  double shift = 0.0;
  for (double x : xs) shift += x - x0;
  shift /= static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - x0 - shift) * (x - x0 - shift);
  return s;
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return std::sqrt(sum_sq_dev(xs) / static_cast<double>(xs.size() - 1));
}

}  // namespace

double dch(std::span<const double> headways) {
  require_nonempty(headways, "dch");
  return mean_of(headways);
}

double sigma_h(std::span<const double> headways) {
  require_nonempty(headways, "sigma_h");
  return std::sqrt(sum_sq_dev(headways) / static_cast<double>(headways.size()));
}

double action_cost(std::span<const double> headways) {
  require_nonempty(headways, "action_cost");
  return sum_sq_dev(headways);
}

double fsi(std::span<const double> series) {
  require_nonempty(series, "fsi");
  return mean_of(series);
}

double fsi_std(std::span<const double> series) {
  if (series.size() < 2) throw MetricError("fsi_std needs at least two values");
  return sample_std(series);
}

std::vector<double> sigma_series(std::span<const CtpRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(sigma_h(r.headways));
  return out;
}

StabilityReport stability_report(const SimOutcome& outcome) {
  StabilityReport r;
  const auto series = sigma_series(outcome.ctp_records);
  r.n_ctp = static_cast<int>(series.size());
  if (!series.empty()) r.fsi = fsi(series);
  if (series.size() >= 2) r.fsi_std = fsi_std(series);

  std::vector<double> abs_actions;
  for (double a : outcome.action_log) {
    if (a != 0.0) abs_actions.push_back(std::abs(a));
  }
  r.n_actions = static_cast<int>(abs_actions.size());
  r.action_abs_sum = std::accumulate(abs_actions.begin(), abs_actions.end(), 0.0);
  if (!abs_actions.empty()) r.action_abs_mean = r.action_abs_sum / r.n_actions;
  r.action_abs_std = sample_std(abs_actions);

  r.n_decisions = static_cast<int>(outcome.decisions.size());
  if (r.n_decisions > 0) {
    double s = 0.0;
    for (double a : outcome.decisions) s += std::abs(a);
    r.decision_abs_mean = s / r.n_decisions;
  }
  r.bunched = outcome.bunched;
  return r;
}

PassengerReport passenger_stats(std::span<const CompletedTrip> trips) {
  PassengerReport r;
  if (trips.empty()) return r;
  std::vector<double> w, d, t;
  for (const auto& p : trips) {
    w.push_back(p.wait_s);
    d.push_back(p.ride_s);
    t.push_back(p.wait_s + p.ride_s);
  }
  r.has_trips = true;
  r.n_p = static_cast<int>(trips.size());
  r.wait_mean = mean_of(w);
  r.ride_mean = mean_of(d);
  r.travel_mean = mean_of(t);
  r.wait_std = sample_std(w);
  r.ride_std = sample_std(d);
  r.travel_std = sample_std(t);
  return r;
}

}  // namespace dbl
