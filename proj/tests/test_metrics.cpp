#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dbl/metrics.hpp"

using namespace dbl;

namespace {

// Welford's running variance, n - 1 denominator.
double welford_sample_std(const std::vector<double>& x) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (x[i] - mean);
  }
  return std::sqrt(m2 / static_cast<double>(x.size() - 1));
}

std::vector<double> random_series(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 900.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(g);
  return x;
}

}  // namespace

TEST_CASE("dch") {
  CHECK(dch(std::vector<double>(11, 600.0)) == 600.0);
  CHECK(dch(std::vector<double>{500, 700}) == 600.0);
  CHECK(dch(std::vector<double>{700, 500}) == 600.0);
  CHECK_THROWS_AS(dch(std::vector<double>{}), MetricError);
}

TEST_CASE("sigma_h") {
  CHECK(sigma_h(std::vector<double>(5, 182.0)) == 0.0);
  CHECK(sigma_h(std::vector<double>{500, 700}) == doctest::Approx(100.0));
  CHECK(sigma_h(std::vector<double>{1500, 2100}) == doctest::Approx(300.0));
  CHECK_THROWS_AS(sigma_h(std::vector<double>{}), MetricError);
}

TEST_CASE("fsi and fsi_std") {
  const std::vector<double> s{10, 20, 30};
  CHECK(fsi(s) == 20.0);
  CHECK(fsi(std::vector<double>(4, 7.5)) == 7.5);
  CHECK(fsi_std(s) == doctest::Approx(10.0));
  CHECK(fsi_std(std::vector<double>(4, 7.5)) == 0.0);
  CHECK(fsi_std(std::vector<double>{3, 3}) == 0.0);
  CHECK_THROWS_AS(fsi(std::vector<double>{}), MetricError);
  CHECK_THROWS_AS(fsi_std(std::vector<double>{1.0}), MetricError);
}

TEST_CASE("action_cost") {
  CHECK(action_cost(std::vector<double>{500, 700}) == doctest::Approx(20000.0));
  CHECK(action_cost(std::vector<double>(3, 9.0)) == 0.0);
  CHECK_THROWS_AS(action_cost(std::vector<double>{}), MetricError);
}

TEST_CASE("identities on random headway vectors") {
  std::mt19937_64 g(7);
  std::uniform_int_distribution<int> len(1, 20);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  for (int i = 0; i < 500; ++i) {
    auto h = random_series(g, static_cast<std::size_t>(len(g)));
    const double n = static_cast<double>(h.size());
    const double s = sigma_h(h);
    CHECK(action_cost(h) == doctest::Approx(n * s * s).epsilon(1e-9));
    const double c = shift(g);
    auto moved = h;
    for (auto& v : moved) v += c;
    CHECK(dch(moved) == doctest::Approx(dch(h) + c).epsilon(1e-12));
    CHECK(sigma_h(moved) == doctest::Approx(s).epsilon(1e-9).scale(1.0));
    auto scaled = h;
    for (auto& v : scaled) v *= 2.5;
    CHECK(sigma_h(scaled) == doctest::Approx(2.5 * s).epsilon(1e-12).scale(1.0));
    CHECK(sigma_h(std::vector<double>(h.size(), h[0])) == 0.0);
    CHECK(action_cost(std::vector<double>(h.size(), h[0])) == 0.0);
    std::shuffle(h.begin(), h.end(), g);
    CHECK(sigma_h(h) == doctest::Approx(s).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("fsi_std agrees with a running-variance oracle") {
  std::mt19937_64 g(11);
  std::uniform_int_distribution<int> len(2, 400);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_series(g, static_cast<std::size_t>(len(g)));
    CHECK(fsi_std(x) == doctest::Approx(welford_sample_std(x)).epsilon(1e-9));
  }
}

TEST_CASE("passenger statistics") {
  const auto empty = passenger_stats(std::vector<CompletedTrip>{});
  CHECK_FALSE(empty.has_trips);
  CHECK(empty.n_p == 0);

  const auto one = passenger_stats(std::vector<CompletedTrip>{{100, 200}});
  CHECK(one.has_trips);
  CHECK(one.wait_mean == 100.0);
  CHECK(one.ride_mean == 200.0);
  CHECK(one.travel_mean == 300.0);
  CHECK(one.wait_std == 0.0);
  CHECK(one.travel_std == 0.0);

  const auto two = passenger_stats(std::vector<CompletedTrip>{{50, 80}, {50, 80}});
  CHECK(two.wait_std == 0.0);
  CHECK(two.ride_std == 0.0);

  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1200.0);
  std::vector<CompletedTrip> trips(300);
  std::vector<double> waits, travels;
  for (auto& t : trips) {
    t = {u(g), u(g)};
    waits.push_back(t.wait_s);
    travels.push_back(t.wait_s + t.ride_s);
  }
  const auto r = passenger_stats(trips);
  CHECK(r.n_p == 300);
  CHECK(r.travel_mean == doctest::Approx(r.wait_mean + r.ride_mean).epsilon(1e-12));
  CHECK(r.wait_std == doctest::Approx(welford_sample_std(waits)).epsilon(1e-9));
  CHECK(r.travel_std == doctest::Approx(welford_sample_std(travels)).epsilon(1e-9));
}

TEST_CASE("stability report over a hand-built run") {
  SimOutcome o;
  o.ctp_records = {{0, 1, 1, {500, 700}, 0}, {10, 2, 2, {600, 600}, 5}, {20, 1, 3, {400, 800}, -10}};
  o.action_log = {5, -10, 10};
  o.decisions = {0, 5, -10, 0, 10};
  o.bunched = true;
  const auto r = stability_report(o);
  CHECK(r.n_ctp == 3);
  CHECK(r.fsi == doctest::Approx(100.0));
  CHECK(r.fsi_std == doctest::Approx(100.0));
  CHECK(r.n_actions == 3);
  CHECK(r.action_abs_sum == 25.0);
  CHECK(r.action_abs_mean == doctest::Approx(25.0 / 3));
  CHECK(r.action_abs_std == doctest::Approx(welford_sample_std({5, 10, 10})));
  CHECK(r.n_decisions == 5);
  CHECK(r.decision_abs_mean == doctest::Approx(5.0));
  CHECK(r.bunched);

  SimOutcome quiet;
  quiet.ctp_records = {{0, 1, 1, {1, 1}, 0}};
  const auto q = stability_report(quiet);
  CHECK(q.fsi == 0.0);
  CHECK(q.n_actions == 0);
  CHECK(q.action_abs_mean == 0.0);
  CHECK(q.action_abs_std == 0.0);
}
