#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

#include "dbl/route.hpp"
#include "support.hpp"

using namespace dbl;

TEST_CASE("reference instance validates cleanly") {
  const auto c = testing::reference();
  CHECK(validate(c).empty());
  CHECK(c.stops.size() == 36);
  CHECK(c.bus_line_segments.size() == 36);
  CHECK(c.segments.size() == 51);
  CHECK(c.signals.size() == 15);
  CHECK(c.buses.size() == 11);
  CHECK(c.eligible_ids() == std::vector<int>{2, 3, 5, 11, 17, 20, 21, 25, 29, 33, 34});
  CHECK(c.preset("11BLS") == c.eligible_ids());
}

TEST_CASE("destination series off by 0.1 yields one violation naming the stop") {
  auto c = testing::reference();
  c.stops[6].destination_series = {0.5, 0.4};
  const auto v = validate(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "stops[7].destination_series");
}

TEST_CASE("ring length mismatch yields one violation") {
  auto c = testing::reference();
  c.ring_length_km += 1.0;
  const auto v = validate(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "run.ring_length_km");
}

TEST_CASE("structural violations") {
  auto c = testing::reference();
  c.bus_line_segments[1].action_set = {-5.0, 5.0};
  c.bus_line_segments[0].action_set = {0.0, 5.0};
  c.buses[0].capacity = 0;
  const auto v = validate(c);
  CHECK(v.size() == 3);
  CHECK_FALSE(validate_pattern(c, DeploymentPattern({1, 2})).empty());
  CHECK(validate_pattern(c, DeploymentPattern({2, 3})).empty());
}

TEST_CASE("route offsets") {
  const auto c = testing::reference();
  const Route r(c);
  CHECK(r.route_offset(1, 0.0) == doctest::Approx(0.0));
  CHECK(r.route_offset(1, 1.0) == doctest::Approx(0.6));
  CHECK(r.route_offset(36, 1.0) == doctest::Approx(0.0));
  CHECK(r.ring_length_km() == doctest::Approx(21.35));
  CHECK_THROWS_AS(r.route_offset(99, 0.5), ConfigError);
  CHECK_THROWS_AS(r.route_offset(1, 1.5), ConfigError);
}

TEST_CASE("route offset increases along the segment order and repeats every lap") {
  const auto c = testing::reference();
  const Route r(c);
  double prev = -1.0;
  for (const auto& b : c.bus_line_segments) {
    for (double f : {0.0, 0.25, 0.5, 0.75}) {
      const double x = r.route_offset(b.id, f);
      CHECK(x > prev);
      prev = x;
      for (double laps : {1.0, -3.0}) {
        const double w = r.wrap(x + laps * r.ring_length_km());
        CHECK(w >= 0.0);
        CHECK(w < r.ring_length_km());
        const double d = std::abs(w - x);
        CHECK(std::min(d, r.ring_length_km() - d) < 1e-9);
      }
    }
  }
}

TEST_CASE("signals default to successive road boundaries, else mid-segment") {
  const auto c = testing::reference();
  const Route r(c);
  // Intersection 1 sits on segment 1 (roads 200 m + 400 m): boundary at 0.2 km.
  CHECK(r.signal_offset(0) == doctest::Approx(0.2));
  // Intersections 7 and 8 share segment 16 (roads 200, 250, 100 m).
  CHECK(r.signal_offset(6) - r.bls_start(15) == doctest::Approx(0.2));
  CHECK(r.signal_offset(7) - r.bls_start(15) == doctest::Approx(0.45));
  // Intersection 13 on segment 30 (300, 350 m).
  CHECK(r.signal_offset(12) - r.bls_start(29) == doctest::Approx(0.3));
  // Segment 24: 260 + 350 m.
  CHECK(r.signal_offset(10) - r.bls_start(23) == doctest::Approx(0.26));
}

TEST_CASE("constraint sums") {
  const auto c = testing::reference();
  const ConstraintSpec limits{25.0, 70.0};
  const auto row1 = constraint_check(c, DeploymentPattern({5, 11, 20, 21, 25, 29, 33, 34}), limits);
  CHECK(row1.influence_sum == doctest::Approx(23.6).epsilon(1e-9));
  CHECK(row1.money_sum == doctest::Approx(69.29).epsilon(1e-9));
  CHECK(row1.feasible);

  const auto empty = constraint_check(c, DeploymentPattern{}, limits);
  CHECK(empty.influence_sum == 0.0);
  CHECK(empty.money_sum == 0.0);
  CHECK(empty.feasible);

  const auto fig5 = constraint_check(c, DeploymentPattern({2, 5, 17, 20, 25}), {10.0, 1e9});
  CHECK(fig5.influence_sum == doctest::Approx(2.5 + 2.65 + 2.85 + 3.25 + 2.65));
  CHECK_FALSE(fig5.feasible);

  CHECK_THROWS_AS(constraint_check(c, DeploymentPattern({3}), limits), ConfigError);
}

TEST_CASE("a sum that lands exactly on the limit is feasible") {
  const auto c = testing::reference();
  const auto r = constraint_check(c, DeploymentPattern({2, 5, 11, 17, 21, 29, 33}), {20.0, 80.0});
  CHECK(r.influence_sum == doctest::Approx(20.0));
  CHECK(r.feasible);
}

TEST_CASE("removing a location keeps a feasible pattern feasible") {
  const auto c = testing::reference();
  const auto ids = c.preset("T11");
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lim(5.0, 30.0), money(20.0, 90.0);
  for (int trial = 0; trial < 300; ++trial) {
    const ConstraintSpec spec{lim(rng), money(rng)};
    std::vector<int> chosen;
    for (int id : ids) {
      if (rng() & 1) chosen.push_back(id);
    }
    if (!constraint_check(c, DeploymentPattern(chosen), spec).feasible) continue;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      auto smaller = chosen;
      smaller.erase(smaller.begin() + static_cast<long>(k));
      CHECK(constraint_check(c, DeploymentPattern(smaller), spec).feasible);
    }
  }
}

TEST_CASE("scenario json round-trips byte for byte") {
  std::ifstream in(std::string(DBL_DATA_DIR) + "/reference_line.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto c = scenario_from_json(nlohmann::json::parse(text));
  CHECK(dump_scenario(c) == text);
  const auto again = scenario_from_json(scenario_to_json(c));
  CHECK(dump_scenario(again) == text);
}

TEST_CASE("scenario shape errors are reported") {
  auto doc = scenario_to_json(testing::reference());
  doc.erase("buses");
  CHECK_THROWS_AS(scenario_from_json(doc), ConfigError);
  auto bad = scenario_to_json(testing::reference());
  bad["signals"][0]["initial_phase"] = "amber";
  CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("deployed line speeds and noise follow the pattern") {
  const auto c = testing::reference();
  const DeployedLine line(c, DeploymentPattern({2}));
  const int road3 = c.segment_index(3);
  const int road4 = c.segment_index(4);
  CHECK(line.road(road3).dbl);
  CHECK(line.road(road3).base_speed_kmh == 50.0);
  CHECK(line.road(road3).noise_sigma_s == doctest::Approx(1.0));
  CHECK_FALSE(line.road(road4).dbl);
  CHECK(line.road(road4).base_speed_kmh == 35.0);
  CHECK(line.road(road4).noise_sigma_s == doctest::Approx(3.0));
  CHECK(line.actions(c.bls_index(2)).size() == 5);
  CHECK(line.actions(c.bls_index(3)).size() == 1);
  CHECK_THROWS_AS(DeployedLine(c, DeploymentPattern({1})), ConfigError);
}
