#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "edgetwin/error.hpp"
#include "edgetwin/evaluation.hpp"
#include "edgetwin/synth.hpp"
#include "test_support.hpp"

using namespace edgetwin;

namespace
{

// Hyndman-Fan type 7 on a 1-based rank, written independently.
double type7(std::vector<double> v, double p)
{
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p + 1.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= v.size()) return v.back();
  return v[lo - 1] + (h - static_cast<double>(lo)) * (v[lo] - v[lo - 1]);
}

Trace cruising_trace(double speed)
{
  RoadGeometry g;
  g.segment_end = 1000.0;
  std::vector<VehicleState> states;
  for (int id = 1; id <= 9; ++id) {
    const auto t = edgetwin::testing::constant_velocity_track(
      id, 0, 300, 30.0 * id, speed, id % 3, g);
    states.insert(states.end(), t.begin(), t.end());
  }
  return Trace::build(states, g);
}

}  // namespace

TEST_CASE("coordinate distance")
{
  CHECK(coordinate_distance({0.0, 0.0}, {3.0, 4.0}) == 5.0);
  CHECK(coordinate_distance({1.0, 1.0}, {2.0, 2.0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(coordinate_distance({7.0, -1.0}, {7.0, -1.0}) == 0.0);
}

TEST_CASE("threshold accuracy")
{
  const std::vector<double> e{0.04, 0.06};
  CHECK(threshold_accuracy(e, 0.05) == 0.5);
  CHECK(threshold_accuracy(e, 0.06) == 1.0);
  CHECK(threshold_accuracy(e, 0.01) == 0.0);
  try {
    threshold_accuracy(std::vector<double>{}, 0.1);
    FAIL("expected EmptyErrors");
  } catch (const Error & err) {
    CHECK(err.code() == ErrorCode::EmptyErrors);
  }
  CHECK_THROWS_AS(threshold_accuracy(e, -1.0), Error);
}

TEST_CASE("property: accuracy is non-decreasing in the threshold")
{
  std::mt19937_64 eng(9);
  std::exponential_distribution<double> d(3.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> e(1 + rep * 7);
    for (auto & v : e) v = d(eng);
    double prev = 0.0;
    for (double t = 0.01; t < 3.0; t += 0.05) {
      const double a = threshold_accuracy(e, t);
      CHECK(a >= prev);
      CHECK(a <= 1.0);
      prev = a;
    }
  }
}

TEST_CASE("summary quartiles match a type-7 oracle")
{
  std::mt19937_64 eng(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (std::size_t n : {1u, 2u, 3u, 10u, 101u, 256u}) {
    std::vector<double> v(n);
    for (auto & x : v) x = u(eng);
    const auto s = summarize(v);
    CHECK(s.count == n);
    CHECK(s.min == *std::min_element(v.begin(), v.end()));
    CHECK(s.max == *std::max_element(v.begin(), v.end()));
    CHECK(s.q1 == doctest::Approx(type7(v, 0.25)));
    CHECK(s.median == doctest::Approx(type7(v, 0.5)));
    CHECK(s.q3 == doctest::Approx(type7(v, 0.75)));
    double m = 0.0;
    for (double x : v) m += x;
    CHECK(s.mean == doctest::Approx(m / static_cast<double>(n)));
  }
}

TEST_CASE("ground-truth forecaster scores zero error and full accuracy")
{
  SynthConfig c;
  c.vehicles = 10;
  c.steps = 300;
  c.segment_length = 400.0;
  c.lane_change_rate = 0.2;
  const auto trace = synth_trace(c);
  GroundTruthForecaster oracle(trace);
  const auto ids = trace.vehicle_ids();
  const std::vector<int> horizons{1, 5, 25};
  const auto report = evaluate(oracle, trace, ids, horizons);
  REQUIRE(report.horizons.size() == 3);
  for (const int h : horizons) {
    const auto & r = report.at(h);
    CHECK(r.model.mean == 0.0);
    CHECK(r.model.max == 0.0);
    CHECK(r.fallbacks == 0);
    for (const auto & [t, acc] : r.model_accuracy) {
      CHECK(acc == 1.0);
    }
    CHECK(r.model_errors.size() == r.naive_errors.size());
  }
}

TEST_CASE("naive baseline on constant-speed traffic errs by speed times horizon")
{
  const auto trace = cruising_trace(25.0);
  NaiveForecaster naive;
  const auto ids = trace.vehicle_ids();
  const std::vector<int> horizons{0, 1, 5, 10, 25};
  const auto report = evaluate(naive, trace, ids, horizons);
  for (const int h : horizons) {
    const auto & r = report.at(h);
    CHECK(r.naive.mean == doctest::Approx(static_cast<double>(h)).epsilon(1e-9));
    CHECK(r.naive.min == doctest::Approx(static_cast<double>(h)).epsilon(1e-9));
    CHECK(r.model.mean == r.naive.mean);
  }
}

TEST_CASE("evaluate refuses horizons without a model")
{
  const auto trace = cruising_trace(25.0);
  BoostedForecaster empty;
  const auto ids = trace.vehicle_ids();
  const std::vector<int> horizons{5};
  try {
    evaluate(empty, trace, ids, horizons);
    FAIL("expected MissingModel");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::MissingModel);
  }
}
