#include <doctest.h>

#include <random>

#include "edgetwin/error.hpp"
#include "edgetwin/features.hpp"
#include "edgetwin/synth.hpp"
#include "test_support.hpp"

using namespace edgetwin;
using edgetwin::testing::constant_velocity_track;
using edgetwin::testing::make_state;

TEST_CASE("feature layout length")
{
  CHECK(feature_count(10) == 100);
  CHECK(feature_count(1) == 37);
}

TEST_CASE("stationary lone vehicle: only the lane survives in the ego block")
{
  RoadGeometry g;
  const auto trace = Trace::build(constant_velocity_track(1, 0, 12, 40.0, 0.0, 2, g), g);
  const auto fv = extract_features(trace, 1, 11, 10);
  REQUIRE(fv.size() == feature_count(10));
  for (std::size_t k = 0; k < 10; ++k) {
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(fv[k * 7 + j] == 0.0);
    }
    CHECK(fv[k * 7 + 6] == 2.0);
  }
  for (std::size_t s = 0; s < 6; ++s) {
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(fv[70 + s * 5 + j] == 0.0);
    }
  }
}

TEST_CASE("constant velocity history offsets")
{
  RoadGeometry g;
  g.segment_end = 200.0;
  const auto trace = Trace::build(constant_velocity_track(4, 0, 30, 10.0, 30.0, 0, g), g);
  const auto fv = extract_features(trace, 4, 20, 10);
  for (int k = 0; k < 10; ++k) {
    CHECK(fv[static_cast<std::size_t>(k) * 7] == doctest::Approx(-30.0 * k / 25.0));
    CHECK(fv[static_cast<std::size_t>(k) * 7 + 2] == 30.0);
  }
}

TEST_CASE("insufficient history and unknown vehicle")
{
  RoadGeometry g;
  const auto trace = Trace::build(constant_velocity_track(1, 0, 5, 40.0, 1.0, 0, g), g);
  try {
    extract_features(trace, 1, 3, 10);
    FAIL("expected InsufficientHistory");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::InsufficientHistory);
  }
  CHECK_THROWS_AS(extract_features(trace, 2, 3, 2), Error);
}

TEST_CASE("neighbor blocks equal a brute-force neighbor scan in relative coordinates")
{
  RoadGeometry g;
  g.segment_end = 300.0;
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> ux(0.0, 300.0);
  std::uniform_real_distribution<double> uv(20.0, 30.0);
  std::uniform_int_distribution<int> ul(0, 2);
  std::vector<VehicleState> states;
  std::vector<VehicleState> now;
  for (int id = 1; id <= 15; ++id) {
    auto s = make_state(id, 0, ux(eng), ul(eng), uv(eng), g);
    s.vy = 0.1 * id;
    states.push_back(s);
    now.push_back(s);
  }
  const auto trace = Trace::build(states, g);
  for (const auto & ego : now) {
    const auto fv = extract_features(trace, ego.vehicle_id, 0, 1);
    const int lanes[3] = {ego.lane, ego.lane - 1, ego.lane + 1};
    for (int side = 0; side < 3; ++side) {
      for (int dir = 0; dir < 2; ++dir) {
        const VehicleState * best = nullptr;
        for (const auto & o : now) {
          if (o.vehicle_id == ego.vehicle_id || o.lane != lanes[side]) {
            continue;
          }
          if ((o.x > ego.x) != (dir == 0)) {
            continue;
          }
          if (!best || std::abs(o.x - ego.x) < std::abs(best->x - ego.x)) {
            best = &o;
          }
        }
        const std::size_t base = 7 + static_cast<std::size_t>(2 * side + dir) * 5;
        if (best) {
          CHECK(fv[base + 0] == doctest::Approx(best->x - ego.x));
          CHECK(fv[base + 1] == doctest::Approx(best->y - ego.y));
          CHECK(fv[base + 2] == best->vx);
          CHECK(fv[base + 3] == best->vy);
          CHECK(fv[base + 4] == 1.0);
        } else {
          for (std::size_t j = 0; j < 5; ++j) {
            CHECK(fv[base + j] == 0.0);
          }
        }
      }
    }
  }
}

TEST_CASE("make_dataset row counting and constant-velocity targets")
{
  RoadGeometry g;
  g.segment_end = 300.0;
  const auto trace = Trace::build(constant_velocity_track(1, 0, 20, 10.0, 20.0, 1, g), g);
  const std::vector<int> ids{1};
  const auto data = make_dataset(trace, ids, 5, 10);
  CHECK(data.rows() == 6);
  CHECK(data.features.size() == 6 * feature_count(10));

  const auto longer = Trace::build(constant_velocity_track(1, 0, 60, 10.0, 20.0, 1, g), g);
  const auto d25 = make_dataset(longer, ids, 25, 10);
  for (const auto & t : d25.targets) {
    CHECK(t.dx == doctest::Approx(20.0));
    CHECK(t.dy == 0.0);
  }
  CHECK_THROWS_AS(make_dataset(trace, ids, 15, 10), Error);
  CHECK_THROWS_AS(make_dataset(trace, ids, 0, 10), Error);
}

TEST_CASE("make_dataset targets equal positions re-read from the trace")
{
  SynthConfig c;
  c.vehicles = 12;
  c.steps = 400;
  c.segment_length = 400.0;
  c.lane_change_rate = 0.2;
  const auto trace = synth_trace(c);
  const auto ids = trace.vehicle_ids();
  const auto data = make_dataset(trace, ids, 7, 10, 3);
  REQUIRE(data.rows() > 100);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto [id, frame] = data.points[i];
    CHECK(frame % 3 == 0);
    const auto & a = trace.at(id, frame);
    const auto & b = trace.at(id, frame + 7);
    CHECK(data.targets[i].dx == b.x - a.x);
    CHECK(data.targets[i].dy == b.y - a.y);
    const auto fv = extract_features(trace, id, frame, 10);
    const auto row = data.row(i);
    CHECK(std::equal(fv.begin(), fv.end(), row.begin()));
  }
}

TEST_CASE("features are invariant to a longitudinal translation")
{
  SynthConfig c;
  c.vehicles = 10;
  c.steps = 200;
  c.segment_length = 400.0;
  c.lane_change_rate = 0.3;
  const auto trace = synth_trace(c);
  std::vector<VehicleState> shifted;
  for (const auto & f : trace.frames()) {
    for (auto s : f.states) {
      s.x += 1000.0;
      shifted.push_back(s);
    }
  }
  auto g = trace.geometry();
  g.segment_end += 1000.0;
  const auto moved = Trace::build(shifted, g);
  for (const int id : trace.vehicle_ids()) {
    const auto t = trace.track(id);
    if (t.size() < 20) {
      continue;
    }
    const int frame = t[15].frame;
    const auto a = extract_features(trace, id, frame, 10);
    const auto b = extract_features(moved, id, frame, 10);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-9));
    }
  }
}
