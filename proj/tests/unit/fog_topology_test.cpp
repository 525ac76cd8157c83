#include <doctest.h>

#include <algorithm>
#include <chrono>

#include "edgetwin/error.hpp"
#include "edgetwin/fog_topology.hpp"

using namespace edgetwin;

namespace
{

// Reachability oracle written from the link description: a camera's feed
// reaches fog i if it is primary i - 1, i, i + 1 or secondary i - 1, i.
// A fog serves its own section and the nearer halves of its neighbors'
// sections (whole neighbor sections at the road ends).
bool reachable(int n, double span, const std::set<int> & dead_fogs,
               const std::set<CameraId> & dead_cams, double x)
{
  for (int fog = 1; fog <= n; ++fog) {
    if (dead_fogs.count(fog)) continue;
    double lo = (fog - 1) * span;
    double hi = fog * span;
    if (fog == 2) lo = 0.0;
    else if (fog > 2) lo -= span / 2;
    if (fog == n - 1) hi = n * span;
    else if (fog < n - 1) hi += span / 2;
    if (x < lo || x >= hi) continue;
    for (int p = fog - 1; p <= fog + 1; ++p) {
      if (p < 1 || p > n || dead_cams.count({CameraKind::Primary, p})) continue;
      if (x >= (p - 1) * span && x < p * span) return true;
    }
    for (int s = fog - 1; s <= fog; ++s) {
      if (s < 1 || s > n - 1 || dead_cams.count({CameraKind::Secondary, s})) continue;
      const double a = s == 1 ? 0.0 : (s - 0.5) * span;
      const double b = s == n - 1 ? n * span : (s + 0.5) * span;
      if (x >= a && x < b) return true;
    }
  }
  return false;
}

bool adjacent_pair(unsigned mask, int n)
{
  for (int i = 0; i + 1 < n; ++i) {
    if ((mask >> i & 1u) && (mask >> (i + 1) & 1u)) return true;
  }
  return false;
}

std::set<int> fogs_of(unsigned mask, int n)
{
  std::set<int> out;
  for (int i = 0; i < n; ++i) {
    if (mask >> i & 1u) out.insert(i + 1);
  }
  return out;
}

}  // namespace

TEST_CASE("build: counting and links")
{
  const auto two = build(2, 100.0);
  const auto cams = two.cameras();
  CHECK(std::count_if(cams.begin(), cams.end(), [](const auto & c) {
          return c.kind == CameraKind::Primary;
        }) == 2);
  CHECK(two.cameras().size() == 3);

  const auto five = build(5, 100.0);
  CHECK(five.cameras().size() == 9);
  const std::vector<CameraId> want{
    {CameraKind::Primary, 2}, {CameraKind::Primary, 3}, {CameraKind::Primary, 4},
    {CameraKind::Secondary, 2}, {CameraKind::Secondary, 3}};
  CHECK(five.feeds(3) == want);
  CHECK(five.feeds(3).size() >= 3);

  CHECK_THROWS_AS(build(1, 100.0), Error);
  CHECK_THROWS_AS(build(4, 0.0), Error);
}

TEST_CASE("camera layers partition the road")
{
  for (int n = 2; n <= 16; ++n) {
    const auto t = build(n, 80.0);
    for (const auto kind : {CameraKind::Primary, CameraKind::Secondary}) {
      std::vector<Interval> ivs;
      for (const auto & c : t.cameras()) {
        if (c.kind == kind) ivs.push_back(t.camera_interval(c));
      }
      std::sort(ivs.begin(), ivs.end(), [](auto a, auto b) { return a.lo < b.lo; });
      CHECK(ivs.front().lo == 0.0);
      CHECK(ivs.back().hi == doctest::Approx(t.length()));
      for (std::size_t i = 1; i < ivs.size(); ++i) {
        CHECK(ivs[i].lo == doctest::Approx(ivs[i - 1].hi));  // disjoint, no gap
        CHECK(ivs[i].lo > ivs[i - 1].lo);
      }
    }
  }
}

TEST_CASE("coverage examples")
{
  auto t = build(5, 100.0);
  const auto healthy = coverage(t);
  CHECK(healthy.operational);
  CHECK(healthy.positions.size() == 100);
  for (std::size_t i = 0; i < healthy.positions.size(); ++i) {
    REQUIRE(healthy.serving[i]);
    CHECK(*healthy.serving[i] == t.section_of(healthy.positions[i]));
  }

  t.failed_fogs = {2};
  const auto one = coverage(t);
  CHECK(one.operational);
  for (std::size_t i = 0; i < one.positions.size(); ++i) {
    if (t.section(2).contains(one.positions[i])) {
      const int s = *one.serving[i];
      CHECK((s == 1 || s == 3));
      CHECK(s == (one.positions[i] < 150.0 ? 1 : 3));
    }
  }

  t.failed_fogs = {2, 3};
  const auto two = coverage(t);
  CHECK_FALSE(two.operational);
  for (std::size_t i = 0; i < two.positions.size(); ++i) {
    const double x = two.positions[i];
    CHECK(two.serving[i].has_value() == reachable(5, 100.0, {2, 3}, {}, x));
    if (x > 150.0 && x < 250.0) CHECK_FALSE(two.serving[i]);
  }
}

TEST_CASE("operational_after examples")
{
  const auto t = build(6, 100.0);
  CHECK(operational_after(t, {1, 3, 5}, {}));
  CHECK(operational_after(t, {2, 4, 6}, {}));
  CHECK_FALSE(operational_after(t, {2, 3}, {}));
  CHECK_THROWS_AS(operational_after(t, {7}, {}), Error);
  CHECK_THROWS_AS(operational_after(t, {}, {{CameraKind::Secondary, 6}}), Error);
}

TEST_CASE("exhaustive n <= 8: operational iff no adjacent fog failures, matching the oracle")
{
  const auto start = std::chrono::steady_clock::now();
  for (int n = 2; n <= 8; ++n) {
    const auto t = build(n, 50.0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      const auto dead = fogs_of(mask, n);
      auto failed = t;
      failed.failed_fogs = dead;
      const auto report = coverage(failed);
      CHECK(report.operational == !adjacent_pair(mask, n));
      CHECK(operational_after(t, dead, {}) == report.operational);
      for (std::size_t i = 0; i < report.positions.size(); ++i) {
        CHECK(report.serving[i].has_value() ==
              reachable(n, 50.0, dead, {}, report.positions[i]));
      }
    }
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}

TEST_CASE("any single camera failure leaves the system operational")
{
  for (int n = 2; n <= 10; ++n) {
    const auto t = build(n, 100.0);
    for (const auto & c : t.cameras()) {
      CHECK(operational_after(t, {}, {c}));
    }
  }
}

TEST_CASE("camera fault cases")
{
  const auto t = build(5, 100.0);
  for (int fog = 1; fog <= 5; ++fog) {
    const auto cases = camera_fault_cases(t, fog);
    CHECK(cases.primary_fails);
    CHECK(cases.one_secondary_fails);
    CHECK(cases.both_secondaries_fail);
  }
  // Edge fog with its primary down: decided by the oracle.
  auto edge = t;
  edge.failed_cams = {{CameraKind::Primary, 1}};
  const auto report = coverage(edge);
  for (std::size_t i = 0; i < report.positions.size(); ++i) {
    CHECK(report.serving[i].has_value() ==
          reachable(5, 100.0, {}, edge.failed_cams, report.positions[i]));
  }
  CHECK(camera_fault_cases(t, 1).primary_fails == report.operational);
}

TEST_CASE("property: an extra failure never uncovers-then-covers")
{
  const int n = 7;
  const auto t = build(n, 60.0);
  const auto cams = t.cameras();
  for (unsigned mask = 0; mask < (1u << n); mask += 3) {
    for (std::size_t ci = 0; ci <= cams.size(); ++ci) {
      auto base = t;
      base.failed_fogs = fogs_of(mask, n);
      if (ci < cams.size()) base.failed_cams = {cams[ci]};
      const auto before = coverage(base);
      for (int extra = 1; extra <= n; ++extra) {
        auto more = base;
        more.failed_fogs.insert(extra);
        const auto after = coverage(more);
        for (std::size_t i = 0; i < before.serving.size(); ++i) {
          if (!before.serving[i]) CHECK_FALSE(after.serving[i]);
        }
      }
    }
  }
}

TEST_CASE("coverage JSON")
{
  auto t = build(3, 20.0);
  t.failed_fogs = {1, 2};
  const auto j = to_json(coverage(t));
  CHECK(j["operational"] == false);
  CHECK(j["box_count"] == 12);
  CHECK(j["serving"][0].is_null());
  const auto tj = to_json(t);
  CHECK(tj["fogs"][1]["feeds"].size() == 5);
}
