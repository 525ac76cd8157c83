// Copyright 2026 The edgetwin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "edgetwin/fog_topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "edgetwin/error.hpp"

namespace edgetwin
{

Interval FogTopology::section(int fog) const
{
  return {(fog - 1) * fog_span, fog * fog_span};
}

Interval FogTopology::camera_interval(CameraId cam) const
{
  if (cam.kind == CameraKind::Primary) {
    return section(cam.index);
  }
  Interval iv{(cam.index - 0.5) * fog_span, (cam.index + 0.5) * fog_span};
  if (cam.index == 1) {
    iv.lo = 0.0;
  }
  if (cam.index == n_fogs - 1) {
    iv.hi = length();
  }
  return iv;
}

std::vector<CameraId> FogTopology::cameras() const
{
  std::vector<CameraId> out;
  for (int i = 1; i <= n_fogs; ++i) {
    out.push_back({CameraKind::Primary, i});
  }
  for (int j = 1; j < n_fogs; ++j) {
    out.push_back({CameraKind::Secondary, j});
  }
  return out;
}

std::vector<CameraId> FogTopology::feeds(int fog) const
{
  std::vector<CameraId> out;
  for (int i = fog - 1; i <= fog + 1; ++i) {
    if (i >= 1 && i <= n_fogs) {
      out.push_back({CameraKind::Primary, i});
    }
  }
  for (int j = fog - 1; j <= fog; ++j) {
    if (j >= 1 && j < n_fogs) {
      out.push_back({CameraKind::Secondary, j});
    }
  }
  return out;
}

Interval FogTopology::reach(int fog) const
{
  Interval iv = section(fog);
  if (fog > 1) {
    iv.lo = fog - 1 == 1 ? 0.0 : (fog - 1.5) * fog_span;
  }
  if (fog < n_fogs) {
    iv.hi = fog + 1 == n_fogs ? length() : (fog + 0.5) * fog_span;
  }
  return iv;
}

int FogTopology::section_of(double x) const
{
  const int s = static_cast<int>(std::floor(x / fog_span)) + 1;
  return std::clamp(s, 1, n_fogs);
}

FogTopology build(int n_fogs, double fog_span, double box_length)
{
  if (n_fogs < 2 || !(fog_span > 0.0) || !(box_length > 0.0)) {
    throw Error(ErrorCode::BadParams, "need n_fogs >= 2, fog_span > 0 and box_length > 0");
  }
  FogTopology t;
  t.n_fogs = n_fogs;
  t.fog_span = fog_span;
  t.box_length = box_length;
  return t;
}

std::size_t CoverageReport::uncovered() const
{
  return static_cast<std::size_t>(
    std::count_if(serving.begin(), serving.end(), [](const auto & s) { return !s; }));
}

CoverageReport coverage(const FogTopology & topo)
{
  CoverageReport r;
  const auto boxes = static_cast<int>(std::ceil(topo.length() / topo.box_length - 1e-9));
  for (int k = 0; k < boxes; ++k) {
    const double x = std::min((k + 0.5) * topo.box_length, topo.length());
    const int home = topo.section_of(x);
    std::optional<int> best;
    for (int fog = 1; fog <= topo.n_fogs; ++fog) {
      if (!topo.fog_ok(fog) || !topo.reach(fog).contains(x)) {
        continue;
      }
      const auto feeds = topo.feeds(fog);
      const bool sees = std::any_of(feeds.begin(), feeds.end(), [&](const CameraId & c) {
        return topo.camera_ok(c) && topo.camera_interval(c).contains(x);
      });
      if (sees && (!best || std::abs(fog - home) < std::abs(*best - home))) {
        best = fog;
      }
    }
    r.positions.push_back(x);
    r.serving.push_back(best);
    if (!best) {
      r.operational = false;
    }
  }
  return r;
}

namespace
{

void check_fog(const FogTopology & topo, int fog)
{
  if (fog < 1 || fog > topo.n_fogs) {
    throw Error(ErrorCode::BadParams, "no fog " + std::to_string(fog));
  }
}

void check_camera(const FogTopology & topo, CameraId cam)
{
  const int limit = cam.kind == CameraKind::Primary ? topo.n_fogs : topo.n_fogs - 1;
  if (cam.index < 1 || cam.index > limit) {
    throw Error(ErrorCode::BadParams, "no camera " + to_string(cam));
  }
}

bool section_covered(const FogTopology & topo, int fog)
{
  const auto report = coverage(topo);
  const auto sec = topo.section(fog);
  for (std::size_t i = 0; i < report.positions.size(); ++i) {
    if (sec.contains(report.positions[i]) && !report.serving[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool operational_after(const FogTopology & topo, const std::set<int> & fog_failures,
                       const std::set<CameraId> & cam_failures)
{
  FogTopology t = topo;
  for (const int f : fog_failures) {
    check_fog(topo, f);
    t.failed_fogs.insert(f);
  }
  for (const auto & c : cam_failures) {
    check_camera(topo, c);
    t.failed_cams.insert(c);
  }
  return coverage(t).operational;
}

CameraFaultCases camera_fault_cases(const FogTopology & topo, int fog)
{
  check_fog(topo, fog);
  std::vector<CameraId> secondaries;
  for (const int j : {fog - 1, fog}) {
    if (j >= 1 && j < topo.n_fogs) {
      secondaries.push_back({CameraKind::Secondary, j});
    }
  }
  CameraFaultCases out;
  {
    auto t = topo;
    t.failed_cams.insert({CameraKind::Primary, fog});
    out.primary_fails = section_covered(t, fog);
  }
  out.one_secondary_fails = true;
  for (const auto & s : secondaries) {
    auto t = topo;
    t.failed_cams.insert(s);
    out.one_secondary_fails = out.one_secondary_fails && section_covered(t, fog);
  }
  {
    auto t = topo;
    t.failed_cams.insert(secondaries.begin(), secondaries.end());
    out.both_secondaries_fail = section_covered(t, fog);
  }
  return out;
}

std::string to_string(CameraId cam)
{
  return (cam.kind == CameraKind::Primary ? "P" : "S") + std::to_string(cam.index);
}

nlohmann::json to_json(const FogTopology & topo)
{
  nlohmann::json cams = nlohmann::json::array();
  for (const auto & c : topo.cameras()) {
    const auto iv = topo.camera_interval(c);
    cams.push_back({{"camera", to_string(c)}, {"lo", iv.lo}, {"hi", iv.hi}});
  }
  nlohmann::json fogs = nlohmann::json::array();
  for (int f = 1; f <= topo.n_fogs; ++f) {
    nlohmann::json feeds = nlohmann::json::array();
    for (const auto & c : topo.feeds(f)) {
      feeds.push_back(to_string(c));
    }
    const auto sec = topo.section(f);
    fogs.push_back({{"fog", f}, {"lo", sec.lo}, {"hi", sec.hi}, {"feeds", feeds}});
  }
  nlohmann::json failed_cams = nlohmann::json::array();
  for (const auto & c : topo.failed_cams) {
    failed_cams.push_back(to_string(c));
  }
  return {
    {"n_fogs", topo.n_fogs},
    {"fog_span", topo.fog_span},
    {"fogs", fogs},
    {"cameras", cams},
    {"failed_fogs", topo.failed_fogs},
    {"failed_cameras", failed_cams}};
}

nlohmann::json to_json(const CoverageReport & report)
{
  nlohmann::json serving = nlohmann::json::array();
  for (const auto & s : report.serving) {
    serving.push_back(s ? nlohmann::json(*s) : nlohmann::json(nullptr));
  }
  return {
    {"operational", report.operational},
    {"uncovered", report.uncovered()},
    {"box_count", report.positions.size()},
    {"serving", serving}};
}

}  // namespace edgetwin
