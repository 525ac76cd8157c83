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


#ifndef EDGETWIN__FOG_TOPOLOGY_HPP_
#define EDGETWIN__FOG_TOPOLOGY_HPP_

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace edgetwin
{

/// Half-open interval [lo, hi) along the road, meters.
struct Interval
{
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x < hi; }
  bool operator==(const Interval &) const = default;
};

enum class CameraKind { Primary, Secondary };

/// Primary i watches section i (1-based); secondary j watches the boundary
/// between sections j and j + 1.
struct CameraId
{
  CameraKind kind = CameraKind::Primary;
  int index = 1;

  auto operator<=>(const CameraId &) const = default;
};

/// Fogs 1..n own consecutive sections of fog_span meters. Fog i receives
/// primary i, secondaries i - 1 and i, and primaries i - 1 and i + 1, where
/// they exist. Secondaries are offset by half a span; the first and last are
/// stretched to the segment ends so both layers cover the whole road.
struct FogTopology
{
  int n_fogs = 0;
  double fog_span = 0.0;
  double box_length = 5.0;
  std::set<int> failed_fogs;
  std::set<CameraId> failed_cams;

  double length() const { return n_fogs * fog_span; }
  Interval section(int fog) const;
  Interval camera_interval(CameraId cam) const;
  std::vector<CameraId> cameras() const;
  /// Cameras whose feed reaches `fog`, ascending.
  std::vector<CameraId> feeds(int fog) const;
  /// Stretch of road a healthy fog may serve: its own section plus the
  /// nearer half of each neighbor section (the whole section at the ends).
  Interval reach(int fog) const;
  bool fog_ok(int fog) const { return failed_fogs.count(fog) == 0; }
  bool camera_ok(CameraId cam) const { return failed_cams.count(cam) == 0; }
  /// Section (1-based) containing x.
  int section_of(double x) const;
};

/// Throws BadParams unless n_fogs >= 2, fog_span > 0 and box_length > 0.
FogTopology build(int n_fogs, double fog_span, double box_length = 5.0);

struct CoverageReport
{
  std::vector<double> positions;         // box centers along the road
  std::vector<std::optional<int>> serving;  // nullopt: uncovered
  bool operational = true;

  std::size_t uncovered() const;
};

/// A position is covered when a healthy fog whose reach contains it gets a
/// healthy feed containing it; the serving fog is the closest such fog by
/// section distance, ties to the lower index.
CoverageReport coverage(const FogTopology & topo);

/// Coverage is complete after adding the given failures. Throws BadParams
/// for fogs or cameras that do not exist.
bool operational_after(const FogTopology & topo, const std::set<int> & fog_failures,
                       const std::set<CameraId> & cam_failures);

/// Whether the section of `fog` stays covered when its primary fails, when
/// either one of its secondaries fails, and when all its secondaries fail.
struct CameraFaultCases
{
  bool primary_fails = false;
  bool one_secondary_fails = false;
  bool both_secondaries_fail = false;
};

CameraFaultCases camera_fault_cases(const FogTopology & topo, int fog);

std::string to_string(CameraId cam);
nlohmann::json to_json(const FogTopology & topo);
nlohmann::json to_json(const CoverageReport & report);

}  // namespace edgetwin

#endif  // EDGETWIN__FOG_TOPOLOGY_HPP_
