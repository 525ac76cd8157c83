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


#ifndef EDGETWIN__ALLOCATOR_HPP_
#define EDGETWIN__ALLOCATOR_HPP_

#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "edgetwin/boxes.hpp"
#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

inline constexpr double kMaxAcceleration = 3.0;  // m/s^2
inline constexpr double kMaxDeceleration = 6.0;  // m/s^2
inline constexpr double kMaxSpeed = 45.0;        // m/s
inline constexpr double kMaxLateralSpeed = 2.0;  // m/s

struct Allocation
{
  int frame = 0;
  int horizon = 0;
  std::map<int, BoxId> assignments;  // granted boxes, one vehicle per box
  std::map<int, BoxId> holds;        // AVs told to keep their current box

  bool operator==(const Allocation &) const = default;
};

/// Grants boxes to the requesting AVs, processed in ascending vehicle id.
/// Each gets the safe, reachable, non-shoulder box within one lane that
/// minimizes (lane changes, |slot - preferred slot|, lane, slot); boxes
/// granted earlier in the pass are unavailable to later requesters. An AV
/// without a candidate keeps its previous grant (or its current box) as a
/// Hold. Throws StaleMap when a requester's map is missing or was built
/// for another frame.
Allocation allocate(int frame, std::span<const int> requests,
                    const std::map<int, HazardMap> & maps, const Allocation & current,
                    double fps = kDefaultFps);

struct Waypoint
{
  int frame = 0;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Waypoint &) const = default;
};

struct ManeuverPlan
{
  BoxId target;
  std::vector<Waypoint> waypoints;  // one per frame, starting at the ego's frame

  bool operator==(const ManeuverPlan &) const = default;
};

/// Constant acceleration to the target slot center at `horizon` frames,
/// then cruising; the lateral move to the target lane center follows a
/// smoothstep whose duration keeps |vy| <= kMaxLateralSpeed. Throws
/// UnreachableBox when the target is more than one lane away or the
/// profile breaks the speed or acceleration limits.
ManeuverPlan plan_maneuver(const VehicleState & ego, BoxId target, const RoadGeometry & geometry,
                           int horizon, double fps = kDefaultFps);

/// Same as plan_maneuver, returning nullopt instead of throwing.
std::optional<ManeuverPlan> try_plan_maneuver(const VehicleState & ego, BoxId target,
                                              const RoadGeometry & geometry, int horizon,
                                              double fps = kDefaultFps);

/// {"frame", "horizon", "grants": [{"vehicle", "lane", "slot"}], "holds": [...]}.
nlohmann::json to_json(const Allocation & allocation);
/// [[frame, x, y], ...]
nlohmann::json to_json(const ManeuverPlan & plan);

}  // namespace edgetwin

#endif  // EDGETWIN__ALLOCATOR_HPP_
