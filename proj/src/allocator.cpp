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


#include "edgetwin/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>

#include "edgetwin/error.hpp"

namespace edgetwin
{

namespace
{

constexpr double kTolerance = 1e-9;

std::optional<ManeuverPlan> make_plan(const VehicleState & ego, BoxId target,
                                      const RoadGeometry & g, int horizon, double fps,
                                      std::string * why)
{
  auto fail = [&](std::string reason) -> std::optional<ManeuverPlan> {
    if (why) {
      *why = std::move(reason);
    }
    return std::nullopt;
  };
  if (target.lane < 0 || target.lane >= g.band_count() || target.slot < 0 ||
      target.slot >= g.slot_count()) {
    return fail("target box outside the grid");
  }
  const int lane_now = g.lane_of(ego.y);
  if (std::abs(target.lane - lane_now) > 1) {
    return fail("target is more than one lane away");
  }
  const double t_end = horizon / fps;
  const double dx = g.slot_center(target.slot) - ego.x;
  const double accel = 2.0 * (dx - ego.vx * t_end) / (t_end * t_end);
  const double v_end = ego.vx + accel * t_end;
  if (accel > kMaxAcceleration + kTolerance || accel < -kMaxDeceleration - kTolerance) {
    return fail("needs acceleration " + std::to_string(accel) + " m/s^2");
  }
  if (v_end < -kTolerance || v_end > kMaxSpeed + kTolerance) {
    return fail("ends at speed " + std::to_string(v_end) + " m/s");
  }
  const double dy = g.lane_center(target.lane) - ego.y;
  const double t_lat = std::max(t_end, 1.5 * std::abs(dy) / kMaxLateralSpeed);
  const int n = std::max(horizon, static_cast<int>(std::ceil(t_lat * fps - kTolerance)));

  ManeuverPlan plan;
  plan.target = target;
  plan.waypoints.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = k / fps;
    double x = 0.0;
    if (k <= horizon) {
      x = ego.x + ego.vx * t + 0.5 * accel * t * t;
    } else {
      x = ego.x + ego.vx * t_end + 0.5 * accel * t_end * t_end + v_end * (t - t_end);
    }
    const double s = std::min(1.0, t / t_lat);
    const double y = ego.y + dy * s * s * (3.0 - 2.0 * s);
    plan.waypoints.push_back({ego.frame + k, x, y});
  }
  for (std::size_t k = 1; k < plan.waypoints.size(); ++k) {
    const auto & a = plan.waypoints[k - 1];
    const auto & b = plan.waypoints[k];
    if (std::hypot(b.x - a.x, b.y - a.y) * fps > kMaxSpeed + kTolerance) {
      return fail("exceeds the speed limit");
    }
  }
  return plan;
}

}  // namespace

ManeuverPlan plan_maneuver(const VehicleState & ego, BoxId target, const RoadGeometry & geometry,
                           int horizon, double fps)
{
  if (horizon < 1 || !(fps > 0.0)) {
    throw Error(ErrorCode::BadParams, "horizon must be >= 1 and fps > 0");
  }
  std::string why;
  auto plan = make_plan(ego, target, geometry, horizon, fps, &why);
  if (!plan) {
    throw Error(
      ErrorCode::UnreachableBox, "vehicle " + std::to_string(ego.vehicle_id) + " to (" +
                                   std::to_string(target.lane) + ", " +
                                   std::to_string(target.slot) + "): " + why);
  }
  return *plan;
}

std::optional<ManeuverPlan> try_plan_maneuver(const VehicleState & ego, BoxId target,
                                              const RoadGeometry & geometry, int horizon,
                                              double fps)
{
  if (horizon < 1 || !(fps > 0.0)) {
    return std::nullopt;
  }
  return make_plan(ego, target, geometry, horizon, fps, nullptr);
}

Allocation allocate(int frame, std::span<const int> requests,
                    const std::map<int, HazardMap> & maps, const Allocation & current, double fps)
{
  std::vector<int> order(requests.begin(), requests.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  Allocation out;
  out.frame = frame;
  std::set<BoxId> granted;
  for (const int id : order) {
    const auto it = maps.find(id);
    if (it == maps.end()) {
      throw Error(ErrorCode::StaleMap, "no hazard map for vehicle " + std::to_string(id));
    }
    const auto & map = it->second;
    if (map.base_frame() != frame) {
      throw Error(
        ErrorCode::StaleMap, "map of vehicle " + std::to_string(id) + " is for frame " +
                               std::to_string(map.base_frame()) + ", request is for " +
                               std::to_string(frame));
    }
    out.horizon = map.horizon();
    const auto & g = map.geometry();
    const auto & ego = map.ego();
    const int lane_now = g.lane_of(ego.y);
    const int preferred = map.preferred_slot(fps);

    // Slots whose centers a constant-acceleration profile can reach.
    const double t = map.horizon() / fps;
    const double a_min = std::max(-kMaxDeceleration, -ego.vx / t);
    const double a_max = std::min(kMaxAcceleration, (kMaxSpeed - ego.vx) / t);
    std::vector<std::tuple<int, int, int, int>> candidates;  // cost, then box
    if (a_min <= a_max) {
      const double x_lo = ego.x + ego.vx * t + 0.5 * a_min * t * t;
      const double x_hi = ego.x + ego.vx * t + 0.5 * a_max * t * t;
      const int s_lo = std::max(0, g.slot_of(x_lo) - 1);
      const int s_hi = std::min(g.slot_count() - 1, g.slot_of(x_hi) + 1);
      for (int lane = std::max(0, lane_now - 1); lane <= std::min(g.lane_count - 1, lane_now + 1);
           ++lane) {
        for (int slot = s_lo; slot <= s_hi; ++slot) {
          const BoxId box{lane, slot};
          if (map.safe(box) && !granted.count(box)) {
            candidates.emplace_back(std::abs(lane - lane_now), std::abs(slot - preferred), lane, slot);
          }
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    bool done = false;
    for (const auto & [lc, dist, lane, slot] : candidates) {
      const BoxId box{lane, slot};
      if (try_plan_maneuver(ego, box, g, map.horizon(), fps)) {
        out.assignments[id] = box;
        granted.insert(box);
        done = true;
        break;
      }
    }
    if (!done) {
      const auto prev = current.assignments.find(id);
      out.holds[id] = prev != current.assignments.end() ? prev->second
                                                         : BoxId{lane_now, g.slot_of(ego.x)};
    }
  }
  return out;
}

nlohmann::json to_json(const Allocation & allocation)
{
  nlohmann::json grants = nlohmann::json::array();
  for (const auto & [id, box] : allocation.assignments) {
    grants.push_back({{"vehicle", id}, {"lane", box.lane}, {"slot", box.slot}});
  }
  nlohmann::json holds = nlohmann::json::array();
  for (const auto & [id, box] : allocation.holds) {
    holds.push_back({{"vehicle", id}, {"lane", box.lane}, {"slot", box.slot}});
  }
  return {
    {"frame", allocation.frame},
    {"horizon", allocation.horizon},
    {"grants", grants},
    {"holds", holds}};
}

nlohmann::json to_json(const ManeuverPlan & plan)
{
  nlohmann::json out = nlohmann::json::array();
  for (const auto & w : plan.waypoints) {
    out.push_back({w.frame, w.x, w.y});
  }
  return out;
}

}  // namespace edgetwin
