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

#include "edgetwin/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "edgetwin/error.hpp"
#include "edgetwin/rng.hpp"

namespace edgetwin
{

namespace
{

constexpr double kMaxAccel = 1.0;
constexpr double kComfortDecel = 1.5;
constexpr double kMaxDecel = 6.0;
constexpr double kHeadway = 1.2;
constexpr double kJamGap = 2.0;
constexpr double kHardGap = 0.5;
constexpr double kChangeDuration = 2.0;
constexpr double kFrontAcceptHeadway = 0.6;

struct Agent
{
  int emitted_id = 0;
  double s = 0.0;  // loop coordinate in [0, L)
  double v = 0.0;
  double a = 0.0;
  double v0 = 0.0;
  double length = 0.0;
  double width = 0.0;
  VehicleClass klass = VehicleClass::Car;
  bool autonomous = false;
  int lane = 0;         // lane before/after a change
  int target = -1;      // lane being entered, -1 when not changing
  int change_step = 0;  // frames into the current change
  double next_desire = 0.0;  // seconds of simulated time

  bool occupies(int l) const { return l == lane || l == target; }
};

double idm(double v, double v0, double dv, double gap)
{
  const double s_star =
    kJamGap + std::max(0.0, v * kHeadway + v * dv / (2.0 * std::sqrt(kMaxAccel * kComfortDecel)));
  const double s = std::max(gap, 0.01);
  return kMaxAccel * (1.0 - std::pow(v / v0, 4) - (s_star / s) * (s_star / s));
}

double free_accel(double v, double v0)
{
  return kMaxAccel * (1.0 - std::pow(v / v0, 4));
}

void validate(const SynthConfig & c)
{
  if (c.vehicles < 0 || c.steps < 1 || c.lane_count < 1 || c.autonomous < 0) {
    throw Error(ErrorCode::BadParams, "generator counts must be positive");
  }
  if (!(c.speed_min >= 10.0 && c.speed_max <= 45.0 && c.speed_min <= c.speed_max)) {
    throw Error(ErrorCode::BadParams, "speed range must lie within [10, 45] m/s");
  }
  if (!(c.lane_change_rate >= 0.0) || !(c.fps > 0.0) || !(c.segment_length > 0.0) ||
      !(c.truck_fraction >= 0.0 && c.truck_fraction <= 1.0)) {
    throw Error(ErrorCode::BadParams, "invalid generator parameters");
  }
}

}  // namespace

Trace synth_trace(const SynthConfig & config)
{
  validate(config);
  RoadGeometry geometry;
  geometry.lane_count = config.lane_count;
  geometry.lane_width = config.lane_width;
  geometry.box_length = config.box_length;
  geometry.has_shoulder = config.has_shoulder;
  geometry.segment_start = 0.0;
  geometry.segment_end = config.segment_length;
  geometry = geometry.padded();
  geometry.validate();

  const double L = geometry.length();
  const double dt = 1.0 / config.fps;
  const int change_frames = static_cast<int>(std::lround(kChangeDuration * config.fps));
  Rng rng(config.seed);

  std::vector<Agent> agents(static_cast<std::size_t>(config.vehicles));
  for (std::size_t i = 0; i < agents.size(); ++i) {
    auto & ag = agents[i];
    ag.emitted_id = static_cast<int>(i) + 1;
    ag.autonomous = static_cast<int>(i) < config.autonomous;
    const bool truck = rng.bernoulli(config.truck_fraction);
    ag.klass = truck ? VehicleClass::Truck : VehicleClass::Car;
    ag.length = truck ? rng.uniform(12.0, 16.0) : rng.uniform(4.0, 5.0);
    ag.width = truck ? 2.5 : 1.8;
    const double span = config.speed_max - config.speed_min;
    ag.v0 = truck ? config.speed_min + 0.3 * span * rng.uniform()
                  : config.speed_min + span * rng.uniform();
    ag.lane = static_cast<int>(i) % config.lane_count;
    ag.next_desire =
      config.lane_change_rate > 0.0 ? rng.exponential(config.lane_change_rate)
                                    : std::numeric_limits<double>::infinity();
  }
  // Even spacing per lane, staggered across lanes.
  for (int lane = 0; lane < config.lane_count; ++lane) {
    std::vector<Agent *> in_lane;
    for (auto & ag : agents) {
      if (ag.lane == lane) {
        in_lane.push_back(&ag);
      }
    }
    if (in_lane.empty()) {
      continue;
    }
    const double spacing = L / static_cast<double>(in_lane.size());
    double longest = 0.0;
    for (const auto * ag : in_lane) {
      longest = std::max(longest, ag->length);
    }
    if (in_lane.size() > 1 && spacing < longest + kJamGap) {
      throw Error(
        ErrorCode::InfeasibleDensity,
        std::to_string(in_lane.size()) + " vehicles in a " + std::to_string(L) + " m lane");
    }
    const double offset = spacing * static_cast<double>(lane) / config.lane_count;
    for (std::size_t k = 0; k < in_lane.size(); ++k) {
      auto * ag = in_lane[k];
      ag->s = std::fmod(offset + spacing * static_cast<double>(k), L);
      const double gap = in_lane.size() > 1 ? spacing - longest - kJamGap : L;
      ag->v = std::clamp(gap / kHeadway, 0.0, ag->v0);
    }
  }

  auto ahead = [L](const Agent & from, const Agent & to) {
    double d = std::fmod(to.s - from.s, L);
    if (d < 0.0) {
      d += L;
    }
    return d;
  };
  auto bumper_gap = [&](const Agent & from, const Agent & to) {
    return ahead(from, to) - 0.5 * (from.length + to.length);
  };

  std::vector<VehicleState> states;
  states.reserve(agents.size() * static_cast<std::size_t>(config.steps));
  int next_id = config.vehicles + 1;
  auto emit = [&](int frame) {
    for (const auto & ag : agents) {
      VehicleState st;
      st.vehicle_id = ag.emitted_id;
      st.frame = frame;
      st.x = ag.s;
      st.vx = ag.v;
      st.ax = ag.a;
      st.length = ag.length;
      st.width = ag.width;
      st.klass = ag.klass;
      st.autonomous = ag.autonomous;
      const double y0 = geometry.lane_center(ag.lane);
      if (ag.target < 0) {
        st.y = y0;
      } else {
        const double dy = geometry.lane_center(ag.target) - y0;
        const double T = kChangeDuration;
        const double t = ag.change_step * dt;
        const double w = std::numbers::pi / T;
        st.y = y0 + dy * 0.5 * (1.0 - std::cos(w * t));
        st.vy = dy * 0.5 * w * std::sin(w * t);
        st.ay = dy * 0.5 * w * w * std::cos(w * t);
      }
      st.lane = geometry.lane_of(st.y);
      states.push_back(st);
    }
  };

  emit(0);
  for (int frame = 1; frame < config.steps; ++frame) {
    const double now = frame * dt;
    // Lane-change requests, sequential so later checks see earlier grants.
    for (auto & ag : agents) {
      if (ag.target >= 0 || now < ag.next_desire) {
        continue;
      }
      ag.next_desire = now + rng.exponential(config.lane_change_rate);
      std::vector<int> options;
      if (ag.lane > 0) {
        options.push_back(ag.lane - 1);
      }
      if (ag.lane + 1 < config.lane_count) {
        options.push_back(ag.lane + 1);
      }
      if (options.empty()) {
        continue;
      }
      const int target = options[rng.index(options.size())];
      bool safe = true;
      for (const auto & other : agents) {
        if (&other == &ag || !other.occupies(target)) {
          continue;
        }
        const double front = bumper_gap(ag, other);
        const double rear = bumper_gap(other, ag);
        if (front < kJamGap + kFrontAcceptHeadway * ag.v || rear < kJamGap + kHeadway * other.v) {
          safe = false;
          break;
        }
      }
      if (safe) {
        ag.target = target;
        ag.change_step = 0;
      }
    }

    // Longitudinal update from the previous positions.
    std::vector<double> new_s(agents.size()), new_v(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const auto & f = agents[i];
      double accel = free_accel(f.v, f.v0);
      double limit = std::numeric_limits<double>::infinity();
      for (int l : {f.lane, f.target}) {
        if (l < 0) {
          continue;
        }
        const Agent * leader = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const auto & other : agents) {
          if (&other == &f || !other.occupies(l)) {
            continue;
          }
          const double d = ahead(f, other);
          if (d < best) {
            best = d;
            leader = &other;
          }
        }
        if (leader == nullptr) {
          continue;
        }
        const double gap = bumper_gap(f, *leader);
        accel = std::min(accel, idm(f.v, f.v0, f.v - leader->v, gap));
        limit = std::min(limit, gap - kHardGap);
      }
      accel = std::clamp(accel, -kMaxDecel, kMaxAccel);
      double v = std::max(0.0, f.v + accel * dt);
      double step = v * dt;
      if (step > limit) {
        step = std::max(0.0, limit);
        v = step / dt;
      }
      new_s[i] = f.s + step;
      new_v[i] = v;
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
      auto & ag = agents[i];
      ag.a = (new_v[i] - ag.v) / dt;
      ag.v = new_v[i];
      ag.s = new_s[i];
      if (ag.s >= L) {
        ag.s -= L;
        ag.emitted_id = next_id++;
      }
      if (ag.target >= 0) {
        if (++ag.change_step >= change_frames) {
          ag.lane = ag.target;
          ag.target = -1;
          ag.change_step = 0;
        }
      }
    }
    emit(frame);
  }
  return Trace::build(std::move(states), geometry, config.fps);
}

}  // namespace edgetwin
