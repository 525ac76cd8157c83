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

#ifndef EDGETWIN__SYNTH_HPP_
#define EDGETWIN__SYNTH_HPP_

#include <cstdint>

#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

/// Desk-scale stand-in for a recorded highway.
///
/// The road is simulated as a closed loop of `segment_length` meters so the
/// population stays constant; in the emitted trace a vehicle that reaches the
/// end of the segment leaves it and re-enters at the start under a fresh id
/// (physical role flags are kept). Dynamics, fixed:
///   - longitudinal: Intelligent Driver Model (a = 1.0, b = 1.5 m/s^2,
///     headway 1.2 s, jam gap 2 m, exponent 4) against the nearest vehicle
///     ahead in every lane the vehicle occupies, acceleration clamped to
///     [-6, 1] m/s^2, plus a hard position limit that keeps 0.5 m of bumper
///     gap to each leader's previous position;
///   - lateral: lane changes requested at Poisson times (lane_change_rate per
///     vehicle per second), accepted only if the target lane leaves at least
///     2 m + 0.6 s * v ahead and 2 m + 1.2 s * v_rear behind; accepted changes
///     follow y(t) = y0 + dy * (1 - cos(pi t / 2 s)) / 2 and occupy both lanes
///     for the whole maneuver.
struct SynthConfig
{
  int vehicles = 30;
  int steps = 10000;
  int lane_count = 3;
  std::uint64_t seed = 1;
  double lane_change_rate = 0.02;
  double speed_min = 20.0;
  double speed_max = 35.0;
  double segment_length = 1000.0;
  double lane_width = 3.5;
  double box_length = 5.0;
  bool has_shoulder = false;
  double fps = kDefaultFps;
  double truck_fraction = 0.15;
  int autonomous = 0;  // vehicles flagged as AVs (the first ones placed)
};

/// Throws BadParams on an invalid config and InfeasibleDensity when the
/// vehicles cannot be placed without overlap.
Trace synth_trace(const SynthConfig & config);

}  // namespace edgetwin

#endif  // EDGETWIN__SYNTH_HPP_
