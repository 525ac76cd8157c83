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


#ifndef EDGETWIN__PIPELINE_HPP_
#define EDGETWIN__PIPELINE_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "edgetwin/allocator.hpp"
#include "edgetwin/boxes.hpp"
#include "edgetwin/forecaster.hpp"
#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

/// Per-stage latency in time steps. A scene captured at step t drives the
/// vehicles at step t + total_delay().
struct StageConfig
{
  int capture = 1;
  int transfer = 1;
  int recognize = 1;
  int shift = 1;
  int deliver = 1;

  int total_delay() const { return capture + transfer + recognize + shift + deliver; }
  /// Throws BadParams on a negative stage.
  void validate() const;
  bool operator==(const StageConfig &) const = default;
};

/// Whole time steps needed to cover `milliseconds` at `fps` (rounded up).
int ms_to_steps(double milliseconds, double fps = kDefaultFps);

struct WorldSnapshot
{
  int capture_frame = 0;
  std::vector<VehicleState> states;  // ascending vehicle id
  std::optional<int> shifted_to;
};

/// The states of `frame` as the cameras saw them. Throws FrameOutOfRange.
WorldSnapshot capture(const Trace & trace, int frame);

/// Moves every vehicle of `snapshot` to its forecast position at
/// `target_frame`, predicted from `history` (which must hold the snapshot's
/// frame and the frames before it). Velocities and accelerations are
/// carried over. Vehicles the forecaster cannot serve keep their captured
/// position and are appended to `fallbacks` when given. Throws BadParams
/// when target_frame < capture_frame.
WorldSnapshot time_shift(const WorldSnapshot & snapshot, const Forecaster & forecaster,
                         int target_frame, const Trace & history,
                         std::vector<int> * fallbacks = nullptr);

struct PipelineOptions
{
  StageConfig stages;
  /// Frames of history kept per vehicle; raised to the forecaster's need.
  int history = kDefaultHistory;
  std::vector<double> thresholds = {0.01, 0.05, 0.1, 0.5};
  HazardOptions hazard;
  /// Mark boxes near the segment entry unobserved (see HazardOptions).
  bool inflow_guard = true;
  /// Upper bound on the length of vehicles that may enter unseen.
  double max_vehicle_length = 20.0;
  /// Keep every n-th plan waypoint in the directive log (the last is kept).
  int plan_stride = 5;
  /// Keep each AV's hazard map (as JSON) in the frame records.
  bool record_maps = false;
};

struct Directive
{
  int vehicle_id = 0;
  bool hold = false;
  BoxId box;
  std::vector<Waypoint> plan;
};

struct FrameRecord
{
  int frame = 0;
  int capture_frame = 0;
  std::size_t vehicles = 0;   // scored vehicles (present at capture and delivery)
  std::size_t fallbacks = 0;  // vehicles the forecaster could not serve
  double staleness_error = 0.0;
  double shifted_error = 0.0;
  std::map<double, double> hit_rate;  // threshold -> fraction of shifted errors within it
  std::vector<Directive> directives;
  std::vector<nlohmann::json> maps;  // filled when PipelineOptions::record_maps
};

struct PipelineMetrics
{
  int total_delay = 0;
  std::size_t frames = 0;
  std::size_t scored = 0;  // vehicle-frames contributing to the errors
  double mean_staleness_error = 0.0;
  double mean_shifted_error = 0.0;
  double max_staleness_error = 0.0;
  double max_shifted_error = 0.0;
  std::map<double, double> hit_rate;  // pooled over all vehicle-frames
  std::size_t fallbacks = 0;
  std::size_t grants = 0;
  std::size_t holds = 0;
  std::size_t duplicate_grants = 0;  // boxes granted to more than one AV
  std::size_t unsafe_grants = 0;     // grants meeting human traffic at the grant horizon
};

struct PipelineResult
{
  PipelineMetrics metrics;
  std::vector<FrameRecord> records;
};

/// Replays `trace` through the capture-to-directive pipeline. At every
/// delivery frame t the snapshot captured at t - total_delay is time
/// shifted to t, hazard maps and allocations for the AVs present in it are
/// computed on the shifted snapshot, and both snapshot variants are scored
/// against the recorded frame t. Grants are checked post hoc against the
/// recorded human traffic at t + hazard horizon. Throws TraceTooShort when
/// the trace has fewer than total_delay + history + horizon frames, and
/// MissingHorizonModel when a needed horizon cannot be served.
PipelineResult run_pipeline(const Trace & trace, const Forecaster & forecaster,
                            std::span<const int> av_ids, const PipelineOptions & options = {});

/// Fraction of forecasts within each threshold, per window, on the points
/// of `test_ids` (same protocol as evaluate). Throws MissingHorizonModel
/// when a window has no dedicated model.
struct SpeculativeTable
{
  std::vector<int> windows;
  std::vector<double> thresholds;
  std::vector<std::vector<double>> accuracy;  // [window][threshold]
  std::vector<std::size_t> points;            // per window
};

SpeculativeTable speculative_eval(const Trace & trace, const Forecaster & forecaster,
                                  std::span<const int> test_ids, std::span<const int> windows,
                                  std::span<const double> thresholds, int history = kDefaultHistory,
                                  int stride = 1);

nlohmann::json to_json(const PipelineMetrics & metrics);
nlohmann::json to_json(const FrameRecord & record);
nlohmann::json to_json(const SpeculativeTable & table);

}  // namespace edgetwin

#endif  // EDGETWIN__PIPELINE_HPP_
