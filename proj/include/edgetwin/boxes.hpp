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


#ifndef EDGETWIN__BOXES_HPP_
#define EDGETWIN__BOXES_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "edgetwin/forecaster.hpp"
#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

/// Boxes of the grid whose rectangle [slot_lo, slot_hi) x [lane_lo, lane_hi)
/// shares positive area with a footprint centered at `center`. Ascending
/// (lane, slot); empty when the footprint misses the segment.
std::vector<BoxId> footprint_boxes(Position center, double length, double width,
                                   const RoadGeometry & geometry);

/// Boxes touched by a vehicle's footprint. Throws OutOfSegment when the
/// footprint misses the segment entirely.
std::vector<BoxId> box_index(const VehicleState & state, const RoadGeometry & geometry);

/// Per-box list of occupying vehicles at one frame.
class OccupancyGrid
{
public:
  OccupancyGrid(const RoadGeometry & geometry, int frame);

  const RoadGeometry & geometry() const { return geometry_; }
  int frame() const { return frame_; }
  int lanes() const { return geometry_.band_count(); }
  int slots() const { return slots_; }

  bool occupied(BoxId box) const { return !cells_[index(box)].empty(); }
  /// Ascending vehicle ids in the box.
  const std::vector<int> & vehicles(BoxId box) const { return cells_[index(box)]; }
  std::size_t occupied_count() const;
  void add(BoxId box, int vehicle_id);

  bool operator==(const OccupancyGrid &) const = default;

private:
  std::size_t index(BoxId box) const;

  RoadGeometry geometry_;
  int frame_ = 0;
  int slots_ = 0;
  std::vector<std::vector<int>> cells_;
};

/// Occupancy of one frame. Vehicles whose footprint misses the segment are
/// skipped. Throws MixedFrames unless every state has the same frame; an
/// empty input yields an all-free grid at `frame`.
OccupancyGrid occupancy(std::span<const VehicleState> states, const RoadGeometry & geometry,
                        int frame = 0);

enum class CellStatus { Safe, OccupiedNow, PredictedOccupied, Hazard };

struct HazardCell
{
  bool occupied_now = false;
  bool predicted = false;
  bool allocated = false;   // granted to another AV in the current pass
  bool unobserved = false;  // within reach of traffic not yet in view
  int first_horizon = -1;   // smallest horizon with a predicted footprint
  std::vector<int> vehicles;

  bool safe() const { return !occupied_now && !predicted && !allocated && !unobserved; }
  CellStatus status() const;
  bool operator==(const HazardCell &) const = default;
};

struct HazardOptions
{
  int horizon = 25;
  double vicinity = 100.0;
  /// Intermediate horizons checked; empty means the forecaster's model
  /// horizons up to `horizon` (every frame for model-free forecasters).
  /// `horizon` itself is always included.
  std::vector<int> horizons;
  /// Boxes starting within this many meters of segment_start are marked
  /// unobserved (traffic entering the segment is not in the snapshot).
  double inflow_guard = 0.0;
};

class HazardMap
{
public:
  HazardMap(const RoadGeometry & geometry, int base_frame, int horizon, const VehicleState & ego);

  const RoadGeometry & geometry() const { return geometry_; }
  int base_frame() const { return base_frame_; }
  int horizon() const { return horizon_; }
  const VehicleState & ego() const { return ego_; }
  int ego_id() const { return ego_.vehicle_id; }
  int lanes() const { return geometry_.band_count(); }
  int slots() const { return slots_; }
  /// Slot the ego reaches at `horizon` when holding its speed.
  int preferred_slot(double fps) const;

  const HazardCell & cell(BoxId box) const { return cells_[index(box)]; }
  HazardCell & cell(BoxId box) { return cells_[index(box)]; }
  bool safe(BoxId box) const { return cell(box).safe(); }

  std::size_t fallbacks = 0;  // vehicles served by persistence

  bool operator==(const HazardMap &) const = default;

private:
  std::size_t index(BoxId box) const;

  RoadGeometry geometry_;
  int base_frame_ = 0;
  int horizon_ = 0;
  VehicleState ego_;
  int slots_ = 0;
  std::vector<HazardCell> cells_;
};

/// Predicted center of a vehicle `h` frames ahead; nullopt means fall back
/// to its current position.
using Predictor = std::function<std::optional<Position>(const VehicleState &, int h)>;

/// Hazard map for `ego_id` from the states of one frame. Every other vehicle
/// within `vicinity` meters marks its current boxes occupied and, at every
/// horizon in `horizons`, the boxes of its footprint placed at the
/// predicted center. Throws UnknownVehicle when the ego is absent.
HazardMap build_hazard_map(std::span<const VehicleState> states, int base_frame, int ego_id,
                           const RoadGeometry & geometry, std::span<const int> horizons,
                           const HazardOptions & options, const Predictor & predict);

/// Horizons a hazard map checks for this forecaster, ascending.
std::vector<int> hazard_horizons(const Forecaster & forecaster, const HazardOptions & options);

/// Hazard map at `frame` of the trace, predicting with `forecaster`.
HazardMap hazard_map(const Trace & trace, int frame, int ego_id, const Forecaster & forecaster,
                     const HazardOptions & options = {});

/// {"frame", "horizon", "ego", "lanes", "slots", "rows": one string per
/// lane, one character per slot: '.' safe, 'O' occupied now, 'P' predicted,
/// 'H' hazard}.
nlohmann::json to_json(const HazardMap & map);

}  // namespace edgetwin

#endif  // EDGETWIN__BOXES_HPP_
