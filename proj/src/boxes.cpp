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


#include "edgetwin/boxes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgetwin/error.hpp"

namespace edgetwin
{

std::vector<BoxId> footprint_boxes(Position center, double length, double width,
                                   const RoadGeometry & g)
{
  std::vector<BoxId> out;
  const double x0 = center.x - length / 2;
  const double x1 = center.x + length / 2;
  const double y0 = center.y - width / 2;
  const double y1 = center.y + width / 2;
  const int slots = g.slot_count();
  const int bands = g.band_count();
  // Candidate range from floor/ceil, widened by one to absorb rounding; the
  // exact overlap test below decides.
  const int s_lo = std::max(0, static_cast<int>(std::floor((x0 - g.segment_start) / g.box_length)) - 1);
  const int s_hi =
    std::min(slots - 1, static_cast<int>(std::ceil((x1 - g.segment_start) / g.box_length)) + 1);
  const int l_lo = std::max(0, static_cast<int>(std::floor(y0 / g.lane_width)) - 1);
  const int l_hi = std::min(bands - 1, static_cast<int>(std::ceil(y1 / g.lane_width)) + 1);
  for (int lane = l_lo; lane <= l_hi; ++lane) {
    const double oy = std::min(y1, g.lane_hi(lane)) - std::max(y0, g.lane_lo(lane));
    if (!(oy > 0.0)) {
      continue;
    }
    for (int slot = s_lo; slot <= s_hi; ++slot) {
      const double ox = std::min(x1, g.slot_hi(slot)) - std::max(x0, g.slot_lo(slot));
      if (ox > 0.0) {
        out.push_back({lane, slot});
      }
    }
  }
  return out;
}

std::vector<BoxId> box_index(const VehicleState & s, const RoadGeometry & g)
{
  auto out = footprint_boxes({s.x, s.y}, s.length, s.width, g);
  if (out.empty()) {
    throw Error(
      ErrorCode::OutOfSegment, "vehicle " + std::to_string(s.vehicle_id) + " at frame " +
                                 std::to_string(s.frame) + " is outside the segment");
  }
  return out;
}

OccupancyGrid::OccupancyGrid(const RoadGeometry & geometry, int frame)
: geometry_(geometry),
  frame_(frame),
  slots_(geometry.slot_count()),
  cells_(static_cast<std::size_t>(geometry.band_count() * slots_))
{
}

std::size_t OccupancyGrid::index(BoxId box) const
{
  if (box.lane < 0 || box.lane >= lanes() || box.slot < 0 || box.slot >= slots_) {
    throw Error(ErrorCode::OutOfSegment, "box outside the grid");
  }
  return static_cast<std::size_t>(box.lane * slots_ + box.slot);
}

std::size_t OccupancyGrid::occupied_count() const
{
  return static_cast<std::size_t>(
    std::count_if(cells_.begin(), cells_.end(), [](const auto & c) { return !c.empty(); }));
}

void OccupancyGrid::add(BoxId box, int vehicle_id)
{
  auto & c = cells_[index(box)];
  const auto it = std::lower_bound(c.begin(), c.end(), vehicle_id);
  if (it == c.end() || *it != vehicle_id) {
    c.insert(it, vehicle_id);
  }
}

OccupancyGrid occupancy(std::span<const VehicleState> states, const RoadGeometry & geometry,
                        int frame)
{
  if (!states.empty()) {
    frame = states.front().frame;
  }
  OccupancyGrid grid(geometry, frame);
  for (const auto & s : states) {
    if (s.frame != frame) {
      throw Error(
        ErrorCode::MixedFrames,
        "states from frames " + std::to_string(frame) + " and " + std::to_string(s.frame));
    }
    for (const auto & box : footprint_boxes({s.x, s.y}, s.length, s.width, geometry)) {
      grid.add(box, s.vehicle_id);
    }
  }
  return grid;
}

CellStatus HazardCell::status() const
{
  if (allocated || unobserved || (occupied_now && predicted)) {
    return CellStatus::Hazard;
  }
  if (occupied_now) {
    return CellStatus::OccupiedNow;
  }
  if (predicted) {
    return CellStatus::PredictedOccupied;
  }
  return CellStatus::Safe;
}

HazardMap::HazardMap(const RoadGeometry & geometry, int base_frame, int horizon,
                     const VehicleState & ego)
: geometry_(geometry),
  base_frame_(base_frame),
  horizon_(horizon),
  ego_(ego),
  slots_(geometry.slot_count()),
  cells_(static_cast<std::size_t>(geometry.band_count() * slots_))
{
}

std::size_t HazardMap::index(BoxId box) const
{
  if (box.lane < 0 || box.lane >= lanes() || box.slot < 0 || box.slot >= slots_) {
    throw Error(ErrorCode::OutOfSegment, "box outside the grid");
  }
  return static_cast<std::size_t>(box.lane * slots_ + box.slot);
}

int HazardMap::preferred_slot(double fps) const
{
  return geometry_.slot_of(ego_.x + ego_.vx * horizon_ / fps);
}

namespace
{

void add_vehicle(HazardCell & cell, int id)
{
  const auto it = std::lower_bound(cell.vehicles.begin(), cell.vehicles.end(), id);
  if (it == cell.vehicles.end() || *it != id) {
    cell.vehicles.insert(it, id);
  }
}

}  // namespace

HazardMap build_hazard_map(std::span<const VehicleState> states, int base_frame, int ego_id,
                           const RoadGeometry & geometry, std::span<const int> horizons,
                           const HazardOptions & options, const Predictor & predict)
{
  const auto ego_it = std::find_if(
    states.begin(), states.end(), [&](const auto & s) { return s.vehicle_id == ego_id; });
  if (ego_it == states.end()) {
    throw Error(
      ErrorCode::UnknownVehicle,
      "ego " + std::to_string(ego_id) + " absent at frame " + std::to_string(base_frame));
  }
  HazardMap map(geometry, base_frame, options.horizon, *ego_it);
  for (const auto & s : states) {
    if (s.vehicle_id == ego_id || std::abs(s.x - ego_it->x) > options.vicinity) {
      continue;
    }
    for (const auto & box : footprint_boxes({s.x, s.y}, s.length, s.width, geometry)) {
      auto & c = map.cell(box);
      c.occupied_now = true;
      add_vehicle(c, s.vehicle_id);
    }
    bool fell_back = false;
    for (const int h : horizons) {
      auto p = predict(s, h);
      if (!p) {
        fell_back = true;
        p = Position{s.x, s.y};
      }
      for (const auto & box : footprint_boxes(*p, s.length, s.width, geometry)) {
        auto & c = map.cell(box);
        if (!c.predicted || h < c.first_horizon) {
          c.first_horizon = h;
        }
        c.predicted = true;
        add_vehicle(c, s.vehicle_id);
      }
    }
    if (fell_back) {
      ++map.fallbacks;
    }
  }
  if (options.inflow_guard > 0.0) {
    for (int slot = 0; slot < map.slots(); ++slot) {
      if (geometry.slot_lo(slot) - geometry.segment_start >= options.inflow_guard) {
        break;
      }
      for (int lane = 0; lane < map.lanes(); ++lane) {
        map.cell({lane, slot}).unobserved = true;
      }
    }
  }
  return map;
}

std::vector<int> hazard_horizons(const Forecaster & forecaster, const HazardOptions & options)
{
  if (options.horizon < 1) {
    throw Error(ErrorCode::BadParams, "hazard horizon must be >= 1");
  }
  std::vector<int> out;
  if (!options.horizons.empty()) {
    out = options.horizons;
  } else {
    const auto available = forecaster.horizons();
    if (available.empty()) {
      for (int h = 1; h <= options.horizon; ++h) {
        out.push_back(h);
      }
    } else {
      for (const int h : available) {
        if (h >= 1 && h <= options.horizon) {
          out.push_back(h);
        }
      }
    }
  }
  out.push_back(options.horizon);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

HazardMap hazard_map(const Trace & trace, int frame, int ego_id, const Forecaster & forecaster,
                     const HazardOptions & options)
{
  const auto * f = trace.find_frame(frame);
  if (!f) {
    throw Error(ErrorCode::FrameOutOfRange, "frame " + std::to_string(frame) + " not in trace");
  }
  const auto horizons = hazard_horizons(forecaster, options);
  return build_hazard_map(
    f->states, frame, ego_id, trace.geometry(), horizons, options,
    [&](const VehicleState & s, int h) { return forecaster.forecast(trace, s.vehicle_id, frame, h); });
}

nlohmann::json to_json(const HazardMap & map)
{
  nlohmann::json rows = nlohmann::json::array();
  for (int lane = 0; lane < map.lanes(); ++lane) {
    std::string row(static_cast<std::size_t>(map.slots()), '.');
    for (int slot = 0; slot < map.slots(); ++slot) {
      switch (map.cell({lane, slot}).status()) {
        case CellStatus::Safe: break;
        case CellStatus::OccupiedNow: row[static_cast<std::size_t>(slot)] = 'O'; break;
        case CellStatus::PredictedOccupied: row[static_cast<std::size_t>(slot)] = 'P'; break;
        case CellStatus::Hazard: row[static_cast<std::size_t>(slot)] = 'H'; break;
      }
    }
    rows.push_back(row);
  }
  return {
    {"frame", map.base_frame()},
    {"horizon", map.horizon()},
    {"ego", map.ego_id()},
    {"lanes", map.lanes()},
    {"slots", map.slots()},
    {"rows", rows}};
}

}  // namespace edgetwin
