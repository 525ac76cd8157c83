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

#include "edgetwin/trace_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "edgetwin/error.hpp"
#include "edgetwin/rng.hpp"

namespace edgetwin
{

void RoadGeometry::validate() const
{
  if (lane_count < 1) {
    throw Error(ErrorCode::BadParams, "lane_count must be >= 1");
  }
  if (!(lane_width > 0.0) || !(box_length > 0.0)) {
    throw Error(ErrorCode::BadParams, "lane_width and box_length must be positive");
  }
  if (!(segment_end > segment_start)) {
    throw Error(ErrorCode::BadParams, "segment_end must exceed segment_start");
  }
  const double boxes = length() / box_length;
  if (std::abs(boxes - std::round(boxes)) > 1e-9 * std::max(1.0, boxes)) {
    throw Error(ErrorCode::BadParams, "segment length is not a multiple of box_length");
  }
}

int RoadGeometry::slot_count() const
{
  return static_cast<int>(std::llround(length() / box_length));
}

int RoadGeometry::lane_of(double y) const
{
  const int lane = static_cast<int>(std::floor(y / lane_width));
  return std::clamp(lane, 0, band_count() - 1);
}

int RoadGeometry::slot_of(double x) const
{
  const int slot = static_cast<int>(std::floor((x - segment_start) / box_length));
  return std::clamp(slot, 0, slot_count() - 1);
}

RoadGeometry RoadGeometry::padded() const
{
  RoadGeometry out = *this;
  const double boxes = std::ceil(length() / box_length - 1e-9);
  out.segment_end = segment_start + std::max(1.0, boxes) * box_length;
  return out;
}

namespace
{

void check_state(const VehicleState & s, const RoadGeometry & geometry)
{
  const auto where = "vehicle " + std::to_string(s.vehicle_id) + " frame " + std::to_string(s.frame);
  if (s.frame < 0) {
    throw Error(ErrorCode::InvalidRow, where + ": negative frame");
  }
  if (!(s.length > 0.0) || !(s.width > 0.0)) {
    throw Error(ErrorCode::InvalidRow, where + ": non-positive footprint");
  }
  for (const double v : {s.x, s.y, s.vx, s.vy, s.ax, s.ay}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidRow, where + ": non-finite value");
    }
  }
  if (s.lane != geometry.lane_of(s.y)) {
    throw Error(ErrorCode::InvalidRow, where + ": lane disagrees with lateral position");
  }
}

}  // namespace

Trace Trace::build(std::vector<VehicleState> states, const RoadGeometry & geometry, double fps)
{
  geometry.validate();
  if (!(fps > 0.0)) {
    throw Error(ErrorCode::BadParams, "fps must be positive");
  }
  Trace trace;
  trace.geometry_ = geometry;
  trace.fps_ = fps;
  trace.state_count_ = states.size();

  for (const auto & s : states) {
    check_state(s, geometry);
  }
  std::stable_sort(states.begin(), states.end(), [](const auto & a, const auto & b) {
    return std::pair(a.vehicle_id, a.frame) < std::pair(b.vehicle_id, b.frame);
  });
  for (std::size_t i = 1; i < states.size(); ++i) {
    const auto & prev = states[i - 1];
    const auto & cur = states[i];
    if (prev.vehicle_id != cur.vehicle_id) {
      continue;
    }
    if (cur.frame == prev.frame) {
      throw Error(
        ErrorCode::NonMonotoneFrames, "vehicle " + std::to_string(cur.vehicle_id) +
                                        " repeats frame " + std::to_string(cur.frame));
    }
    if (cur.frame != prev.frame + 1) {
      throw Error(ErrorCode::NonContiguousVehicle, std::to_string(cur.vehicle_id));
    }
  }

  std::map<int, std::vector<VehicleState>> by_frame;
  for (const auto & s : states) {
    by_frame[s.frame].push_back(s);
    trace.tracks_[s.vehicle_id].push_back(s);
  }
  trace.frames_.reserve(by_frame.size());
  for (auto & [index, frame_states] : by_frame) {
    trace.frames_.push_back(Frame{index, std::move(frame_states)});
  }
  return trace;
}

int Trace::first_frame() const
{
  if (frames_.empty()) {
    throw Error(ErrorCode::EmptyTrace, "trace has no frames");
  }
  return frames_.front().index;
}

int Trace::last_frame() const
{
  if (frames_.empty()) {
    throw Error(ErrorCode::EmptyTrace, "trace has no frames");
  }
  return frames_.back().index;
}

const Frame * Trace::find_frame(int frame) const
{
  auto it = std::lower_bound(
    frames_.begin(), frames_.end(), frame, [](const Frame & f, int v) { return f.index < v; });
  if (it == frames_.end() || it->index != frame) {
    return nullptr;
  }
  return &*it;
}

const VehicleState * Trace::find(int vehicle_id, int frame) const
{
  auto it = tracks_.find(vehicle_id);
  if (it == tracks_.end() || it->second.empty()) {
    return nullptr;
  }
  const auto & track = it->second;
  const long offset = static_cast<long>(frame) - track.front().frame;
  if (offset < 0 || offset >= static_cast<long>(track.size())) {
    return nullptr;
  }
  return &track[static_cast<std::size_t>(offset)];
}

const VehicleState & Trace::at(int vehicle_id, int frame) const
{
  if (!has_vehicle(vehicle_id)) {
    throw Error(ErrorCode::UnknownVehicle, std::to_string(vehicle_id));
  }
  const auto * s = find(vehicle_id, frame);
  if (s == nullptr) {
    throw Error(
      ErrorCode::FrameOutOfRange,
      "vehicle " + std::to_string(vehicle_id) + " absent at frame " + std::to_string(frame));
  }
  return *s;
}

std::span<const VehicleState> Trace::track(int vehicle_id) const
{
  auto it = tracks_.find(vehicle_id);
  if (it == tracks_.end()) {
    return {};
  }
  return it->second;
}

std::vector<int> Trace::vehicle_ids() const
{
  std::vector<int> ids;
  ids.reserve(tracks_.size());
  for (const auto & [id, track] : tracks_) {
    ids.push_back(id);
  }
  return ids;
}

Trace Trace::window(int first, int last) const
{
  Trace out;
  out.geometry_ = geometry_;
  out.fps_ = fps_;
  auto lo = std::lower_bound(
    frames_.begin(), frames_.end(), first, [](const Frame & f, int v) { return f.index < v; });
  for (auto it = lo; it != frames_.end() && it->index <= last; ++it) {
    out.frames_.push_back(*it);
    for (const auto & s : it->states) {
      out.tracks_[s.vehicle_id].push_back(s);
    }
    out.state_count_ += it->states.size();
  }
  return out;
}

Trace Trace::select(std::span<const int> vehicle_ids) const
{
  std::vector<VehicleState> states;
  for (const int id : vehicle_ids) {
    const auto t = track(id);
    states.insert(states.end(), t.begin(), t.end());
  }
  return build(std::move(states), geometry_, fps_);
}

bool Trace::operator==(const Trace & other) const
{
  return geometry_ == other.geometry_ && fps_ == other.fps_ && frames_ == other.frames_;
}

TrainTestSplit split_train_test(const Trace & trace, double ratio, std::uint64_t seed)
{
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::BadParams, "split ratio must lie in (0, 1)");
  }
  auto ids = trace.vehicle_ids();
  if (ids.empty()) {
    throw Error(ErrorCode::EmptyTrace, "cannot split a trace without vehicles");
  }
  Rng rng(seed);
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    std::swap(ids[i], ids[rng.index(i + 1)]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(ids.size())));
  TrainTestSplit split;
  split.train.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
  split.test.assign(ids.begin() + static_cast<long>(n_train), ids.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Neighbors neighbors(std::span<const VehicleState> frame_states, const VehicleState & ego)
{
  Neighbors out;
  const auto ego_key = std::pair(ego.x, ego.vehicle_id);
  for (const auto & other : frame_states) {
    if (other.vehicle_id == ego.vehicle_id) {
      continue;
    }
    int side = -1;
    if (other.lane == ego.lane) {
      side = 0;
    } else if (other.lane == ego.lane - 1) {
      side = 1;
    } else if (other.lane == ego.lane + 1) {
      side = 2;
    } else {
      continue;
    }
    const auto key = std::pair(other.x, other.vehicle_id);
    const bool ahead = key > ego_key;
    auto & slot = out.slots[static_cast<std::size_t>(2 * side + (ahead ? 0 : 1))];
    if (!slot) {
      slot = other;
      continue;
    }
    const auto best = std::pair(slot->x, slot->vehicle_id);
    if (ahead ? key < best : key > best) {
      slot = other;
    }
  }
  return out;
}

Neighbors neighbors(const Trace & trace, int vehicle_id, int frame)
{
  const auto & ego = trace.at(vehicle_id, frame);
  return neighbors(trace.find_frame(frame)->states, ego);
}

}  // namespace edgetwin
