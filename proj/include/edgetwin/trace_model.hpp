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

#ifndef EDGETWIN__TRACE_MODEL_HPP_
#define EDGETWIN__TRACE_MODEL_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace edgetwin
{

inline constexpr double kDefaultFps = 25.0;

enum class VehicleClass { Car, Truck };

/// Kinematics of one vehicle at one frame. x is longitudinal along the
/// direction of travel, y lateral and increasing toward higher lane indices
/// (lane 0 is leftmost). Positions are footprint centers.
struct VehicleState
{
  int vehicle_id = 0;
  int frame = 0;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  int lane = 0;
  double length = 4.5;
  double width = 1.8;
  VehicleClass klass = VehicleClass::Car;
  bool autonomous = false;

  bool operator==(const VehicleState &) const = default;
};

/// Straight road segment discretized into lane bands and fixed-length slots.
/// A hard shoulder, when present, is one extra band with index lane_count.
struct RoadGeometry
{
  int lane_count = 3;
  double lane_width = 3.5;
  double box_length = 5.0;
  double segment_start = 0.0;
  double segment_end = 100.0;
  bool has_shoulder = false;

  /// Throws BadParams if an invariant does not hold.
  void validate() const;

  int band_count() const { return lane_count + (has_shoulder ? 1 : 0); }
  int slot_count() const;
  double length() const { return segment_end - segment_start; }

  double lane_lo(int lane) const { return lane * lane_width; }
  double lane_hi(int lane) const { return (lane + 1) * lane_width; }
  double lane_center(int lane) const { return (lane + 0.5) * lane_width; }
  double slot_lo(int slot) const { return segment_start + slot * box_length; }
  double slot_hi(int slot) const { return segment_start + (slot + 1) * box_length; }
  double slot_center(int slot) const { return segment_start + (slot + 0.5) * box_length; }

  /// Band containing y, clamped to [0, band_count()).
  int lane_of(double y) const;
  /// Slot containing x, clamped to [0, slot_count()).
  int slot_of(double x) const;

  /// Extends segment_end so the length is a whole number of boxes.
  RoadGeometry padded() const;

  bool operator==(const RoadGeometry &) const = default;
};

struct Position
{
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position &) const = default;
};

struct BoxId
{
  int lane = 0;
  int slot = 0;

  auto operator<=>(const BoxId &) const = default;
};

struct Frame
{
  int index = 0;
  std::vector<VehicleState> states;  // ascending vehicle_id

  bool operator==(const Frame &) const = default;
};

/// Frame-by-frame vehicle trajectories over one road segment. Immutable once
/// built; every vehicle's states cover a gap-free run of frames.
class Trace
{
public:
  Trace() = default;

  /// Validates and indexes a set of states. Throws NonMonotoneFrames on a
  /// duplicated (vehicle, frame), NonContiguousVehicle on a gap and
  /// InvalidRow when a state violates the VehicleState invariants.
  static Trace build(std::vector<VehicleState> states, const RoadGeometry & geometry,
                     double fps = kDefaultFps);

  const std::vector<Frame> & frames() const { return frames_; }
  const RoadGeometry & geometry() const { return geometry_; }
  double fps() const { return fps_; }
  double extent() const { return geometry_.length(); }
  std::size_t state_count() const { return state_count_; }
  bool empty() const { return frames_.empty(); }

  int first_frame() const;
  int last_frame() const;

  const Frame * find_frame(int frame) const;
  const VehicleState * find(int vehicle_id, int frame) const;
  /// Throws UnknownVehicle or FrameOutOfRange.
  const VehicleState & at(int vehicle_id, int frame) const;

  bool has_vehicle(int vehicle_id) const { return tracks_.count(vehicle_id) != 0; }
  /// All states of a vehicle, ascending frame. Empty span if unknown.
  std::span<const VehicleState> track(int vehicle_id) const;
  std::vector<int> vehicle_ids() const;

  /// Sub-trace restricted to frames in [first, last].
  Trace window(int first, int last) const;
  /// Sub-trace restricted to the given vehicles.
  Trace select(std::span<const int> vehicle_ids) const;

  bool operator==(const Trace & other) const;

private:
  std::vector<Frame> frames_;
  std::map<int, std::vector<VehicleState>> tracks_;
  RoadGeometry geometry_;
  double fps_ = kDefaultFps;
  std::size_t state_count_ = 0;
};

struct TrainTestSplit
{
  std::vector<int> train;  // ascending
  std::vector<int> test;   // ascending
};

/// Partitions vehicles (not rows) into train/test. The ids are sorted,
/// Fisher-Yates shuffled with Rng(seed) drawing index(i + 1) for
/// i = V-1 down to 1, and the first round(ratio * V) become the train set.
TrainTestSplit split_train_test(const Trace & trace, double ratio, std::uint64_t seed);

enum class NeighborSlot : int { FrontSame, RearSame, FrontLeft, RearLeft, FrontRight, RearRight };

inline constexpr std::size_t kNeighborSlots = 6;

struct Neighbors
{
  std::array<std::optional<VehicleState>, kNeighborSlots> slots;

  const std::optional<VehicleState> & operator[](NeighborSlot s) const
  {
    return slots[static_cast<std::size_t>(s)];
  }
};

/// Nearest vehicle ahead/behind in the ego, left (lane - 1) and right
/// (lane + 1) lanes. Vehicles are ordered by (x, vehicle_id) so that the
/// relation is exactly anti-symmetric even when positions tie.
Neighbors neighbors(const Trace & trace, int vehicle_id, int frame);
Neighbors neighbors(std::span<const VehicleState> frame_states, const VehicleState & ego);

}  // namespace edgetwin

#endif  // EDGETWIN__TRACE_MODEL_HPP_
