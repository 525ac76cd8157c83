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

#ifndef EDGETWIN__FEATURES_HPP_
#define EDGETWIN__FEATURES_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

inline constexpr int kDefaultHistory = 10;
inline constexpr std::size_t kEgoFeatures = 7;       // x, y, vx, vy, ax, ay, lane
inline constexpr std::size_t kNeighborFeatures = 5;  // rel x, rel y, vx, vy, present

inline constexpr std::size_t feature_count(int history)
{
  return kEgoFeatures * static_cast<std::size_t>(history) + kNeighborFeatures * kNeighborSlots;
}

/// Writes the feature vector for an ego whose states are given newest first
/// (ego_history[0] is the current frame). Ego positions are relative to the
/// current position; neighbor positions are relative to it as well.
void encode_features(std::span<const VehicleState> ego_history, const Neighbors & around,
                     std::span<double> out);

/// Feature vector at `frame` from the last `history` frames of the vehicle.
/// Throws UnknownVehicle, or InsufficientHistory when fewer frames exist.
std::vector<double> extract_features(const Trace & trace, int vehicle_id, int frame,
                                     int history = kDefaultHistory);

struct DisplacementTarget
{
  double dx = 0.0;
  double dy = 0.0;
};

/// Row-major feature matrix with one displacement target per row.
struct Dataset
{
  int history = kDefaultHistory;
  int horizon = 1;
  std::size_t n_features = 0;
  std::vector<double> features;
  std::vector<DisplacementTarget> targets;
  std::vector<std::pair<int, int>> points;  // (vehicle_id, frame) of each row

  std::size_t rows() const { return targets.size(); }
  std::span<const double> row(std::size_t i) const
  {
    return {features.data() + i * n_features, n_features};
  }
};

/// One row per (vehicle, frame) with `history` frames behind and `horizon`
/// frames ahead; only frames divisible by `stride` are kept. Throws
/// EmptyDataset when no row qualifies.
Dataset make_dataset(const Trace & trace, std::span<const int> vehicle_ids, int horizon,
                     int history = kDefaultHistory, int stride = 1);

}  // namespace edgetwin

#endif  // EDGETWIN__FEATURES_HPP_
