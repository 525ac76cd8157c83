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

#include "edgetwin/features.hpp"

#include <string>

#include "edgetwin/error.hpp"

namespace edgetwin
{

void encode_features(std::span<const VehicleState> ego_history, const Neighbors & around,
                     std::span<double> out)
{
  const auto history = ego_history.size();
  if (out.size() != feature_count(static_cast<int>(history))) {
    throw Error(ErrorCode::DimensionMismatch, "feature buffer has the wrong length");
  }
  const auto & now = ego_history.front();
  std::size_t k = 0;
  for (const auto & s : ego_history) {
    out[k++] = s.x - now.x;
    out[k++] = s.y - now.y;
    out[k++] = s.vx;
    out[k++] = s.vy;
    out[k++] = s.ax;
    out[k++] = s.ay;
    out[k++] = static_cast<double>(s.lane);
  }
  for (const auto & slot : around.slots) {
    if (slot) {
      out[k++] = slot->x - now.x;
      out[k++] = slot->y - now.y;
      out[k++] = slot->vx;
      out[k++] = slot->vy;
      out[k++] = 1.0;
    } else {
      for (std::size_t j = 0; j < kNeighborFeatures; ++j) {
        out[k++] = 0.0;
      }
    }
  }
}

namespace
{

void extract_into(const Trace & trace, std::span<const VehicleState> track, std::size_t offset,
                  int history, std::vector<VehicleState> & scratch, std::span<double> out)
{
  scratch.clear();
  for (int k = 0; k < history; ++k) {
    scratch.push_back(track[offset - static_cast<std::size_t>(k)]);
  }
  const auto & now = track[offset];
  const auto around = neighbors(trace.find_frame(now.frame)->states, now);
  encode_features(scratch, around, out);
}

}  // namespace

std::vector<double> extract_features(const Trace & trace, int vehicle_id, int frame, int history)
{
  if (history < 1) {
    throw Error(ErrorCode::BadParams, "history must be >= 1");
  }
  const auto track = trace.track(vehicle_id);
  if (track.empty()) {
    throw Error(ErrorCode::UnknownVehicle, std::to_string(vehicle_id));
  }
  const long offset = static_cast<long>(frame) - track.front().frame;
  if (offset < 0 || offset >= static_cast<long>(track.size())) {
    throw Error(
      ErrorCode::FrameOutOfRange,
      "vehicle " + std::to_string(vehicle_id) + " absent at frame " + std::to_string(frame));
  }
  if (offset + 1 < history) {
    throw Error(
      ErrorCode::InsufficientHistory, "vehicle " + std::to_string(vehicle_id) + " has " +
                                        std::to_string(offset + 1) + " of " +
                                        std::to_string(history) + " frames");
  }
  std::vector<double> out(feature_count(history));
  std::vector<VehicleState> scratch;
  extract_into(trace, track, static_cast<std::size_t>(offset), history, scratch, out);
  return out;
}

Dataset make_dataset(const Trace & trace, std::span<const int> vehicle_ids, int horizon,
                     int history, int stride)
{
  if (horizon < 1 || history < 1 || stride < 1) {
    throw Error(ErrorCode::BadParams, "horizon, history and stride must be >= 1");
  }
  Dataset data;
  data.history = history;
  data.horizon = horizon;
  data.n_features = feature_count(history);
  std::vector<VehicleState> scratch;
  for (const int id : vehicle_ids) {
    const auto track = trace.track(id);
    const auto n = static_cast<long>(track.size());
    for (long i = history - 1; i + horizon < n; ++i) {
      const auto & now = track[static_cast<std::size_t>(i)];
      if (now.frame % stride != 0) {
        continue;
      }
      const auto & future = track[static_cast<std::size_t>(i + horizon)];
      const auto at = data.features.size();
      data.features.resize(at + data.n_features);
      extract_into(
        trace, track, static_cast<std::size_t>(i), history, scratch,
        std::span<double>(data.features.data() + at, data.n_features));
      data.targets.push_back({future.x - now.x, future.y - now.y});
      data.points.emplace_back(id, now.frame);
    }
  }
  if (data.targets.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no (vehicle, frame) has enough history and future");
  }
  return data;
}

}  // namespace edgetwin
