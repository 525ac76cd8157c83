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

#include "edgetwin/forecaster.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

#include "edgetwin/error.hpp"

namespace edgetwin
{

namespace
{

constexpr const char * kModelFormat = "edgetwin-forecaster";
constexpr int kModelVersion = 1;

}  // namespace

DisplacementTarget ForecasterEnsemble::predict_delta(std::span<const double> fv) const
{
  if (fv.size() != n_features) {
    throw Error(
      ErrorCode::DimensionMismatch, "feature vector has " + std::to_string(fv.size()) +
                                      " entries, model expects " + std::to_string(n_features));
  }
  return {dx.predict(fv), dy.predict(fv)};
}

Position ForecasterEnsemble::predict(std::span<const double> fv, Position anchor) const
{
  const auto d = predict_delta(fv);
  return {anchor.x + d.dx, anchor.y + d.dy};
}

TrainedEnsemble train(const Dataset & data, const BoostParams & params)
{
  if (data.rows() < 2) {
    throw Error(ErrorCode::EmptyDataset, "need at least 2 rows to train");
  }
  std::vector<double> tx(data.rows()), ty(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    tx[i] = data.targets[i].dx;
    ty[i] = data.targets[i].dy;
  }
  const MatrixView x{data.features, data.rows(), data.n_features};
  auto fx = fit_boosted(x, tx, params);
  auto fy = fit_boosted(x, ty, params);
  TrainedEnsemble out;
  out.model.horizon = data.horizon;
  out.model.history = data.history;
  out.model.n_features = data.n_features;
  out.model.params = params;
  out.model.dx = std::move(fx.model);
  out.model.dy = std::move(fy.model);
  out.loss_dx = std::move(fx.loss);
  out.loss_dy = std::move(fy.loss);
  return out;
}

namespace
{

nlohmann::json trees_to_json(const std::vector<RegressionTree> & trees)
{
  auto arr = nlohmann::json::array();
  for (const auto & t : trees) {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto & n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    arr.push_back({{"max_depth", t.max_depth},
                   {"feature", feature},
                   {"threshold", threshold},
                   {"left", left},
                   {"right", right},
                   {"value", value}});
  }
  return arr;
}

std::vector<RegressionTree> trees_from_json(const nlohmann::json & arr, std::size_t n_features)
{
  std::vector<RegressionTree> trees;
  for (const auto & jt : arr) {
    RegressionTree t;
    t.max_depth = jt.at("max_depth").get<int>();
    const auto feature = jt.at("feature").get<std::vector<int>>();
    const auto threshold = jt.at("threshold").get<std::vector<double>>();
    const auto left = jt.at("left").get<std::vector<int>>();
    const auto right = jt.at("right").get<std::vector<int>>();
    const auto value = jt.at("value").get<std::vector<double>>();
    const auto n = feature.size();
    if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
        value.size() != n) {
      throw Error(ErrorCode::BadModelFile, "tree arrays differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      TreeNode node{feature[i], threshold[i], left[i], right[i], value[i]};
      if (!node.is_leaf()) {
        const auto in_range = [n](int k) { return k > 0 && static_cast<std::size_t>(k) < n; };
        if (static_cast<std::size_t>(node.feature) >= n_features || !in_range(node.left) ||
            !in_range(node.right)) {
          throw Error(ErrorCode::BadModelFile, "tree node index out of range");
        }
      }
      t.nodes.push_back(node);
    }
    if (t.depth() > t.max_depth) {
      throw Error(ErrorCode::BadModelFile, "tree deeper than its max_depth");
    }
    trees.push_back(std::move(t));
  }
  return trees;
}

}  // namespace

nlohmann::json to_json(const ForecasterEnsemble & m)
{
  return {
    {"format", kModelFormat},
    {"version", kModelVersion},
    {"horizon", m.horizon},
    {"history", m.history},
    {"n_features", m.n_features},
    {"params",
     {{"n_trees", m.params.n_trees},
      {"learning_rate", m.params.learning_rate},
      {"max_depth", m.params.max_depth},
      {"min_samples_leaf", m.params.min_samples_leaf},
      {"colsample", m.params.colsample},
      {"seed", m.params.seed}}},
    {"learning_rate", m.dx.learning_rate},
    {"base_dx", m.dx.base},
    {"base_dy", m.dy.base},
    {"trees_dx", trees_to_json(m.dx.trees)},
    {"trees_dy", trees_to_json(m.dy.trees)},
  };
}

ForecasterEnsemble ensemble_from_json(const nlohmann::json & doc)
{
  try {
    if (doc.at("format").get<std::string>() != kModelFormat ||
        doc.at("version").get<int>() != kModelVersion) {
      throw Error(ErrorCode::BadModelFile, "unsupported model format or version");
    }
    ForecasterEnsemble m;
    m.horizon = doc.at("horizon").get<int>();
    m.history = doc.at("history").get<int>();
    m.n_features = doc.at("n_features").get<std::size_t>();
    if (m.horizon < 1 || m.history < 1 || m.n_features != feature_count(m.history)) {
      throw Error(ErrorCode::BadModelFile, "inconsistent horizon/history/n_features");
    }
    const auto & p = doc.at("params");
    m.params.n_trees = p.at("n_trees").get<int>();
    m.params.learning_rate = p.at("learning_rate").get<double>();
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    m.params.colsample = p.at("colsample").get<double>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.dx.learning_rate = m.dy.learning_rate = doc.at("learning_rate").get<double>();
    m.dx.base = doc.at("base_dx").get<double>();
    m.dy.base = doc.at("base_dy").get<double>();
    m.dx.trees = trees_from_json(doc.at("trees_dx"), m.n_features);
    m.dy.trees = trees_from_json(doc.at("trees_dy"), m.n_features);
    if (m.dx.trees.size() != m.dy.trees.size()) {
      throw Error(ErrorCode::BadModelFile, "dx and dy ensembles differ in size");
    }
    return m;
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::BadModelFile, e.what());
  }
}

void save_model(const std::filesystem::path & path, const ForecasterEnsemble & model)
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << to_json(model).dump() << '\n';
}

ForecasterEnsemble load_model(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::BadModelFile, path.string() + ": " + e.what());
  }
  return ensemble_from_json(doc);
}

Position naive_predict(const Trace & trace, int vehicle_id, int frame, int /*horizon*/)
{
  const auto & s = trace.at(vehicle_id, frame);
  return {s.x, s.y};
}

BoostedForecaster::BoostedForecaster(std::vector<ForecasterEnsemble> models)
{
  bool first = true;
  for (auto & m : models) {
    if (first) {
      history_ = m.history;
      first = false;
    } else if (m.history != history_) {
      throw Error(ErrorCode::BadParams, "all horizon models must share one history length");
    }
    const int h = m.horizon;
    models_.insert_or_assign(h, std::move(m));
  }
}

std::vector<int> BoostedForecaster::horizons() const
{
  std::vector<int> out;
  for (const auto & [h, m] : models_) {
    out.push_back(h);
  }
  return out;
}

bool BoostedForecaster::covers(int horizon) const
{
  if (horizon <= 0) {
    return true;
  }
  int remaining = horizon;
  while (remaining > 0) {
    auto it = models_.upper_bound(remaining);
    if (it == models_.begin()) {
      return false;
    }
    remaining -= std::prev(it)->first;
  }
  return true;
}

const ForecasterEnsemble & BoostedForecaster::model(int horizon) const
{
  auto it = models_.find(horizon);
  if (it == models_.end()) {
    throw Error(ErrorCode::MissingModel, "horizon " + std::to_string(horizon));
  }
  return it->second;
}

std::optional<Position> BoostedForecaster::forecast(const Trace & history, int vehicle_id,
                                                    int frame, int horizon) const
{
  const auto * now = history.find(vehicle_id, frame);
  if (now == nullptr) {
    return std::nullopt;
  }
  if (horizon <= 0) {
    return Position{now->x, now->y};
  }
  if (models_.empty() || models_.begin()->first > horizon) {
    return std::nullopt;
  }
  std::vector<double> fv;
  try {
    fv = extract_features(history, vehicle_id, frame, history_);
  } catch (const Error & e) {
    if (e.code() == ErrorCode::InsufficientHistory) {
      return std::nullopt;
    }
    throw;
  }
  Position out{now->x, now->y};
  int remaining = horizon;
  while (remaining > 0) {
    auto it = models_.upper_bound(remaining);
    --it;  // largest horizon <= remaining; exists because the smallest is <= horizon
    if (it->first > remaining) {
      return std::nullopt;
    }
    const auto d = it->second.predict_delta(fv);
    out.x += d.dx;
    out.y += d.dy;
    remaining -= it->first;
    if (remaining > 0 && models_.begin()->first > remaining) {
      return std::nullopt;
    }
  }
  return out;
}

std::optional<Position> GroundTruthForecaster::forecast(const Trace & /*history*/,
                                                        int vehicle_id, int frame,
                                                        int horizon) const
{
  const auto * s = truth_.find(vehicle_id, frame + horizon);
  if (s == nullptr) {
    return std::nullopt;
  }
  return Position{s->x, s->y};
}

std::optional<Position> NaiveForecaster::forecast(const Trace & history, int vehicle_id,
                                                  int frame, int /*horizon*/) const
{
  const auto * s = history.find(vehicle_id, frame);
  if (s == nullptr) {
    return std::nullopt;
  }
  return Position{s->x, s->y};
}

Position recursive_rollout(const ForecasterEnsemble & step_model, const Trace & trace,
                           int vehicle_id, int frame, int steps)
{
  const auto track = trace.track(vehicle_id);
  if (track.empty()) {
    throw Error(ErrorCode::UnknownVehicle, std::to_string(vehicle_id));
  }
  const long offset = static_cast<long>(frame) - track.front().frame;
  if (offset < 0 || offset >= static_cast<long>(track.size())) {
    throw Error(ErrorCode::FrameOutOfRange, "vehicle " + std::to_string(vehicle_id));
  }
  if (offset + 1 < step_model.history) {
    throw Error(ErrorCode::InsufficientHistory, "vehicle " + std::to_string(vehicle_id));
  }
  std::vector<VehicleState> hist;
  for (int k = 0; k < step_model.history; ++k) {
    hist.push_back(track[static_cast<std::size_t>(offset - k)]);
  }
  auto around = neighbors(trace.find_frame(frame)->states, hist.front());
  const double fps = trace.fps();
  const double dt = static_cast<double>(step_model.horizon) / fps;
  std::vector<double> fv(step_model.n_features);
  for (int step = 0; step < steps; ++step) {
    encode_features(hist, around, fv);
    const auto d = step_model.predict_delta(fv);
    VehicleState next = hist.front();
    next.frame += step_model.horizon;
    next.x += d.dx;
    next.y += d.dy;
    const double vx = d.dx / dt;
    const double vy = d.dy / dt;
    next.ax = (vx - next.vx) / dt;
    next.ay = (vy - next.vy) / dt;
    next.vx = vx;
    next.vy = vy;
    next.lane = trace.geometry().lane_of(next.y);
    hist.insert(hist.begin(), next);
    hist.pop_back();
    for (auto & slot : around.slots) {
      if (slot) {
        slot->x += slot->vx * dt;
        slot->y += slot->vy * dt;
      }
    }
  }
  return {hist.front().x, hist.front().y};
}

}  // namespace edgetwin
