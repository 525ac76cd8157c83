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

#ifndef EDGETWIN__FORECASTER_HPP_
#define EDGETWIN__FORECASTER_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgetwin/features.hpp"
#include "edgetwin/gbrt.hpp"
#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

/// Boosted displacement model for one prediction horizon. dx and dy are fit
/// as two independent ensembles on the same features.
struct ForecasterEnsemble
{
  int horizon = 1;
  int history = kDefaultHistory;
  std::size_t n_features = feature_count(kDefaultHistory);
  BoostParams params;
  BoostedRegressor dx;
  BoostedRegressor dy;

  /// Throws DimensionMismatch when fv has the wrong length.
  DisplacementTarget predict_delta(std::span<const double> fv) const;
  Position predict(std::span<const double> fv, Position anchor) const;

  bool operator==(const ForecasterEnsemble &) const = default;
};

struct TrainedEnsemble
{
  ForecasterEnsemble model;
  std::vector<double> loss_dx;  // per-tree training MSE, see BoostFit::loss
  std::vector<double> loss_dy;
};

TrainedEnsemble train(const Dataset & data, const BoostParams & params);

nlohmann::json to_json(const ForecasterEnsemble & model);
/// Throws BadModelFile on a malformed or wrong-version document.
ForecasterEnsemble ensemble_from_json(const nlohmann::json & doc);
void save_model(const std::filesystem::path & path, const ForecasterEnsemble & model);
ForecasterEnsemble load_model(const std::filesystem::path & path);

/// Persistence forecast: the position at `frame`, whatever the horizon.
/// Throws UnknownVehicle / FrameOutOfRange.
Position naive_predict(const Trace & trace, int vehicle_id, int frame, int horizon);

/// Source of future positions used by evaluation, hazard maps and the
/// time-shifting pipeline.
class Forecaster
{
public:
  virtual ~Forecaster() = default;

  /// Predicted center `horizon` frames after `frame`, from states in
  /// `history` up to and including `frame`. nullopt when this vehicle
  /// cannot be served; callers then fall back to persistence.
  virtual std::optional<Position> forecast(const Trace & history, int vehicle_id, int frame,
                                           int horizon) const = 0;

  /// True when `horizon` is served by a dedicated model.
  virtual bool supports(int horizon) const = 0;

  /// Horizons with a dedicated model; empty means every horizon.
  virtual std::vector<int> horizons() const = 0;

  /// True when `horizon` can be served, directly or by composition.
  virtual bool covers(int horizon) const { return supports(horizon); }

  /// Frames of history a forecast needs (0 for none).
  virtual int history() const { return 0; }
};

/// One boosted ensemble per horizon. A horizon without its own model is
/// composed by chaining displacements of the largest available horizons,
/// all predicted from the same features (e.g. 30 = 25 + 5).
class BoostedForecaster : public Forecaster
{
public:
  BoostedForecaster() = default;
  explicit BoostedForecaster(std::vector<ForecasterEnsemble> models);

  std::optional<Position> forecast(const Trace & history, int vehicle_id, int frame,
                                   int horizon) const override;
  bool supports(int horizon) const override { return models_.count(horizon) != 0; }
  std::vector<int> horizons() const override;
  bool covers(int horizon) const override;
  int history() const override { return history_; }

  const ForecasterEnsemble & model(int horizon) const;

private:
  std::map<int, ForecasterEnsemble> models_;
  int history_ = kDefaultHistory;
};

/// Reads the future from the recorded trace: the upper bound any forecaster
/// can reach, used as a test oracle.
class GroundTruthForecaster : public Forecaster
{
public:
  explicit GroundTruthForecaster(const Trace & truth) : truth_(truth) {}

  std::optional<Position> forecast(const Trace & history, int vehicle_id, int frame,
                                   int horizon) const override;
  bool supports(int) const override { return true; }
  std::vector<int> horizons() const override { return {}; }

private:
  const Trace & truth_;
};

class NaiveForecaster : public Forecaster
{
public:
  std::optional<Position> forecast(const Trace & history, int vehicle_id, int frame,
                                   int horizon) const override;
  bool supports(int) const override { return true; }
  std::vector<int> horizons() const override { return {}; }
};

/// Applies a one-step model `steps` times, feeding each prediction back as
/// the newest history frame (velocity and acceleration by finite
/// differences). Neighbors are advanced at constant velocity.
Position recursive_rollout(const ForecasterEnsemble & step_model, const Trace & trace,
                           int vehicle_id, int frame, int steps);

}  // namespace edgetwin

#endif  // EDGETWIN__FORECASTER_HPP_
