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

#ifndef EDGETWIN__EVALUATION_HPP_
#define EDGETWIN__EVALUATION_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgetwin/forecaster.hpp"
#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

/// Euclidean distance between a predicted and an actual position, meters.
double coordinate_distance(Position predicted, Position actual);

/// Fraction of errors <= threshold. Throws EmptyErrors / BadParams.
double threshold_accuracy(std::span<const double> errors, double threshold);

/// Box-plot statistics. Quartiles interpolate linearly between order
/// statistics at rank p * (n - 1).
struct ErrorSummary
{
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

ErrorSummary summarize(std::span<const double> errors);

struct HorizonReport
{
  int horizon = 0;
  ErrorSummary model;
  ErrorSummary naive;
  std::map<double, double> model_accuracy;  // threshold -> fraction
  std::map<double, double> naive_accuracy;
  std::size_t fallbacks = 0;  // points the forecaster could not serve
  std::vector<double> model_errors;
  std::vector<double> naive_errors;
};

struct EvalReport
{
  std::vector<HorizonReport> horizons;

  const HorizonReport & at(int horizon) const;
};

struct EvalOptions
{
  int history = 10;
  int stride = 1;
  std::vector<double> thresholds = {0.01, 0.05, 0.1, 0.5};
};

/// Scores `forecaster` and the persistence baseline on the same points:
/// every (test vehicle, frame) with `history` frames behind, `h` ahead and
/// frame % stride == 0. Throws MissingModel(h) when a horizon lacks a model.
EvalReport evaluate(const Forecaster & forecaster, const Trace & trace,
                    std::span<const int> test_ids, std::span<const int> horizons,
                    const EvalOptions & options = {});

/// Shortest round-trip text of a number, used for JSON object keys.
std::string number_key(double value);

nlohmann::json to_json(const ErrorSummary & summary);
/// Per-horizon summaries and accuracy tables; raw error lists are omitted.
nlohmann::json to_json(const EvalReport & report);

}  // namespace edgetwin

#endif  // EDGETWIN__EVALUATION_HPP_
