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

#include "edgetwin/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "edgetwin/error.hpp"

namespace edgetwin
{

double coordinate_distance(Position predicted, Position actual)
{
  return std::hypot(predicted.x - actual.x, predicted.y - actual.y);
}

double threshold_accuracy(std::span<const double> errors, double threshold)
{
  if (errors.empty()) {
    throw Error(ErrorCode::EmptyErrors, "no errors to score");
  }
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::BadParams, "threshold must be positive");
  }
  const auto hits = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

ErrorSummary summarize(std::span<const double> errors)
{
  ErrorSummary s;
  s.count = errors.size();
  if (errors.empty()) {
    return s;
  }
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double rank = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  s.min = sorted.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = sorted.back();
  return s;
}

const HorizonReport & EvalReport::at(int horizon) const
{
  for (const auto & h : horizons) {
    if (h.horizon == horizon) {
      return h;
    }
  }
  throw Error(ErrorCode::MissingModel, "no report for horizon " + std::to_string(horizon));
}

EvalReport evaluate(const Forecaster & forecaster, const Trace & trace,
                    std::span<const int> test_ids, std::span<const int> horizons,
                    const EvalOptions & options)
{
  if (options.history < 1 || options.stride < 1) {
    throw Error(ErrorCode::BadParams, "history and stride must be >= 1");
  }
  for (const int h : horizons) {
    if (!forecaster.supports(h)) {
      throw Error(ErrorCode::MissingModel, "horizon " + std::to_string(h));
    }
  }
  EvalReport report;
  for (const int h : horizons) {
    HorizonReport hr;
    hr.horizon = h;
    for (const int id : test_ids) {
      const auto track = trace.track(id);
      const auto n = static_cast<long>(track.size());
      for (long i = options.history - 1; i + h < n; ++i) {
        const auto & now = track[static_cast<std::size_t>(i)];
        if (now.frame % options.stride != 0) {
          continue;
        }
        const auto & future = track[static_cast<std::size_t>(i + h)];
        const Position actual{future.x, future.y};
        const Position persisted{now.x, now.y};
        auto predicted = forecaster.forecast(trace, id, now.frame, h);
        if (!predicted) {
          ++hr.fallbacks;
          predicted = persisted;
        }
        hr.model_errors.push_back(coordinate_distance(*predicted, actual));
        hr.naive_errors.push_back(coordinate_distance(persisted, actual));
      }
    }
    hr.model = summarize(hr.model_errors);
    hr.naive = summarize(hr.naive_errors);
    if (!hr.model_errors.empty()) {
      for (const double t : options.thresholds) {
        hr.model_accuracy[t] = threshold_accuracy(hr.model_errors, t);
        hr.naive_accuracy[t] = threshold_accuracy(hr.naive_errors, t);
      }
    }
    report.horizons.push_back(std::move(hr));
  }
  return report;
}

std::string number_key(double value)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

nlohmann::json to_json(const ErrorSummary & s)
{
  return {
    {"count", s.count}, {"mean", s.mean}, {"min", s.min},       {"q1", s.q1},
    {"median", s.median}, {"q3", s.q3},   {"max", s.max}};
}

nlohmann::json to_json(const EvalReport & report)
{
  nlohmann::json out = nlohmann::json::array();
  for (const auto & h : report.horizons) {
    nlohmann::json model_acc = nlohmann::json::object();
    nlohmann::json naive_acc = nlohmann::json::object();
    for (const auto & [t, a] : h.model_accuracy) {
      model_acc[number_key(t)] = a;
    }
    for (const auto & [t, a] : h.naive_accuracy) {
      naive_acc[number_key(t)] = a;
    }
    out.push_back(
      {{"horizon", h.horizon},
       {"model", to_json(h.model)},
       {"naive", to_json(h.naive)},
       {"model_accuracy", model_acc},
       {"naive_accuracy", naive_acc},
       {"fallbacks", h.fallbacks}});
  }
  return out;
}

}  // namespace edgetwin
