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


#include "edgetwin/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "edgetwin/error.hpp"
#include "edgetwin/evaluation.hpp"

namespace edgetwin
{

void StageConfig::validate() const
{
  for (const int d : {capture, transfer, recognize, shift, deliver}) {
    if (d < 0) {
      throw Error(ErrorCode::BadParams, "stage delays must be >= 0");
    }
  }
}

int ms_to_steps(double milliseconds, double fps)
{
  if (!(milliseconds >= 0.0) || !(fps > 0.0)) {
    throw Error(ErrorCode::BadParams, "milliseconds must be >= 0 and fps > 0");
  }
  return static_cast<int>(std::ceil(milliseconds * fps / 1000.0 - 1e-9));
}

WorldSnapshot capture(const Trace & trace, int frame)
{
  const auto * f = trace.find_frame(frame);
  if (f == nullptr) {
    throw Error(ErrorCode::FrameOutOfRange, "frame " + std::to_string(frame) + " not in trace");
  }
  return {frame, f->states, std::nullopt};
}

namespace
{

template <class Predict>
WorldSnapshot shift_with(const WorldSnapshot & snapshot, int target_frame,
                         const RoadGeometry & geometry, Predict && predict,
                         std::vector<int> * fallbacks)
{
  if (target_frame < snapshot.capture_frame) {
    throw Error(ErrorCode::BadParams, "cannot shift a snapshot into the past");
  }
  WorldSnapshot out;
  out.capture_frame = snapshot.capture_frame;
  out.shifted_to = target_frame;
  out.states.reserve(snapshot.states.size());
  const int h = target_frame - snapshot.capture_frame;
  for (auto s : snapshot.states) {
    if (h > 0) {
      const auto p = predict(s.vehicle_id, h);
      if (p) {
        s.x = p->x;
        s.y = p->y;
        s.lane = geometry.lane_of(s.y);
      } else if (fallbacks) {
        fallbacks->push_back(s.vehicle_id);
      }
    }
    s.frame = target_frame;
    out.states.push_back(s);
  }
  return out;
}

}  // namespace

WorldSnapshot time_shift(const WorldSnapshot & snapshot, const Forecaster & forecaster,
                         int target_frame, const Trace & history, std::vector<int> * fallbacks)
{
  return shift_with(
    snapshot, target_frame, history.geometry(),
    [&](int id, int h) { return forecaster.forecast(history, id, snapshot.capture_frame, h); },
    fallbacks);
}

PipelineResult run_pipeline(const Trace & trace, const Forecaster & forecaster,
                            std::span<const int> av_ids, const PipelineOptions & options)
{
  options.stages.validate();
  if (options.plan_stride < 1) {
    throw Error(ErrorCode::BadParams, "plan_stride must be >= 1");
  }
  const int delay = options.stages.total_delay();
  const int horizon = options.hazard.horizon;
  const auto hazard_hs = hazard_horizons(forecaster, options.hazard);
  for (const int h : hazard_hs) {
    if (!forecaster.covers(delay + h)) {
      throw Error(ErrorCode::MissingHorizonModel, "horizon " + std::to_string(delay + h));
    }
  }
  if (delay > 0 && !forecaster.covers(delay)) {
    throw Error(ErrorCode::MissingHorizonModel, "horizon " + std::to_string(delay));
  }
  const int history = std::max(options.history, forecaster.history());
  const long span_frames = trace.empty() ? 0 : trace.last_frame() - trace.first_frame() + 1;
  if (span_frames < static_cast<long>(delay) + history + horizon) {
    throw Error(
      ErrorCode::TraceTooShort, std::to_string(span_frames) + " frames, need " +
                                  std::to_string(delay + history + horizon));
  }

  const auto & geometry = trace.geometry();
  const double fps = trace.fps();
  HazardOptions hazard = options.hazard;
  if (options.inflow_guard) {
    hazard.inflow_guard = std::max(
      hazard.inflow_guard, kMaxSpeed * (delay + horizon) / fps + options.max_vehicle_length);
  }
  const std::set<int> avs(av_ids.begin(), av_ids.end());

  PipelineResult result;
  auto & m = result.metrics;
  m.total_delay = delay;
  for (const double t : options.thresholds) {
    m.hit_rate[t] = 0.0;
  }
  double stale_sum = 0.0;
  double shifted_sum = 0.0;
  Allocation current;

  const int first = trace.first_frame() + delay + std::max(history - 1, 0);
  const int last = trace.last_frame() - horizon;
  for (int t = first; t <= last; ++t) {
    const int c = t - delay;
    const auto * captured = trace.find_frame(c);
    const auto * truth = trace.find_frame(t);
    if (captured == nullptr || truth == nullptr) {
      continue;  // no traffic recorded at this frame
    }
    FrameRecord rec;
    rec.frame = t;
    rec.capture_frame = c;

    std::map<std::pair<int, int>, std::optional<Position>> memo;
    auto predict = [&](int id, int h) {
      const auto key = std::make_pair(id, h);
      auto it = memo.find(key);
      if (it == memo.end()) {
        it = memo.emplace(key, forecaster.forecast(trace, id, c, h)).first;
      }
      return it->second;
    };

    const WorldSnapshot snapshot{c, captured->states, std::nullopt};
    std::vector<int> fell_back;
    const auto shifted = shift_with(snapshot, t, geometry, predict, &fell_back);
    if (shifted.capture_frame != t - delay) {
      throw Error(ErrorCode::InvariantViolation, "snapshot captured at the wrong frame");
    }
    rec.fallbacks = fell_back.size();

    std::vector<double> errors;
    for (std::size_t i = 0; i < snapshot.states.size(); ++i) {
      const auto & old = snapshot.states[i];
      const auto * actual = trace.find(old.vehicle_id, t);
      if (actual == nullptr) {
        continue;
      }
      const Position now{actual->x, actual->y};
      const double stale = coordinate_distance({old.x, old.y}, now);
      const double shifted_err =
        coordinate_distance({shifted.states[i].x, shifted.states[i].y}, now);
      rec.staleness_error += stale;
      rec.shifted_error += shifted_err;
      m.max_staleness_error = std::max(m.max_staleness_error, stale);
      m.max_shifted_error = std::max(m.max_shifted_error, shifted_err);
      errors.push_back(shifted_err);
    }
    rec.vehicles = errors.size();
    if (!errors.empty()) {
      stale_sum += rec.staleness_error;
      shifted_sum += rec.shifted_error;
      rec.staleness_error /= static_cast<double>(errors.size());
      rec.shifted_error /= static_cast<double>(errors.size());
      for (const double th : options.thresholds) {
        const double rate = threshold_accuracy(errors, th);
        rec.hit_rate[th] = rate;
        m.hit_rate[th] += rate * static_cast<double>(errors.size());
      }
    }
    m.scored += errors.size();
    m.fallbacks += rec.fallbacks;

    // Allocation for the AVs visible in the shifted snapshot.
    std::vector<int> requests;
    std::map<int, HazardMap> maps;
    for (const auto & s : shifted.states) {
      if (!avs.count(s.vehicle_id)) {
        continue;
      }
      requests.push_back(s.vehicle_id);
      maps.emplace(
        s.vehicle_id,
        build_hazard_map(
          shifted.states, t, s.vehicle_id, geometry, hazard_hs, hazard,
          [&](const VehicleState & v, int h) { return predict(v.vehicle_id, delay + h); }));
    }
    if (options.record_maps) {
      for (const auto & [id, map] : maps) {
        rec.maps.push_back(to_json(map));
      }
    }
    if (!requests.empty()) {
      const auto alloc = allocate(t, requests, maps, current, fps);
      std::set<BoxId> seen;
      std::set<BoxId> human_boxes;
      if (const auto * later = trace.find_frame(t + horizon)) {
        for (const auto & s : later->states) {
          if (!avs.count(s.vehicle_id)) {
            const auto boxes = footprint_boxes({s.x, s.y}, s.length, s.width, geometry);
            human_boxes.insert(boxes.begin(), boxes.end());
          }
        }
      }
      for (const auto & [id, box] : alloc.assignments) {
        if (!seen.insert(box).second) {
          ++m.duplicate_grants;
        }
        if (human_boxes.count(box)) {
          ++m.unsafe_grants;
        }
        const auto plan = try_plan_maneuver(maps.at(id).ego(), box, geometry, horizon, fps);
        if (!plan) {
          throw Error(
            ErrorCode::InvariantViolation, "granted box has no plan for vehicle " +
                                             std::to_string(id));
        }
        Directive d{id, false, box, {}};
        const auto & w = plan->waypoints;
        for (std::size_t k = 0; k < w.size(); ++k) {
          if (k % static_cast<std::size_t>(options.plan_stride) == 0 || k + 1 == w.size()) {
            d.plan.push_back(w[k]);
          }
        }
        rec.directives.push_back(std::move(d));
      }
      for (const auto & [id, box] : alloc.holds) {
        rec.directives.push_back({id, true, box, {}});
      }
      std::sort(rec.directives.begin(), rec.directives.end(), [](const auto & a, const auto & b) {
        return a.vehicle_id < b.vehicle_id;
      });
      m.grants += alloc.assignments.size();
      m.holds += alloc.holds.size();
      current = alloc;
    }
    result.records.push_back(std::move(rec));
  }
  m.frames = result.records.size();
  if (m.scored > 0) {
    const auto n = static_cast<double>(m.scored);
    m.mean_staleness_error = stale_sum / n;
    m.mean_shifted_error = shifted_sum / n;
    for (auto & [th, rate] : m.hit_rate) {
      rate /= n;
    }
  }
  return result;
}

SpeculativeTable speculative_eval(const Trace & trace, const Forecaster & forecaster,
                                  std::span<const int> test_ids, std::span<const int> windows,
                                  std::span<const double> thresholds, int history, int stride)
{
  for (const int w : windows) {
    if (!forecaster.supports(w)) {
      throw Error(ErrorCode::MissingHorizonModel, "window " + std::to_string(w));
    }
  }
  EvalOptions opt;
  opt.history = history;
  opt.stride = stride;
  opt.thresholds.assign(thresholds.begin(), thresholds.end());
  const auto report = evaluate(forecaster, trace, test_ids, windows, opt);
  SpeculativeTable table;
  table.windows.assign(windows.begin(), windows.end());
  table.thresholds = opt.thresholds;
  for (const auto & h : report.horizons) {
    std::vector<double> row;
    for (const double th : table.thresholds) {
      row.push_back(h.model_errors.empty() ? 0.0 : threshold_accuracy(h.model_errors, th));
    }
    table.accuracy.push_back(std::move(row));
    table.points.push_back(h.model_errors.size());
  }
  return table;
}

namespace
{

double round_mm(double v) { return std::round(v * 1000.0) / 1000.0; }

nlohmann::json rate_json(const std::map<double, double> & rates)
{
  nlohmann::json out = nlohmann::json::object();
  for (const auto & [t, r] : rates) {
    out[number_key(t)] = r;
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const PipelineMetrics & m)
{
  return {
    {"total_delay", m.total_delay},
    {"frames", m.frames},
    {"scored", m.scored},
    {"mean_staleness_error", m.mean_staleness_error},
    {"mean_shifted_error", m.mean_shifted_error},
    {"max_staleness_error", m.max_staleness_error},
    {"max_shifted_error", m.max_shifted_error},
    {"hit_rate", rate_json(m.hit_rate)},
    {"fallbacks", m.fallbacks},
    {"grants", m.grants},
    {"holds", m.holds},
    {"duplicate_grants", m.duplicate_grants},
    {"unsafe_grants", m.unsafe_grants}};
}

nlohmann::json to_json(const FrameRecord & r)
{
  nlohmann::json directives = nlohmann::json::array();
  for (const auto & d : r.directives) {
    nlohmann::json plan = nlohmann::json::array();
    for (const auto & w : d.plan) {
      plan.push_back({w.frame, round_mm(w.x), round_mm(w.y)});
    }
    directives.push_back(
      {{"ego", d.vehicle_id},
       {"action", d.hold ? "hold" : "grant"},
       {"box", {d.box.lane, d.box.slot}},
       {"plan", plan}});
  }
  return {
    {"frame", r.frame},
    {"capture_frame", r.capture_frame},
    {"vehicles", r.vehicles},
    {"fallbacks", r.fallbacks},
    {"staleness_error", r.staleness_error},
    {"shifted_error", r.shifted_error},
    {"hit_rate", rate_json(r.hit_rate)},
    {"directives", directives}};
}

nlohmann::json to_json(const SpeculativeTable & table)
{
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < table.windows.size(); ++i) {
    nlohmann::json acc = nlohmann::json::object();
    for (std::size_t j = 0; j < table.thresholds.size(); ++j) {
      acc[number_key(table.thresholds[j])] = table.accuracy[i][j];
    }
    rows.push_back({{"window", table.windows[i]}, {"points", table.points[i]}, {"accuracy", acc}});
  }
  return rows;
}

}  // namespace edgetwin
