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


#include "edgetwin/harness.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "edgetwin/allocator.hpp"
#include "edgetwin/evaluation.hpp"
#include "edgetwin/fog_topology.hpp"
#include "edgetwin/pipeline.hpp"
#include "edgetwin/rng.hpp"
#include "edgetwin/synth.hpp"
#include "edgetwin/trace_io.hpp"

namespace edgetwin
{

using nlohmann::json;

json default_config()
{
  return json::parse(R"({
    "seed": 1,
    "output": "out",
    "data": {
      "source": "synthetic",
      "path": "",
      "fps": 25.0,
      "lane_width": 3.5,
      "box_length": 5.0,
      "has_shoulder": false,
      "bbox_corner": false,
      "flip_y": false,
      "y_offset": 0.0,
      "lane_from_y": true,
      "lane_base": 0
    },
    "synth": {
      "vehicles": 30,
      "steps": 10000,
      "lane_count": 3,
      "lane_change_rate": 0.02,
      "speed_min": 20.0,
      "speed_max": 35.0,
      "segment_length": 1000.0,
      "lane_width": 3.5,
      "box_length": 5.0,
      "has_shoulder": false,
      "fps": 25.0,
      "truck_fraction": 0.15,
      "autonomous": 5
    },
    "split": {"train_ratio": 0.8},
    "features": {"history": 10, "stride": 10},
    "horizons": [1, 5, 10, 25],
    "learner": {
      "n_trees": 200,
      "learning_rate": 0.1,
      "max_depth": 4,
      "min_samples_leaf": 5,
      "colsample": 1.0
    },
    "models": {"dir": ""},
    "eval": {
      "forecaster": "model",
      "stride": 5,
      "thresholds": [0.01, 0.05, 0.1, 0.5],
      "windows": [1, 5, 10],
      "recursive": true,
      "transfer": {"enabled": false, "synth": {}}
    },
    "pipeline": {
      "forecaster": "model",
      "stages": {"capture": 1, "transfer": 1, "recognize": 1, "shift": 1, "deliver": 1},
      "hazard_horizon": 25,
      "vicinity": 100.0,
      "inflow_guard": true,
      "max_vehicle_length": 20.0,
      "plan_stride": 5,
      "dump_maps": false
    },
    "topology": {
      "n_fogs": 8,
      "fog_span": 100.0,
      "box_length": 5.0,
      "exhaustive": true,
      "scenarios": [
        {"name": "one fog down", "fogs": [2], "cameras": []},
        {"name": "adjacent fogs down", "fogs": [2, 3], "cameras": []},
        {"name": "primary camera down", "fogs": [], "cameras": ["P3"]},
        {"name": "both secondaries down", "fogs": [], "cameras": ["S2", "S3"]}
      ]
    }
  })");
}

namespace
{

[[noreturn]] void config_error(const std::string & key, const std::string & what)
{
  throw Error(ErrorCode::ConfigError, "config key '" + key + "': " + what);
}

std::string join(const std::string & prefix, const std::string & key)
{
  return prefix.empty() ? key : prefix + "." + key;
}

bool same_type(const json & value, const json & reference)
{
  if (reference.is_number_integer()) {
    return value.is_number_integer();
  }
  if (reference.is_number()) {
    return value.is_number();
  }
  return value.type() == reference.type();
}

void check_scenarios(const json & value, const std::string & key)
{
  if (!value.is_array()) {
    config_error(key, "expected an array");
  }
  for (const auto & s : value) {
    if (!s.is_object()) {
      config_error(key, "each scenario is an object");
    }
    for (const auto & [k, v] : s.items()) {
      if (k == "name") {
        if (!v.is_string()) config_error(key + ".name", "expected a string");
      } else if (k == "fogs") {
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json & e) {
              return e.is_number_integer();
            })) {
          config_error(key + ".fogs", "expected an array of integers");
        }
      } else if (k == "cameras") {
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json & e) {
              return e.is_string();
            })) {
          config_error(key + ".cameras", "expected an array of camera names");
        }
      } else {
        config_error(key + "." + k, "unknown key");
      }
    }
  }
}

void check(const json & value, const json & reference, const std::string & key,
           const json & defaults)
{
  if (key == "topology.scenarios") {
    check_scenarios(value, key);
    return;
  }
  if (key == "eval.transfer.synth") {
    if (!value.is_object()) {
      config_error(key, "expected an object");
    }
    for (const auto & [k, v] : value.items()) {
      const auto & synth = defaults.at("synth");
      if (!synth.contains(k)) {
        config_error(join(key, k), "unknown key");
      }
      check(v, synth.at(k), join(key, k), defaults);
    }
    return;
  }
  if (reference.is_object()) {
    if (!value.is_object()) {
      config_error(key, "expected an object");
    }
    for (const auto & [k, v] : value.items()) {
      if (!reference.contains(k)) {
        config_error(join(key, k), "unknown key");
      }
      check(v, reference.at(k), join(key, k), defaults);
    }
    return;
  }
  if (!same_type(value, reference)) {
    config_error(key, "expected a value like " + reference.dump() + ", got " + value.dump());
  }
  if (reference.is_array() && !reference.empty()) {
    for (const auto & e : value) {
      if (!same_type(e, reference.front())) {
        config_error(key, "unexpected element " + e.dump());
      }
    }
  }
}

void merge(json & base, const json & overlay)
{
  for (const auto & [k, v] : overlay.items()) {
    if (v.is_object() && base.contains(k) && base[k].is_object()) {
      merge(base[k], v);
    } else {
      base[k] = v;
    }
  }
}

json::json_pointer pointer(const std::string & dotted)
{
  std::string p;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) {
      config_error(dotted, "malformed key");
    }
    p += "/" + part;
  }
  return json::json_pointer(p);
}

template <class T>
T get(const json & config, const std::string & key)
{
  try {
    return config.at(pointer(key)).get<T>();
  } catch (const json::exception & e) {
    config_error(key, e.what());
  }
}

/// Re-throws module errors with the config section that fed them.
template <class F>
auto with_key(const std::string & key, F && f) -> decltype(f())
{
  try {
    return f();
  } catch (const Error & e) {
    throw Error(e.code(), "config key '" + key + "': " + e.what());
  }
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
}

void write_json(const std::filesystem::path & path, const json & doc)
{
  write_text(path, doc.dump(2) + "\n");
}

json envelope(const std::string & command, const json & config)
{
  return {
    {"artifact", {{"name", "edgetwin"}, {"version", kArtifactVersion}}},
    {"command", command},
    {"config", config}};
}

SynthConfig synth_config(const json & section, std::uint64_t seed)
{
  SynthConfig c;
  c.vehicles = section.at("vehicles").get<int>();
  c.steps = section.at("steps").get<int>();
  c.lane_count = section.at("lane_count").get<int>();
  c.lane_change_rate = section.at("lane_change_rate").get<double>();
  c.speed_min = section.at("speed_min").get<double>();
  c.speed_max = section.at("speed_max").get<double>();
  c.segment_length = section.at("segment_length").get<double>();
  c.lane_width = section.at("lane_width").get<double>();
  c.box_length = section.at("box_length").get<double>();
  c.has_shoulder = section.at("has_shoulder").get<bool>();
  c.fps = section.at("fps").get<double>();
  c.truck_fraction = section.at("truck_fraction").get<double>();
  c.autonomous = section.at("autonomous").get<int>();
  c.seed = seed;
  return c;
}

std::uint64_t top_seed(const json & config)
{
  return get<std::uint64_t>(config, "seed");
}

BoostParams learner_params(const json & config)
{
  BoostParams p;
  p.n_trees = get<int>(config, "learner.n_trees");
  p.learning_rate = get<double>(config, "learner.learning_rate");
  p.max_depth = get<int>(config, "learner.max_depth");
  p.min_samples_leaf = get<int>(config, "learner.min_samples_leaf");
  p.colsample = get<double>(config, "learner.colsample");
  p.seed = derive_seed(top_seed(config), "learner");
  with_key("learner", [&] { p.validate(); });
  return p;
}

TrainTestSplit split_of(const json & config, const Trace & trace)
{
  return with_key("split.train_ratio", [&] {
    return split_train_test(
      trace, get<double>(config, "split.train_ratio"), derive_seed(top_seed(config), "split"));
  });
}

std::vector<int> autonomous_ids(const Trace & trace)
{
  std::vector<int> out;
  for (const int id : trace.vehicle_ids()) {
    if (trace.track(id).front().autonomous) {
      out.push_back(id);
    }
  }
  return out;
}

json trace_summary(const Trace & trace)
{
  return {
    {"vehicle_ids", trace.vehicle_ids().size()},
    {"frames", trace.frames().size()},
    {"states", trace.state_count()},
    {"autonomous_ids", autonomous_ids(trace).size()},
    {"segment_length", trace.extent()}};
}

CameraId parse_camera(const std::string & name, const std::string & key)
{
  if (name.size() < 2 || (name[0] != 'P' && name[0] != 'S')) {
    config_error(key, "camera names look like P3 or S2, got " + name);
  }
  int index = 0;
  try {
    index = std::stoi(name.substr(1));
  } catch (const std::exception &) {
    config_error(key, "bad camera name " + name);
  }
  return {name[0] == 'P' ? CameraKind::Primary : CameraKind::Secondary, index};
}

// ---------------------------------------------------------------- commands

void cmd_generate(const json & config, const std::filesystem::path & out, std::ostream & log)
{
  const auto trace = load_trace(config);
  write_trace(out / "trace.csv", trace);
  auto metrics = envelope("generate", config);
  metrics["trace"] = trace_summary(trace);
  write_json(out / "metrics.json", metrics);
  log << "wrote " << (out / "trace.csv").string() << " (" << trace.state_count() << " states)\n";
}

void cmd_train(const json & config, const std::filesystem::path & out, std::ostream & log)
{
  const auto trace = load_trace(config);
  json train_log = json::array();
  const auto models = obtain_models(config, trace, &train_log);
  json summary = json::array();
  std::string lines;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto & m = models[i];
    const auto path = out / ("model_h" + std::to_string(m.horizon) + ".json");
    save_model(path, m);
    const auto & entry = train_log.at(i);
    summary.push_back(
      {{"horizon", m.horizon},
       {"file", path.filename().string()},
       {"rows", entry.at("rows")},
       {"initial_loss_dx", entry.at("loss_dx").front()},
       {"final_loss_dx", entry.at("loss_dx").back()},
       {"initial_loss_dy", entry.at("loss_dy").front()},
       {"final_loss_dy", entry.at("loss_dy").back()}});
    lines += entry.dump() + "\n";
    log << "horizon " << m.horizon << ": " << entry.at("rows") << " rows, loss dx "
        << entry.at("loss_dx").front() << " -> " << entry.at("loss_dx").back() << "\n";
  }
  write_text(out / "training_log.jsonl", lines);
  const auto split = split_of(config, trace);
  auto metrics = envelope("train", config);
  metrics["trace"] = trace_summary(trace);
  metrics["split"] = {{"train", split.train.size()}, {"test", split.test.size()}};
  metrics["models"] = summary;
  write_json(out / "metrics.json", metrics);
}

json recursive_comparison(const BoostedForecaster & models, const Trace & trace,
                          const std::vector<int> & ids, const EvalOptions & opt)
{
  const auto hs = models.horizons();
  if (hs.empty() || hs.front() != 1 || hs.back() == 1) {
    return nullptr;
  }
  const int target = hs.back();
  const auto & step = models.model(1);
  const auto & direct = models.model(target);
  std::vector<double> direct_err;
  std::vector<double> recursive_err;
  for (const int id : ids) {
    const auto track = trace.track(id);
    const auto n = static_cast<long>(track.size());
    for (long i = std::max(direct.history, step.history) - 1; i + target < n; ++i) {
      const auto & now = track[static_cast<std::size_t>(i)];
      if (now.frame % opt.stride != 0) {
        continue;
      }
      const auto & fut = track[static_cast<std::size_t>(i + target)];
      const auto fv = extract_features(trace, id, now.frame, direct.history);
      const auto p = direct.predict(fv, {now.x, now.y});
      const auto r = recursive_rollout(step, trace, id, now.frame, target);
      direct_err.push_back(coordinate_distance(p, {fut.x, fut.y}));
      recursive_err.push_back(coordinate_distance(r, {fut.x, fut.y}));
    }
  }
  if (direct_err.empty()) {
    return nullptr;
  }
  return {
    {"horizon", target},
    {"points", direct_err.size()},
    {"direct", to_json(summarize(direct_err))},
    {"recursive", to_json(summarize(recursive_err))}};
}

void cmd_eval(const json & config, const std::filesystem::path & out, std::ostream & log)
{
  const auto trace = load_trace(config);
  const auto split = split_of(config, trace);
  const auto kind = get<std::string>(config, "eval.forecaster");
  const auto forecaster = make_forecaster(kind, config, trace);
  EvalOptions opt;
  opt.history = get<int>(config, "features.history");
  opt.stride = get<int>(config, "eval.stride");
  opt.thresholds = get<std::vector<double>>(config, "eval.thresholds");
  const auto horizons = get<std::vector<int>>(config, "horizons");
  const auto report =
    with_key("horizons", [&] { return evaluate(*forecaster, trace, split.test, horizons, opt); });

  auto metrics = envelope("eval", config);
  metrics["trace"] = trace_summary(trace);
  metrics["split"] = {{"train", split.train.size()}, {"test", split.test.size()}};
  metrics["forecaster"] = kind;
  metrics["eval"] = to_json(report);
  for (const auto & h : report.horizons) {
    log << "h=" << h.horizon << " mean error " << h.model.mean << " m (naive " << h.naive.mean
        << " m)\n";
  }

  const auto windows = get<std::vector<int>>(config, "eval.windows");
  const auto table = with_key("eval.windows", [&] {
    return speculative_eval(
      trace, *forecaster, split.test, windows, opt.thresholds, opt.history, opt.stride);
  });
  metrics["speculative"] = to_json(table);

  if (kind == "model" && get<bool>(config, "eval.recursive")) {
    metrics["recursive"] = recursive_comparison(
      dynamic_cast<const BoostedForecaster &>(*forecaster), trace, split.test, opt);
  }

  if (get<bool>(config, "eval.transfer.enabled")) {
    json section = config.at("synth");
    merge(section, config.at(pointer("eval.transfer.synth")));
    const auto other = with_key("eval.transfer.synth", [&] {
      return synth_trace(synth_config(section, derive_seed(top_seed(config), "transfer")));
    });
    const auto other_forecaster = kind == "oracle" ? make_forecaster(kind, config, other) : nullptr;
    const auto & used = other_forecaster ? *other_forecaster : *forecaster;
    const auto all = other.vehicle_ids();
    const auto report_b =
      with_key("eval.transfer", [&] { return evaluate(used, other, all, horizons, opt); });
    json rows = json::array();
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      const double a = report.horizons[i].model.mean;
      const double b = report_b.horizons[i].model.mean;
      rows.push_back(
        {{"horizon", horizons[i]},
         {"mean_error_a", a},
         {"mean_error_b", b},
         {"ratio", a > 0.0 ? json(b / a) : json(nullptr)}});
      log << "transfer h=" << horizons[i] << " A " << a << " m, B " << b << " m\n";
    }
    metrics["transfer"] = {
      {"trace_b", trace_summary(other)}, {"eval_b", to_json(report_b)}, {"horizons", rows}};
  }
  write_json(out / "metrics.json", metrics);
}

void cmd_simulate(const json & config, const std::filesystem::path & out, std::ostream & log)
{
  const auto trace = load_trace(config);
  const auto kind = get<std::string>(config, "pipeline.forecaster");
  const auto forecaster = make_forecaster(kind, config, trace);
  PipelineOptions opt;
  opt.stages.capture = get<int>(config, "pipeline.stages.capture");
  opt.stages.transfer = get<int>(config, "pipeline.stages.transfer");
  opt.stages.recognize = get<int>(config, "pipeline.stages.recognize");
  opt.stages.shift = get<int>(config, "pipeline.stages.shift");
  opt.stages.deliver = get<int>(config, "pipeline.stages.deliver");
  opt.history = get<int>(config, "features.history");
  opt.thresholds = get<std::vector<double>>(config, "eval.thresholds");
  opt.hazard.horizon = get<int>(config, "pipeline.hazard_horizon");
  opt.hazard.vicinity = get<double>(config, "pipeline.vicinity");
  opt.inflow_guard = get<bool>(config, "pipeline.inflow_guard");
  opt.max_vehicle_length = get<double>(config, "pipeline.max_vehicle_length");
  opt.plan_stride = get<int>(config, "pipeline.plan_stride");
  opt.record_maps = get<bool>(config, "pipeline.dump_maps");
  const auto avs = autonomous_ids(trace);
  const auto result =
    with_key("pipeline", [&] { return run_pipeline(trace, *forecaster, avs, opt); });

  std::string lines;
  std::string map_lines;
  for (const auto & rec : result.records) {
    lines += to_json(rec).dump() + "\n";
    if (opt.record_maps) {
      map_lines += json{{"frame", rec.frame}, {"maps", rec.maps}}.dump() + "\n";
    }
  }
  write_text(out / "directives.jsonl", lines);
  if (opt.record_maps) {
    write_text(out / "hazard_maps.jsonl", map_lines);
  }
  auto metrics = envelope("simulate", config);
  metrics["trace"] = trace_summary(trace);
  metrics["forecaster"] = kind;
  metrics["pipeline"] = to_json(result.metrics);
  write_json(out / "metrics.json", metrics);
  const auto & m = result.metrics;
  log << m.frames << " frames, staleness " << m.mean_staleness_error << " m, shifted "
      << m.mean_shifted_error << " m, " << m.grants << " grants, " << m.unsafe_grants
      << " unsafe\n";
  if (m.duplicate_grants > 0) {
    throw Error(ErrorCode::InvariantViolation, "a box was granted to two vehicles");
  }
}

void cmd_faults(const json & config, const std::filesystem::path & out, std::ostream & log)
{
  const auto topo = with_key("topology", [&] {
    return build(
      get<int>(config, "topology.n_fogs"), get<double>(config, "topology.fog_span"),
      get<double>(config, "topology.box_length"));
  });
  const int n = topo.n_fogs;
  json doc;
  doc["topology"] = to_json(topo);
  doc["healthy"] = to_json(coverage(topo));

  json scenarios = json::array();
  for (const auto & s : config.at(pointer("topology.scenarios"))) {
    std::set<int> fogs;
    std::set<CameraId> cams;
    for (const auto & f : s.value("fogs", json::array())) {
      fogs.insert(f.get<int>());
    }
    for (const auto & c : s.value("cameras", json::array())) {
      cams.insert(parse_camera(c.get<std::string>(), "topology.scenarios"));
    }
    auto failed = topo;
    with_key("topology.scenarios", [&] { return operational_after(topo, fogs, cams); });
    failed.failed_fogs = fogs;
    failed.failed_cams = cams;
    auto report = to_json(coverage(failed));
    report["name"] = s.value("name", "");
    report["failed_fogs"] = fogs;
    json cam_names = json::array();
    for (const auto & c : cams) {
      cam_names.push_back(to_string(c));
    }
    report["failed_cameras"] = cam_names;
    log << "scenario '" << s.value("name", "") << "': "
        << (report["operational"].get<bool>() ? "operational" : "NOT operational") << "\n";
    scenarios.push_back(report);
  }
  doc["scenarios"] = scenarios;

  json single = json::array();
  bool all_single = true;
  for (const auto & c : topo.cameras()) {
    const bool ok = operational_after(topo, {}, {c});
    all_single = all_single && ok;
    single.push_back({{"camera", to_string(c)}, {"operational", ok}});
  }
  doc["single_camera_failures"] = single;

  json cases = json::array();
  for (int f = 1; f <= n; ++f) {
    const auto c = camera_fault_cases(topo, f);
    cases.push_back(
      {{"fog", f},
       {"primary_fails", c.primary_fails},
       {"one_secondary_fails", c.one_secondary_fails},
       {"both_secondaries_fail", c.both_secondaries_fail}});
  }
  doc["camera_fault_cases"] = cases;

  std::set<int> alternating;
  for (int f = 1; f <= n; f += 2) {
    alternating.insert(f);
  }
  const bool half_ok = operational_after(topo, alternating, {});

  json summary = {
    {"healthy_operational", doc["healthy"]["operational"]},
    {"single_camera_failures_operational", all_single},
    {"alternating_half_failures_operational", half_ok}};
  if (get<bool>(config, "topology.exhaustive")) {
    if (n > 16) {
      config_error("topology.exhaustive", "enumeration is limited to 16 fogs");
    }
    std::size_t operational = 0;
    std::size_t mismatches = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::set<int> dead;
      bool adjacent = false;
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1u) {
          dead.insert(i + 1);
          adjacent = adjacent || (i + 1 < n && (mask >> (i + 1) & 1u));
        }
      }
      const bool ok = operational_after(topo, dead, {});
      operational += ok ? 1 : 0;
      mismatches += ok == adjacent ? 1 : 0;
    }
    summary["exhaustive"] = {
      {"subsets", std::size_t{1} << n},
      {"operational", operational},
      {"adjacency_mismatches", mismatches}};
    log << "exhaustive: " << operational << " of " << (1u << n)
        << " fog-failure subsets operational, " << mismatches << " mismatches\n";
  }
  doc["summary"] = summary;
  write_json(out / "coverage.json", doc);
  auto metrics = envelope("faults", config);
  metrics["faults"] = summary;
  write_json(out / "metrics.json", metrics);
}

}  // namespace

void validate_config(const json & config)
{
  const auto defaults = default_config();
  check(config, defaults, "", defaults);
}

json load_config(const std::filesystem::path & path, const std::vector<std::string> & overrides)
{
  auto config = default_config();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) {
      throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
    }
    json user;
    try {
      user = json::parse(in);
    } catch (const json::parse_error & e) {
      throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    if (!user.is_object()) {
      throw Error(ErrorCode::ConfigError, path.string() + ": top level must be an object");
    }
    const auto defaults = default_config();
    check(user, defaults, "", defaults);
    merge(config, user);
  }
  for (const auto & item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::ConfigError, "override '" + item + "' is not key=value");
    }
    const auto key = item.substr(0, eq);
    const auto text = item.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error &) {
      value = text;
    }
    // Build the one-key document and run it through the same checks.
    json patch = json::object();
    patch[pointer(key)] = value;
    const auto defaults = default_config();
    check(patch, defaults, "", defaults);
    config[pointer(key)] = value;
  }
  return config;
}

Trace load_trace(const json & config)
{
  const auto source = get<std::string>(config, "data.source");
  if (source == "synthetic") {
    return with_key("synth", [&] {
      return synth_trace(synth_config(config.at("synth"), derive_seed(top_seed(config), "generator")));
    });
  }
  if (source != "file") {
    config_error("data.source", "expected \"synthetic\" or \"file\", got \"" + source + "\"");
  }
  const auto path = get<std::string>(config, "data.path");
  if (path.empty()) {
    config_error("data.path", "required when data.source is \"file\"");
  }
  ParseOptions opt;
  opt.fps = get<double>(config, "data.fps");
  opt.lane_width = get<double>(config, "data.lane_width");
  opt.box_length = get<double>(config, "data.box_length");
  opt.has_shoulder = get<bool>(config, "data.has_shoulder");
  opt.bbox_corner = get<bool>(config, "data.bbox_corner");
  opt.flip_y = get<bool>(config, "data.flip_y");
  opt.y_offset = get<double>(config, "data.y_offset");
  opt.lane_from_y = get<bool>(config, "data.lane_from_y");
  opt.lane_base = get<int>(config, "data.lane_base");
  return with_key("data.path", [&] { return parse_trace(path, opt); });
}

std::vector<ForecasterEnsemble> obtain_models(const json & config, const Trace & trace, json * log)
{
  const auto horizons = get<std::vector<int>>(config, "horizons");
  const int history = get<int>(config, "features.history");
  if (horizons.empty()) {
    config_error("horizons", "at least one horizon is required");
  }
  std::vector<ForecasterEnsemble> models;
  const auto dir = get<std::string>(config, "models.dir");
  if (!dir.empty()) {
    for (const int h : horizons) {
      const auto path = std::filesystem::path(dir) / ("model_h" + std::to_string(h) + ".json");
      if (!std::filesystem::exists(path)) {
        throw Error(
          ErrorCode::MissingModel, "config key 'models.dir': no " + path.string());
      }
      auto m = with_key("models.dir", [&] { return load_model(path); });
      if (m.history != history) {
        throw Error(
          ErrorCode::BadModelFile, "config key 'features.history': " + path.string() +
                                     " was trained with history " + std::to_string(m.history));
      }
      models.push_back(std::move(m));
    }
    return models;
  }
  const auto split = split_of(config, trace);
  const auto params = learner_params(config);
  const int stride = get<int>(config, "features.stride");
  for (const int h : horizons) {
    const auto data = with_key("features", [&] {
      return make_dataset(trace, split.train, h, history, stride);
    });
    auto fit = train(data, params);
    if (log) {
      log->push_back(
        {{"horizon", h}, {"rows", data.rows()}, {"loss_dx", fit.loss_dx}, {"loss_dy", fit.loss_dy}});
    }
    models.push_back(std::move(fit.model));
  }
  return models;
}

std::unique_ptr<Forecaster> make_forecaster(const std::string & kind, const json & config,
                                            const Trace & trace)
{
  if (kind == "model") {
    return std::make_unique<BoostedForecaster>(obtain_models(config, trace));
  }
  if (kind == "oracle") {
    return std::make_unique<GroundTruthForecaster>(trace);
  }
  if (kind == "naive") {
    return std::make_unique<NaiveForecaster>();
  }
  config_error("forecaster", "expected \"model\", \"oracle\" or \"naive\", got \"" + kind + "\"");
}

void run_command(const std::string & command, const json & config,
                 const std::filesystem::path & out, std::ostream & log)
{
  validate_config(config);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot create " + out.string() + ": " + ec.message());
  }
  if (command == "generate") {
    cmd_generate(config, out, log);
  } else if (command == "train") {
    cmd_train(config, out, log);
  } else if (command == "eval") {
    cmd_eval(config, out, log);
  } else if (command == "simulate") {
    cmd_simulate(config, out, log);
  } else if (command == "faults") {
    cmd_faults(config, out, log);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown command '" + command + "'");
  }
}

int exit_code(const Error & error)
{
  switch (category(error.code())) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Internal: return 4;
  }
  return 4;
}

}  // namespace edgetwin
