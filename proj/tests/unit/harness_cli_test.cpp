#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "edgetwin/error.hpp"
#include "edgetwin/harness.hpp"
#include "edgetwin/trace_io.hpp"

using namespace edgetwin;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string & name)
{
  const auto dir = fs::temp_directory_path() / "edgetwin_harness_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path & path) { return json::parse(slurp(path)); }

ErrorCode code_of(const std::function<void()> & f)
{
  try {
    f();
  } catch (const Error & e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvariantViolation;
}

json small_config(std::vector<std::string> extra = {})
{
  std::vector<std::string> base = {
    "synth.steps=400", "synth.vehicles=12", "synth.autonomous=3", "horizons=[1]",
    "learner.n_trees=20", "features.stride=5", "eval.windows=[1]",
    "pipeline.hazard_horizon=5"};
  base.insert(base.end(), extra.begin(), extra.end());
  return load_config({}, base);
}

}  // namespace

TEST_CASE("defaults validate and overrides are typed")
{
  const auto d = default_config();
  CHECK_NOTHROW(validate_config(d));
  CHECK(d.at("synth").at("vehicles") == 30);
  CHECK(d.at("pipeline").at("stages").at("capture") == 1);

  const auto c = load_config({}, {"synth.steps=77", "pipeline.forecaster=oracle"});
  CHECK(c.at("synth").at("steps") == 77);
  CHECK(c.at("pipeline").at("forecaster") == "oracle");
  // integer default accepts no fraction; floating default accepts an integer
  CHECK(code_of([] { load_config({}, {"synth.steps=7.5"}); }) == ErrorCode::ConfigError);
  CHECK_NOTHROW(load_config({}, {"synth.speed_min=20"}));
}

TEST_CASE("unknown keys are rejected with their dotted name")
{
  try {
    load_config({}, {"synth.vehicels=3"});
    FAIL("accepted a misspelt key");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(std::string(e.what()).find("synth.vehicels") != std::string::npos);
  }
  const auto dir = scratch("badfile");
  std::ofstream(dir / "c.json") << R"({"pipeline": {"stages": {"capure": 1}}})";
  try {
    load_config(dir / "c.json");
    FAIL("accepted a misspelt key");
  } catch (const Error & e) {
    CHECK(std::string(e.what()).find("pipeline.stages.capure") != std::string::npos);
  }
  std::ofstream(dir / "broken.json") << "{";
  CHECK(code_of([&] { load_config(dir / "broken.json"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { load_config({}, {"eval.transfer.synth={\"lanes\":2}"}); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { load_config({}, {"topology.scenarios=[{\"fog\":[1]}]"}); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { load_config("/nonexistent/edgetwin.json"); }) == ErrorCode::ConfigError);
}

TEST_CASE("exit codes by category")
{
  CHECK(exit_code(Error(ErrorCode::ConfigError, "x")) == 2);
  CHECK(exit_code(Error(ErrorCode::BadParams, "x")) == 2);
  CHECK(exit_code(Error(ErrorCode::MissingColumn, "x")) == 3);
  CHECK(exit_code(Error(ErrorCode::InvariantViolation, "x")) == 4);
}

TEST_CASE("generate is deterministic and parses back")
{
  const auto a = scratch("gen_a");
  const auto b = scratch("gen_b");
  std::ostringstream log;
  const auto config = small_config();
  run_command("generate", config, a, log);
  run_command("generate", config, b, log);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
  CHECK(slurp(a / "metrics.json") == slurp(b / "metrics.json"));

  const auto trace = parse_trace(a / "trace.csv");
  const auto metrics = read_json(a / "metrics.json");
  CHECK(metrics.at("command") == "generate");
  CHECK(metrics.at("artifact").at("version") == kArtifactVersion);
  CHECK(metrics.at("trace").at("states") == trace.state_count());
  CHECK(trace.state_count() == 12u * 400u);

  const auto other = scratch("gen_seed");
  run_command("generate", small_config({"seed=2"}), other, log);
  CHECK(slurp(a / "trace.csv") != slurp(other / "trace.csv"));
}

TEST_CASE("generate with no vehicles writes an empty but valid trace")
{
  const auto dir = scratch("gen_empty");
  std::ostringstream log;
  run_command("generate", small_config({"synth.vehicles=0", "synth.autonomous=0"}), dir, log);
  const auto text = slurp(dir / "trace.csv");
  CHECK(text.rfind("frame,id,x,y", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(read_json(dir / "metrics.json").at("trace").at("states") == 0);
}

TEST_CASE("file source reads a written trace")
{
  const auto dir = scratch("file_source");
  std::ostringstream log;
  run_command("generate", small_config(), dir, log);
  const auto cfg =
    small_config({"data.source=file", "data.path=" + (dir / "trace.csv").string()});
  const auto from_file = load_trace(cfg);
  const auto generated = load_trace(small_config());
  CHECK(from_file.state_count() == generated.state_count());
  CHECK(code_of([] { load_trace(small_config({"data.source=file"})); }) ==
        ErrorCode::ConfigError);
}

TEST_CASE("train writes one model per horizon and a non-increasing loss log")
{
  const auto dir = scratch("train");
  std::ostringstream log;
  run_command("train", small_config({"horizons=[1,3]"}), dir, log);
  CHECK(fs::exists(dir / "model_h1.json"));
  CHECK(fs::exists(dir / "model_h3.json"));
  CHECK_FALSE(fs::exists(dir / "model_h5.json"));

  std::ifstream lines(dir / "training_log.jsonl");
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto entry = json::parse(line);
    for (const char * key : {"loss_dx", "loss_dy"}) {
      const auto loss = entry.at(key).get<std::vector<double>>();
      REQUIRE(loss.size() == 21u);
      for (std::size_t i = 1; i < loss.size(); ++i) {
        CHECK(loss[i] <= loss[i - 1] + 1e-12);
      }
    }
    ++count;
  }
  CHECK(count == 2);

  // loading the written files gives the same forecaster as training in-process
  const auto trained = obtain_models(small_config({"horizons=[1,3]"}), load_trace(small_config()));
  const auto loaded = obtain_models(
    small_config({"horizons=[1,3]", "models.dir=" + dir.string()}), load_trace(small_config()));
  REQUIRE(loaded.size() == 2u);
  CHECK(to_json(loaded[0]) == to_json(trained[0]));
  CHECK(to_json(loaded[1]) == to_json(trained[1]));

  CHECK(code_of([&] {
          obtain_models(small_config({"horizons=[2]", "models.dir=" + dir.string()}),
                        load_trace(small_config()));
        }) == ErrorCode::MissingModel);
}

TEST_CASE("eval with the oracle forecaster has zero error and reports the naive baseline")
{
  const auto dir = scratch("eval_oracle");
  std::ostringstream log;
  run_command(
    "eval", small_config({"eval.forecaster=oracle", "horizons=[1,5]", "eval.windows=[1,5]"}), dir,
    log);
  const auto metrics = read_json(dir / "metrics.json");
  for (const auto & row : metrics.at("eval")) {
    CHECK(row.at("model").at("mean") == 0.0);
    CHECK(row.at("naive").at("mean").get<double>() > 0.0);
    CHECK(row.at("model_accuracy").at("0.01") == 1.0);
  }
  for (const auto & row : metrics.at("speculative")) {
    for (const auto & [k, v] : row.at("accuracy").items()) {
      CHECK(v == 1.0);
    }
  }
}

TEST_CASE("eval rejects windows without a model")
{
  const auto dir = scratch("eval_window");
  std::ostringstream log;
  CHECK(code_of([&] {
          run_command("eval", small_config({"eval.windows=[2]"}), dir, log);
        }) == ErrorCode::MissingHorizonModel);
}

TEST_CASE("simulate writes directives and is deterministic")
{
  const auto a = scratch("sim_a");
  const auto b = scratch("sim_b");
  std::ostringstream log;
  const auto config = small_config({"pipeline.forecaster=oracle", "pipeline.dump_maps=true"});
  run_command("simulate", config, a, log);
  run_command("simulate", config, b, log);
  CHECK(slurp(a / "directives.jsonl") == slurp(b / "directives.jsonl"));
  CHECK(slurp(a / "metrics.json") == slurp(b / "metrics.json"));
  CHECK(fs::exists(a / "hazard_maps.jsonl"));
  const auto m = read_json(a / "metrics.json").at("pipeline");
  CHECK(m.at("duplicate_grants") == 0);
  CHECK(m.at("unsafe_grants") == 0);
  CHECK(m.at("total_delay") == 5);

  std::ifstream lines(a / "directives.jsonl");
  std::string line;
  REQUIRE(std::getline(lines, line));
  const auto rec = json::parse(line);
  CHECK(rec.at("frame").get<int>() - rec.at("capture_frame").get<int>() == 5);
  CHECK(rec.at("directives").size() == 3u);
}

TEST_CASE("faults reports coverage and the exhaustive enumeration")
{
  const auto dir = scratch("faults");
  std::ostringstream log;
  run_command("faults", load_config({}, {"topology.n_fogs=6"}), dir, log);
  const auto doc = read_json(dir / "coverage.json");
  CHECK(doc.at("healthy").at("operational") == true);
  CHECK(doc.at("summary").at("exhaustive").at("subsets") == 64);
  // binary strings of length 6 with no two adjacent ones
  CHECK(doc.at("summary").at("exhaustive").at("operational") == 21);
  CHECK(doc.at("summary").at("exhaustive").at("adjacency_mismatches") == 0);
  CHECK(doc.at("summary").at("single_camera_failures_operational") == true);
  CHECK(doc.at("summary").at("alternating_half_failures_operational") == true);
  CHECK(doc.at("scenarios").size() == 4u);
  CHECK(doc.at("scenarios").at(1).at("operational") == false);
  CHECK(doc.at("camera_fault_cases").size() == 6u);

  CHECK(code_of([&] {
          run_command("faults", load_config({}, {"topology.scenarios=[{\"fogs\":[9]}]"}), dir,
                      log);
        }) == ErrorCode::BadParams);
  CHECK(code_of([&] {
          run_command("faults", load_config({}, {"topology.scenarios=[{\"cameras\":[\"Q1\"]}]"}),
                      dir, log);
        }) == ErrorCode::ConfigError);
}

TEST_CASE("unknown command")
{
  std::ostringstream log;
  CHECK(code_of([&] { run_command("bogus", default_config(), scratch("bogus"), log); }) ==
        ErrorCode::ConfigError);
}
