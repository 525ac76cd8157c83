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


#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgetwin/error.hpp"
#include "edgetwin/harness.hpp"

int main(int argc, char ** argv)
{
  CLI::App app{"edgetwin: trajectory forecasting and edge allocation harness"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  for (const char * name : {"generate", "train", "eval", "simulate", "faults"}) {
    auto * sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "override a config key, e.g. --set synth.steps=500");
    sub->add_option("--out", out_dir, "output directory (default: config 'output')");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto config = edgetwin::load_config(config_path, overrides);
    const std::string out = out_dir.empty() ? config.at("output").get<std::string>() : out_dir;
    edgetwin::run_command(command, config, out, std::cerr);
  } catch (const edgetwin::Error & e) {
    std::cerr << "edgetwin: " << e.what() << "\n";
    return edgetwin::exit_code(e);
  } catch (const nlohmann::json::exception & e) {
    std::cerr << "edgetwin: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "edgetwin: internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
