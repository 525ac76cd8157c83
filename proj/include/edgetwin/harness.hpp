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


#ifndef EDGETWIN__HARNESS_HPP_
#define EDGETWIN__HARNESS_HPP_

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgetwin/error.hpp"
#include "edgetwin/forecaster.hpp"
#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

inline constexpr const char * kArtifactVersion = "1.0.0";

/// Every run setting with its default value. Unknown keys are rejected.
nlohmann::json default_config();

/// Defaults, overlaid by the file at `path` (if not empty), then by the
/// `key=value` overrides (dotted keys, JSON values; bare text is a string).
/// Throws ConfigError naming the offending key.
nlohmann::json load_config(const std::filesystem::path & path,
                           const std::vector<std::string> & overrides = {});

/// Checks keys and value types against the defaults. Throws ConfigError.
void validate_config(const nlohmann::json & config);

/// Trace named by the `data` section: generated from `synth` (seeded by the
/// "generator" sub-seed) or read from `data.path`.
Trace load_trace(const nlohmann::json & config);

/// Per-horizon models: read from `models.dir` when set, otherwise trained
/// on the train split. Training logs are appended to `log` when given.
std::vector<ForecasterEnsemble> obtain_models(const nlohmann::json & config, const Trace & trace,
                                              nlohmann::json * log = nullptr);

/// Forecaster named by `kind` ("model", "oracle" or "naive").
std::unique_ptr<Forecaster> make_forecaster(const std::string & kind,
                                            const nlohmann::json & config, const Trace & trace);

/// Runs one subcommand (generate, train, eval, simulate, faults), writing its
/// files under `out`. Progress lines go to `log`. Throws Error.
void run_command(const std::string & command, const nlohmann::json & config,
                 const std::filesystem::path & out, std::ostream & log);

/// Process exit code for an error: 2 config, 3 data, 4 internal.
int exit_code(const Error & error);

}  // namespace edgetwin

#endif  // EDGETWIN__HARNESS_HPP_
