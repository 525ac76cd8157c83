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

#ifndef EDGETWIN__TRACE_IO_HPP_
#define EDGETWIN__TRACE_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "edgetwin/trace_model.hpp"

namespace edgetwin
{

/// Column names of a trace table, keyed by logical field. Defaults are the
/// highD names. Note highD's "width" is the longitudinal extent of the box
/// (vehicle length) and "height" the lateral one (vehicle width).
struct TraceSchema
{
  std::string frame = "frame";
  std::string id = "id";
  std::string x = "x";
  std::string y = "y";
  std::string length = "width";
  std::string width = "height";
  std::string vx = "xVelocity";
  std::string vy = "yVelocity";
  std::string ax = "xAcceleration";
  std::string ay = "yAcceleration";
  std::string lane = "laneId";
  // Optional columns; absent ones default to Car / human-driven.
  std::string klass = "class";
  std::string autonomous = "autonomous";

  /// Overrides from a logical-field -> column-name map. Throws ConfigError on
  /// an unknown logical field.
  static TraceSchema from_map(const std::map<std::string, std::string> & remap);
};

struct ParseOptions
{
  TraceSchema schema;
  double fps = kDefaultFps;
  double lane_width = 3.5;
  double box_length = 5.0;
  bool has_shoulder = false;
  std::optional<int> lane_count;       // default: inferred from the data
  std::optional<double> segment_start;  // default: min(0, lowest box edge below data)
  std::optional<double> extent;         // default: padded to cover all centers
  bool bbox_corner = false;  // x, y give the top-left corner (raw highD)
  bool flip_y = false;       // image-down lateral axis
  double y_offset = 0.0;     // added after the flip
  bool lane_from_y = true;   // derive lane from y; otherwise laneId - lane_base
  int lane_base = 0;
};

/// Reads a comma-separated trace table with a header row. Rows whose center
/// lies outside the segment are dropped; positions are translated so the
/// segment starts at 0.
Trace parse_trace(const std::filesystem::path & path, const ParseOptions & options = {});
Trace parse_trace(std::istream & in, const ParseOptions & options = {});

/// Canonical serialization: highD column names, shortest round-trip decimals.
void write_trace(std::ostream & out, const Trace & trace);
void write_trace(const std::filesystem::path & path, const Trace & trace);

/// Options that re-read a canonical file into an equal Trace.
ParseOptions canonical_options(const Trace & trace);

}  // namespace edgetwin

#endif  // EDGETWIN__TRACE_IO_HPP_
