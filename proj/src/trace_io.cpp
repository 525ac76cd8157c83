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

#include "edgetwin/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "edgetwin/error.hpp"

namespace edgetwin
{

TraceSchema TraceSchema::from_map(const std::map<std::string, std::string> & remap)
{
  TraceSchema schema;
  const std::map<std::string, std::string TraceSchema::*> fields = {
    {"frame", &TraceSchema::frame},   {"id", &TraceSchema::id},
    {"x", &TraceSchema::x},           {"y", &TraceSchema::y},
    {"length", &TraceSchema::length}, {"width", &TraceSchema::width},
    {"vx", &TraceSchema::vx},         {"vy", &TraceSchema::vy},
    {"ax", &TraceSchema::ax},         {"ay", &TraceSchema::ay},
    {"lane", &TraceSchema::lane},     {"class", &TraceSchema::klass},
    {"autonomous", &TraceSchema::autonomous},
  };
  for (const auto & [field, column] : remap) {
    auto it = fields.find(field);
    if (it == fields.end()) {
      throw Error(ErrorCode::ConfigError, "unknown schema field '" + field + "'");
    }
    schema.*(it->second) = column;
  }
  return schema;
}

namespace
{

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_row(std::string_view line)
{
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return cells;
}

double to_double(std::string_view cell, std::size_t line_no)
{
  double value = 0.0;
  if (!cell.empty() && cell.front() == '+') {
    cell.remove_prefix(1);
  }
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw Error(
      ErrorCode::InvalidRow,
      "line " + std::to_string(line_no) + ": cannot parse '" + std::string(cell) + "'");
  }
  return value;
}

int to_int(std::string_view cell, std::size_t line_no)
{
  const double v = to_double(cell, line_no);
  if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max()) {
    throw Error(
      ErrorCode::InvalidRow,
      "line " + std::to_string(line_no) + ": expected integer, got '" + std::string(cell) + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

Trace parse_trace(std::istream & in, const ParseOptions & options)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::MissingColumn, "empty file: no header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  std::unordered_map<std::string, std::size_t> column_index;
  {
    const auto header = split_row(line);
    for (std::size_t i = 0; i < header.size(); ++i) {
      column_index.emplace(std::string(header[i]), i);
    }
  }
  const auto & sc = options.schema;
  auto require = [&](const std::string & name) {
    auto it = column_index.find(name);
    if (it == column_index.end()) {
      throw Error(ErrorCode::MissingColumn, name);
    }
    return it->second;
  };
  auto optional_column = [&](const std::string & name) -> std::optional<std::size_t> {
    auto it = column_index.find(name);
    if (it == column_index.end()) {
      return std::nullopt;
    }
    return it->second;
  };
  const std::size_t c_frame = require(sc.frame), c_id = require(sc.id), c_x = require(sc.x),
                    c_y = require(sc.y), c_vx = require(sc.vx), c_vy = require(sc.vy),
                    c_ax = require(sc.ax), c_ay = require(sc.ay), c_lane = require(sc.lane),
                    c_len = require(sc.length), c_wid = require(sc.width);
  const auto c_class = optional_column(sc.klass);
  const auto c_auto = optional_column(sc.autonomous);

  std::vector<VehicleState> rows;
  std::unordered_map<int, int> last_frame;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto cells = split_row(line);
    auto cell = [&](std::size_t c) -> std::string_view {
      if (c >= cells.size()) {
        throw Error(ErrorCode::InvalidRow, "line " + std::to_string(line_no) + ": too few cells");
      }
      return cells[c];
    };
    VehicleState s;
    s.frame = to_int(cell(c_frame), line_no);
    s.vehicle_id = to_int(cell(c_id), line_no);
    s.x = to_double(cell(c_x), line_no);
    s.y = to_double(cell(c_y), line_no);
    s.vx = to_double(cell(c_vx), line_no);
    s.vy = to_double(cell(c_vy), line_no);
    s.ax = to_double(cell(c_ax), line_no);
    s.ay = to_double(cell(c_ay), line_no);
    s.lane = to_int(cell(c_lane), line_no) - options.lane_base;
    s.length = to_double(cell(c_len), line_no);
    s.width = to_double(cell(c_wid), line_no);
    if (c_class) {
      const auto k = cell(*c_class);
      s.klass = (k == "Truck" || k == "truck" || k == "1") ? VehicleClass::Truck : VehicleClass::Car;
    }
    if (c_auto) {
      const auto a = cell(*c_auto);
      s.autonomous = (a == "1" || a == "true");
    }
    if (options.bbox_corner) {
      s.x += 0.5 * s.length;
      s.y += 0.5 * s.width;
    }
    if (options.flip_y) {
      s.y = -s.y;
      s.vy = -s.vy;
      s.ay = -s.ay;
    }
    s.y += options.y_offset;

    auto [it, inserted] = last_frame.emplace(s.vehicle_id, s.frame);
    if (!inserted) {
      if (s.frame <= it->second) {
        throw Error(
          ErrorCode::NonMonotoneFrames, "vehicle " + std::to_string(s.vehicle_id) + " at line " +
                                          std::to_string(line_no));
      }
      it->second = s.frame;
    }
    rows.push_back(s);
  }

  RoadGeometry geometry;
  geometry.lane_width = options.lane_width;
  geometry.box_length = options.box_length;
  geometry.has_shoulder = options.has_shoulder;
  if (options.lane_count) {
    geometry.lane_count = *options.lane_count;
  } else {
    int max_lane = 0;
    for (const auto & s : rows) {
      max_lane = std::max(
        max_lane, options.lane_from_y ? static_cast<int>(std::floor(s.y / options.lane_width))
                                      : s.lane);
    }
    geometry.lane_count = max_lane + 1 - (options.has_shoulder ? 1 : 0);
    geometry.lane_count = std::max(1, geometry.lane_count);
  }

  double start = 0.0;
  if (options.segment_start) {
    start = *options.segment_start;
  } else {
    for (const auto & s : rows) {
      start = std::min(start, std::floor(s.x / options.box_length) * options.box_length);
    }
  }
  double extent = options.box_length;
  if (options.extent) {
    extent = *options.extent;
  } else {
    for (const auto & s : rows) {
      extent = std::max(extent, (std::floor((s.x - start) / options.box_length) + 1.0) * options.box_length);
    }
  }
  geometry.segment_start = 0.0;
  geometry.segment_end = extent;
  geometry = geometry.padded();
  geometry.validate();

  std::vector<VehicleState> kept;
  kept.reserve(rows.size());
  for (auto s : rows) {
    s.x -= start;
    if (s.x < geometry.segment_start || s.x >= geometry.segment_end) {
      continue;
    }
    if (options.lane_from_y) {
      s.lane = geometry.lane_of(s.y);
    }
    kept.push_back(s);
  }
  return Trace::build(std::move(kept), geometry, options.fps);
}

Trace parse_trace(const std::filesystem::path & path, const ParseOptions & options)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return parse_trace(in, options);
}

namespace
{

void put_double(std::ostream & out, double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

}  // namespace

void write_trace(std::ostream & out, const Trace & trace)
{
  out << "frame,id,x,y,width,height,xVelocity,yVelocity,xAcceleration,yAcceleration,laneId,"
         "class,autonomous\n";
  for (const auto & frame : trace.frames()) {
    for (const auto & s : frame.states) {
      out << s.frame << ',' << s.vehicle_id << ',';
      for (const double v : {s.x, s.y, s.length, s.width, s.vx, s.vy, s.ax, s.ay}) {
        put_double(out, v);
        out << ',';
      }
      out << s.lane << ',' << (s.klass == VehicleClass::Truck ? "Truck" : "Car") << ','
          << (s.autonomous ? 1 : 0) << '\n';
    }
  }
}

void write_trace(const std::filesystem::path & path, const Trace & trace)
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  write_trace(out, trace);
}

ParseOptions canonical_options(const Trace & trace)
{
  ParseOptions options;
  const auto & g = trace.geometry();
  options.fps = trace.fps();
  options.lane_width = g.lane_width;
  options.box_length = g.box_length;
  options.has_shoulder = g.has_shoulder;
  options.lane_count = g.lane_count;
  options.segment_start = g.segment_start;
  options.extent = g.length();
  options.lane_from_y = false;
  return options;
}

}  // namespace edgetwin
