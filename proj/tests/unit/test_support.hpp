#ifndef EDGETWIN__TEST_SUPPORT_HPP_
#define EDGETWIN__TEST_SUPPORT_HPP_

#include <cmath>
#include <vector>

#include "edgetwin/trace_model.hpp"

namespace edgetwin::testing
{

inline VehicleState make_state(int id, int frame, double x, int lane, double vx = 0.0,
                               const RoadGeometry & g = RoadGeometry{})
{
  VehicleState s;
  s.vehicle_id = id;
  s.frame = frame;
  s.x = x;
  s.y = g.lane_center(lane);
  s.vx = vx;
  s.lane = lane;
  s.length = 4.0;
  s.width = 1.8;
  return s;
}

/// Vehicle driving at constant velocity in one lane over [first, first + n).
inline std::vector<VehicleState> constant_velocity_track(int id, int first, int n, double x0,
                                                         double vx, int lane,
                                                         const RoadGeometry & g,
                                                         double fps = 25.0)
{
  std::vector<VehicleState> out;
  for (int k = 0; k < n; ++k) {
    out.push_back(make_state(id, first + k, x0 + vx * k / fps, lane, vx, g));
  }
  return out;
}

inline bool footprints_overlap(const VehicleState & a, const VehicleState & b)
{
  const double ox = std::min(a.x + a.length / 2, b.x + b.length / 2) -
                    std::max(a.x - a.length / 2, b.x - b.length / 2);
  const double oy = std::min(a.y + a.width / 2, b.y + b.width / 2) -
                    std::max(a.y - a.width / 2, b.y - b.width / 2);
  return ox > 0.0 && oy > 0.0;
}

/// O(V^2 T) scan: number of overlapping footprint pairs over all frames.
inline int count_overlaps(const Trace & trace)
{
  int n = 0;
  for (const auto & f : trace.frames()) {
    for (std::size_t i = 0; i < f.states.size(); ++i) {
      for (std::size_t j = i + 1; j < f.states.size(); ++j) {
        if (footprints_overlap(f.states[i], f.states[j])) {
          ++n;
        }
      }
    }
  }
  return n;
}

}  // namespace edgetwin::testing

#endif  // EDGETWIN__TEST_SUPPORT_HPP_
