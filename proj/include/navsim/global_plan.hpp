#pragma once

#include <cstddef>
#include <vector>

#include "navsim/geometry.hpp"
#include "navsim/grid.hpp"

namespace navsim {

// Dense polyline produced by the global planner: consecutive points are at
// most 2 * grid-resolution apart, so nearest-point projection doubles as the
// discretized closest-point operator.
struct GlobalPath {
    std::vector<Vec2> points;
    std::vector<double> arclen;  // cumulative length, arclen[0] == 0

    double length() const { return arclen.empty() ? 0.0 : arclen.back(); }
    // Index of the closest point; ties resolved toward the smaller arc length.
    std::size_t nearest(Vec2 p) const;
    // Point at clamped arc length s (linear interpolation between vertices).
    Vec2 point_at(double s) const;
};

// 8-connected A* over cells with clearance > inflate, followed by a greedy
// line-of-sight shortcut and uniform resampling. Throws NoPath.
GlobalPath plan_path(const OccupancyGrid& grid, Vec2 start, Vec2 goal, double inflate);

// Concatenation of plan_path legs through the waypoint list.
GlobalPath plan_route(const OccupancyGrid& grid, const std::vector<Vec2>& waypoints,
                      double inflate);

}  // namespace navsim
