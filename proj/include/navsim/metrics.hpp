#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "navsim/geometry.hpp"
#include "navsim/global_plan.hpp"
#include "navsim/grid.hpp"
#include "navsim/world.hpp"

namespace navsim {

// Safety of the current motion state: 1 when the braking distance
// v^2 / (2 a_max) fits inside the obstacle distance (or is zero), otherwise
// the ratio d_obs / d_brake.
double safety_metric(double d_obs, double v, double max_accel);

// Raw minimum over a full scan; throws EmptyScan.
double min_obstacle_distance(const std::vector<double>& scan);

// Trailing-window odometry used by the performance metric: poses are pushed
// once per control tick and entries older than the horizon are dropped.
class PathWindow {
  public:
    explicit PathWindow(double horizon = 2.0) : horizon_(horizon) {}

    void add(double t, Vec2 p);
    void clear() { entries_.clear(); }
    bool spans_horizon() const;
    double horizon() const { return horizon_; }
    Vec2 oldest() const { return entries_.front().p; }
    Vec2 newest() const { return entries_.back().p; }

  private:
    struct Entry {
        double t;
        Vec2 p;
    };
    double horizon_;
    std::deque<Entry> entries_;
};

// Reference-time ratio over the trailing window: both window endpoints are
// projected onto the global path (closest point, ties toward the smaller arc
// length), the arc-length gap becomes a reference time at full robot speed,
// and the result is that time over the window length, clamped to [0, 1].
// Empty until the window spans its horizon.
std::optional<double> performance_metric(const PathWindow& window, const GlobalPath& path,
                                         double robot_max_speed);

// Sum of the clamped lateral clearances (min range in +/-5 degree sectors
// around each side) over the robot width. Open space gives 4 at width 0.5.
double narrowness_metric(const std::vector<double>& scan, const LidarSpec& lidar,
                         double robot_width);

// Occupied fraction of a 1 m x 1 m heading-aligned window whose rear edge
// passes through the robot center; sampled at grid resolution, off-map
// samples count as occupied.
double obstacle_density_metric(const OccupancyGrid& grid, const Pose& pose);

struct MetricsRecord {
    double d_obs = 0.0;
    double safety = 1.0;
    std::optional<double> performance;
    double narrowness = 0.0;
    double obstacle_density = 0.0;
};

}  // namespace navsim
