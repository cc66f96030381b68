#pragma once

#include <memory>
#include <vector>

#include "navsim/configs.hpp"
#include "navsim/geometry.hpp"
#include "navsim/global_plan.hpp"
#include "navsim/robot.hpp"

namespace navsim {

struct Command {
    double v = 0.0;
    double omega = 0.0;
};

// Local planners perceive obstacles only through the lidar endpoint cloud
// (world-frame points from the current scan). The global path comes from the
// a-priori map; anything spawned after mapping is visible to the controller
// only when a beam hits it.
class LocalPlanner {
  public:
    virtual ~LocalPlanner() = default;
    // cursor: index of the path point nearest the robot, maintained by the
    // caller so progress along the route is monotone.
    virtual Command tick(const RobotState& state, const std::vector<Vec2>& cloud,
                         const GlobalPath& path, std::size_t cursor) = 0;
};

// Sampling planner: rolls candidate (v, omega) arcs out over sim_time and
// scores heading/clearance/velocity; the footprint grows with speed above
// scaling_speed, which is what makes low scaling_speed configs slow down to
// fit through gaps.
std::unique_ptr<LocalPlanner> make_dwa(const PlannerConfig& cfg, const RobotSpec& spec);

// Elastic-band planner: a short band of the global path is relaxed each tick
// under neighbor tension and obstacle repulsion with standoff
// inflation_radius, then tracked with pure pursuit; speed drops when the band
// is squeezed below the standoff or something sits dead ahead.
std::unique_ptr<LocalPlanner> make_teb(const PlannerConfig& cfg, const RobotSpec& spec);

std::unique_ptr<LocalPlanner> make_planner(const PlannerConfig& cfg, const RobotSpec& spec);

// Speed-scaled collision radius shared by the sampling planner and its tests.
double dwa_effective_radius(double radius, double v, double scaling_speed);

// Which side of the robot has more room: +1 left, -1 right. Used by both
// planners' stall recovery to pick a turn direction when boxed in head-on.
double open_side(const Pose& pose, const std::vector<Vec2>& cloud);

// Distance to the nearest cloud point inside the forward lane of the given
// half-width, looking `ahead` metres out.
double forward_clearance(const Pose& pose, const std::vector<Vec2>& cloud,
                         double half_width, double ahead);

// True when a stall-recovery sweep may advance: nothing crowds the forward
// half-plane (corner grazes included) and the lane ahead is clear.
bool sweep_lane_clear(const Pose& pose, const std::vector<Vec2>& cloud);

}  // namespace navsim
