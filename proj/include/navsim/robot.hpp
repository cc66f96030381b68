#pragma once

#include "navsim/geometry.hpp"

namespace navsim {

struct RobotSpec {
    double width = 0.5;        // footprint width; also the narrowness scale
    double length = 0.7;
    double radius = 0.25;      // bounding disc used for collisions
    double max_speed = 1.0;    // hardware cap; configs may cap lower
    double max_omega = 1.5;
    double max_accel = 0.15;   // symmetric accel/decel limit
    double control_dt = 0.1;
};

struct RobotState {
    Pose pose;
    double v = 0.0;
    double omega = 0.0;
};

// One control step: commanded speeds are clamped to the spec limits, linear
// speed changes at most max_accel*dt, then the pose advances along the exact
// arc (straight-line limit when |omega| is tiny).
RobotState step_kinematics(const RobotState& state, double v_cmd, double omega_cmd,
                           const RobotSpec& spec, double dt);

// Pose reached from `pose` after travelling with constant (v, omega) for dt.
Pose integrate_arc(const Pose& pose, double v, double omega, double dt);

}  // namespace navsim
