#include "navsim/robot.hpp"

#include <cmath>

namespace navsim {

Pose integrate_arc(const Pose& pose, double v, double omega, double dt) {
    Pose out = pose;
    if (std::abs(omega) < 1e-9) {
        out.x += v * dt * std::cos(pose.theta);
        out.y += v * dt * std::sin(pose.theta);
    } else {
        // Exact unicycle arc: radius v/omega around the instantaneous center.
        double r = v / omega;
        double th1 = pose.theta + omega * dt;
        out.x += r * (std::sin(th1) - std::sin(pose.theta));
        out.y += -r * (std::cos(th1) - std::cos(pose.theta));
        out.theta = wrap_angle(th1);
    }
    return out;
}

RobotState step_kinematics(const RobotState& state, double v_cmd, double omega_cmd,
                           const RobotSpec& spec, double dt) {
    v_cmd = clamp(v_cmd, 0.0, spec.max_speed);
    omega_cmd = clamp(omega_cmd, -spec.max_omega, spec.max_omega);
    double dv = clamp(v_cmd - state.v, -spec.max_accel * dt, spec.max_accel * dt);
    RobotState out;
    out.v = state.v + dv;
    out.omega = omega_cmd;  // no angular acceleration limit
    out.pose = integrate_arc(state.pose, out.v, out.omega, dt);
    return out;
}

}  // namespace navsim
