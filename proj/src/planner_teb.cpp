#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "navsim/planner.hpp"

namespace navsim {

namespace {

constexpr int kBandPoints = 12;
constexpr double kBandSpacing = 0.2;   // band covers 2.2 m of path ahead
constexpr int kBandIterations = 20;
constexpr double kBandStep = 0.3;
constexpr double kPursuitDist = 0.6;
// Braking lane: obstacles this close to the robot's forward axis trigger the
// head-on brake; anything wider is steered around instead.
constexpr double kFrontHalfWidth = 0.30;
constexpr double kFrontAhead = 3.0;
// Stall recovery budget: sweep/advance ticks before normal planning resumes.
constexpr int kEscapeTicks = 30;

class TebPlanner final : public LocalPlanner {
  public:
    TebPlanner(const PlannerConfig& cfg, const RobotSpec& spec) : cfg_(cfg), spec_(spec) {}

    Command tick(const RobotState& state, const std::vector<Vec2>& cloud,
                 const GlobalPath& path, std::size_t cursor) override {
        return guard(state, cloud, plan(state, cloud, path, cursor));
    }

  private:
    // Momentum guard on every emitted command: simulate it with the drive's
    // accel ramp, and if the arc sweeps into grazing range, steer the decay
    // away from the nearest point instead. Rotation from near-standstill is
    // exempt: it barely moves the body and is how tight spots are resolved.
    Command guard(const RobotState& state, const std::vector<Vec2>& cloud, Command c) {
        if (cloud.empty() || (c.v < 1e-9 && state.v < 0.05)) return c;
        if (!arc_grazes(state, c.v, c.omega, cloud)) return c;
        Vec2 qn = nearest_point(state.pose.position(), cloud).second;
        double away = std::atan2(state.pose.y - qn.y, state.pose.x - qn.x);
        double e = wrap_angle(away - state.pose.theta);
        return {0.0, clamp(2.0 * e, -spec_.max_omega, spec_.max_omega)};
    }

    Command plan(const RobotState& state, const std::vector<Vec2>& cloud,
                 const GlobalPath& path, std::size_t cursor) {
        if (path.points.empty()) return {0.0, 0.0};
        if (escape_ > 0) {
            // Sweep for a drivable heading: advance whenever the lane ahead
            // is clear, creep when pocketed so tightly that no heading ever
            // clears the full lane, otherwise keep rotating toward the open
            // side. The momentum guard vetoes a creep that would graze.
            --escape_;
            if (sweep_lane_clear(state.pose, cloud)) return {0.3, 0.0};
            if (forward_clearance(state.pose, cloud, 0.28, 0.8) > 0.4)
                return {0.12, 0.0};
            return {0.0, escape_omega_};
        }
        // Watch net displacement: hunting in place (steer cycles, a band
        // pinned straight at a blocker) shows up as three seconds without
        // real progress; rotate toward the open side and sweep for a way
        // out, regrowing the band along the new heading.
        bool at_route_end =
            std::hypot(path.points.back().x - state.pose.x,
                       path.points.back().y - state.pose.y) < 1.5;
        if (++anchor_age_ >= 30) {
            double moved = std::hypot(state.pose.x - anchor_.x, state.pose.y - anchor_.y);
            bool stuck = !at_route_end && moved < 0.12;
            anchor_ = state.pose.position();
            anchor_age_ = 0;
            if (stuck) {
                escape_ = kEscapeTicks;
                escape_omega_ = open_side(state.pose, cloud) * 0.7 * spec_.max_omega;
                band_.clear();
                return {0.0, escape_omega_};
            }
        }
        refresh_band(state.pose.position(), path, cursor);

        const double standoff = cfg_.inflation_radius;
        const double rep_range = standoff + 0.25;
        // Repulsion gain grows with weight_obstacle; 50 maps to a full step.
        // The floor keeps low-weight bands bending late rather than not at all.
        const double gain = 0.5 + 0.5 * cfg_.weight_obstacle / 50.0;
        const int n = static_cast<int>(band_.size());
        // Stable side for deflecting head-on repulsion: a dead-ahead face
        // makes the lean cross-product a coin flip, and a side that flips
        // between ticks leaves the band oscillating instead of bending.
        const double tie_side = open_side(state.pose, cloud);
        for (int it = 0; it < kBandIterations; ++it) {
            for (int k = 1; k + 1 < n; ++k) {
                Vec2 tension = (band_[k - 1] + band_[k + 1]) * 0.5 - band_[k];
                Vec2 rep{0.0, 0.0};
                auto [d, q] = nearest_point(band_[k], cloud);
                if (d < rep_range && d > 1e-9) {
                    Vec2 away = (band_[k] - q) * (1.0 / d);
                    Vec2 tang = band_[k + 1] - band_[k - 1];
                    double tn = tang.norm();
                    if (tn > 1e-9) {
                        tang = tang * (1.0 / tn);
                        double along = tang.x * away.x + tang.y * away.y;
                        if (along < 0.0) {
                            // Head-on repulsion is anti-parallel to the band
                            // and cannot bend it; deflect sideways, toward
                            // whichever side the band already leans.
                            double cr = tang.x * away.y - tang.y * away.x;
                            double side = std::abs(cr) > 1e-3 ? (cr > 0.0 ? 1.0 : -1.0)
                                                              : tie_side;
                            Vec2 perp{-tang.y * side, tang.x * side};
                            away = away + perp * (-along);
                        }
                    }
                    rep = away * (gain * (rep_range - d));
                }
                band_[k] = band_[k] + (tension * 0.5 + rep) * kBandStep;
            }
        }

        // Pure pursuit on the first band point far enough ahead.
        Vec2 target = band_[n - 1];
        for (int k = 1; k < n; ++k) {
            if ((band_[k] - state.pose.position()).norm() >= kPursuitDist) {
                target = band_[k];
                break;
            }
        }
        double bearing = std::atan2(target.y - state.pose.y, target.x - state.pose.x);
        double err = wrap_angle(bearing - state.pose.theta);
        if (std::abs(err) > kPi / 3) {
            // Far off heading: rotate in place first.
            return {0.0, clamp(2.0 * err, -spec_.max_omega, spec_.max_omega)};
        }
        double ld = std::max(0.3, (target - state.pose.position()).norm());
        double curvature = 2.0 * std::sin(err) / ld;

        double v_cmd = cfg_.max_speed;
        // Curvature slowdown keeps the pursuit stable through turns.
        v_cmd *= 1.0 - 0.45 * std::min(1.0, std::abs(curvature) / 2.0);
        // Squeeze slowdown: clearance of the band ahead below the standoff
        // scales speed down proportionally.
        double c_min = std::numeric_limits<double>::infinity();
        for (int k = 1; k < n && k < kBandPoints / 2; ++k)
            c_min = std::min(c_min, nearest_point(band_[k], cloud).first);
        if (c_min < standoff) v_cmd *= std::max(0.3, c_min / standoff);
        // Head-on braking for obstacles inside the forward lane; goes all the
        // way to zero so a blocked lane means stop-and-steer, not ram.
        double d_front = forward_clearance(state.pose, cloud, kFrontHalfWidth, kFrontAhead);
        double brake_cap = std::sqrt(std::max(0.0, 2.0 * 3.0 * spec_.max_accel *
                                                       (d_front - 0.3)));
        v_cmd = std::min(v_cmd, brake_cap);
        if (v_cmd < 0.05 && std::abs(err) > 0.15) {
            // Braked to a stop with the band pointing off-axis: turn first.
            return {0.0, clamp(2.0 * err, -spec_.max_omega, spec_.max_omega)};
        }
        double omega = clamp(v_cmd * curvature, -spec_.max_omega, spec_.max_omega);
        return {clamp(v_cmd, 0.0, cfg_.max_speed), omega};
    }

    // The band persists across ticks so deflection accumulates while the
    // robot approaches; each tick consumes passed points at the head and
    // grows fresh ones from the path at the tail.
    void refresh_band(Vec2 robot, const GlobalPath& path, std::size_t cursor) {
        if (!band_.empty() && (band_[1] - robot).norm() > 2.5) band_.clear();
        if (band_.empty()) {
            tail_s_ = path.arclen[cursor];
            band_.push_back(robot);
            while (band_.size() < static_cast<std::size_t>(kBandPoints)) {
                tail_s_ += kBandSpacing;
                band_.push_back(path.point_at(tail_s_));
            }
            return;
        }
        band_[0] = robot;
        while (band_.size() > 2 && (band_[1] - robot).norm() < kBandSpacing * 0.5)
            band_.erase(band_.begin() + 1);
        // Keep the tail anchored ahead of the robot's progress along the path.
        tail_s_ = std::max(tail_s_, path.arclen[cursor]);
        while (band_.size() < static_cast<std::size_t>(kBandPoints) && tail_s_ < path.length() - 1e-9) {
            tail_s_ = std::min(tail_s_ + kBandSpacing, path.length());
            band_.push_back(path.point_at(tail_s_));
        }
    }

    // Short forward simulation of a command with the drive's accel ramp; true
    // if any pose comes nearer the cloud than a grazing floor. A start that is
    // already closer keeps arcs that do not come nearer than where it began.
    bool arc_grazes(const RobotState& state, double v, double om,
                    const std::vector<Vec2>& cloud) const {
        const double dt = 0.2, dv = spec_.max_accel * dt;
        const double near0 = nearest_point(state.pose.position(), cloud).first;
        const double floor_d = std::min(0.29, std::max(near0 - 0.005, 0.265));
        Pose p = state.pose;
        double vcur = state.v;
        for (int k = 0; k < 3; ++k) {
            vcur = vcur < v ? std::min(v, vcur + dv) : std::max(v, vcur - dv);
            p = integrate_arc(p, vcur, om, dt);
            if (nearest_point(p.position(), cloud).first < floor_d) return true;
        }
        return false;
    }

    static std::pair<double, Vec2> nearest_point(Vec2 p, const std::vector<Vec2>& cloud) {
        double best = std::numeric_limits<double>::infinity();
        Vec2 bq{0.0, 0.0};
        for (const Vec2& q : cloud) {
            double d = sq(q.x - p.x) + sq(q.y - p.y);
            if (d < best) {
                best = d;
                bq = q;
            }
        }
        return {std::sqrt(best), bq};
    }

    PlannerConfig cfg_;
    RobotSpec spec_;
    std::vector<Vec2> band_;
    double tail_s_ = 0.0;
    Vec2 anchor_{0.0, 0.0};
    int anchor_age_ = 0;
    int escape_ = 0;
    double escape_omega_ = 0.0;
};

}  // namespace

std::unique_ptr<LocalPlanner> make_teb(const PlannerConfig& cfg, const RobotSpec& spec) {
    return std::make_unique<TebPlanner>(cfg, spec);
}

}  // namespace navsim
