#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "navsim/kernels.hpp"
#include "navsim/planner.hpp"

namespace navsim {

double dwa_effective_radius(double radius, double v, double scaling_speed) {
    if (v <= scaling_speed) return radius;
    return radius * (1.0 + 0.2 * v / scaling_speed);
}

double open_side(const Pose& pose, const std::vector<Vec2>& cloud) {
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    double left = 0.0, right = 0.0;
    for (const Vec2& q : cloud) {
        double rx = q.x - pose.x, ry = q.y - pose.y;
        double ly = -s * rx + c * ry;
        double w = 1.0 / (1.0 + rx * rx + ry * ry);
        (ly >= 0.0 ? left : right) += w;
    }
    return left <= right ? 1.0 : -1.0;
}

double forward_clearance(const Pose& pose, const std::vector<Vec2>& cloud,
                         double half_width, double ahead) {
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    double best = ahead;
    for (const Vec2& q : cloud) {
        double rx = q.x - pose.x, ry = q.y - pose.y;
        double lx = c * rx + s * ry;
        double ly = -s * rx + c * ry;
        if (lx > 0.0 && lx < best && std::abs(ly) <= half_width) best = lx;
    }
    return best;
}

bool sweep_lane_clear(const Pose& pose, const std::vector<Vec2>& cloud) {
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    for (const Vec2& q : cloud) {
        double rx = q.x - pose.x, ry = q.y - pose.y;
        if (c * rx + s * ry > -0.05 && rx * rx + ry * ry < 0.42 * 0.42)
            return false;
    }
    return forward_clearance(pose, cloud, 0.42, 1.2) > 0.7;
}

namespace {

constexpr double kRolloutDt = 0.2;
constexpr double kCollisionMargin = 0.08;
constexpr double kClearanceCap = 1.0;
constexpr double kLookahead = 1.5;
constexpr double kGoalClearance = 0.40;
constexpr int kSpeedSamples = 5;
constexpr int kOmegaSamples = 21;
constexpr double kHeadingWeight = 0.6;
constexpr double kClearanceWeight = 0.25;
constexpr double kVelocityWeight = 0.15;
// Stall recovery budget: sweep/advance ticks before normal planning resumes.
constexpr int kEscapeTicks = 30;

class DwaPlanner final : public LocalPlanner {
  public:
    DwaPlanner(const PlannerConfig& cfg, const RobotSpec& spec) : cfg_(cfg), spec_(spec) {}

    Command tick(const RobotState& state, const std::vector<Vec2>& cloud,
                 const GlobalPath& path, std::size_t cursor) override {
        if (escape_ > 0) {
            // Sweep for a drivable heading: advance whenever the lane ahead
            // is clear, creep when pocketed so tightly that no heading ever
            // clears the full lane, otherwise keep rotating toward the open
            // side.
            --escape_;
            if (sweep_lane_clear(state.pose, cloud)) return {0.3, 0.0};
            if (forward_clearance(state.pose, cloud, 0.28, 0.8) > 0.4)
                return {0.12, 0.0};
            return {0.0, escape_omega_};
        }
        Vec2 local_goal = path.points.empty()
                              ? state.pose.position()
                              : pick_local_goal(path, cursor, cloud);
        // Window of speeds reachable within the rollout horizon; the chosen
        // speed is a setpoint the drive ramps toward under the accel limit.
        const double dv = spec_.max_accel * cfg_.sim_time;
        const double v_lo = std::max(0.0, state.v - dv);
        const double v_hi = std::min(cfg_.max_speed, state.v + dv);

        int steps = std::max(1, static_cast<int>(std::lround(cfg_.sim_time / kRolloutDt)));
        if (!path.points.empty()) {
            // Shrink the horizon near the route's end so rollouts do not
            // overshoot the goal and score every trajectory as misaligned.
            Vec2 g = path.points.back();
            double d_goal = std::hypot(g.x - state.pose.x, g.y - state.pose.y);
            int cap = static_cast<int>(std::ceil(
                d_goal / (std::max(cfg_.max_speed, 0.1) * kRolloutDt)));
            steps = std::max(1, std::min(steps, cap));
        }
        const double reach = std::max(0.05, v_hi * steps * kRolloutDt);
        const double d0 = std::hypot(local_goal.x - state.pose.x, local_goal.y - state.pose.y);
        const double near0 = nearest_dist(state.pose.position(), cloud);

        double best_score = -1.0;
        Command best{0.0, 0.0};
        bool any_admissible = false;
        for (int i = 0; i < kSpeedSamples; ++i) {
            double v = v_lo + (v_hi - v_lo) * i / (kSpeedSamples - 1);
            for (int j = 0; j < kOmegaSamples; ++j) {
                double om = -spec_.max_omega +
                            2.0 * spec_.max_omega * j / (kOmegaSamples - 1);
                double clearance;
                Pose end;
                if (!rollout(state.pose, state.v, v, om, steps, cloud, near0,
                             &clearance, &end))
                    continue;
                any_admissible = true;
                double score = kHeadingWeight * heading_score(end, local_goal, d0, reach) +
                               kClearanceWeight * clearance +
                               kVelocityWeight * (cfg_.max_speed > 0 ? v / cfg_.max_speed : 0.0);
                if (score > best_score) {
                    best_score = score;
                    best = {v, om};
                }
            }
        }
        if (!any_admissible) {
            // Everything collides: stop and rotate toward the local goal.
            double bearing = std::atan2(local_goal.y - state.pose.y,
                                        local_goal.x - state.pose.x);
            double err = wrap_angle(bearing - state.pose.theta);
            return {0.0, clamp(2.0 * err, -spec_.max_omega, spec_.max_omega)};
        }
        // Watch net displacement rather than commanded speed: a creeping
        // deadlock keeps the wheels nominally turning while going nowhere.
        // When three seconds pass without real progress away from the route's
        // end, rotate toward the more open side and sweep for a way out.
        bool at_route_end =
            !path.points.empty() &&
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
                return {0.0, escape_omega_};
            }
        }
        return best;
    }

  private:
    // Steering target: the path point one lookahead ahead of the cursor, or
    // the first point past it with room around it, so freshly sensed clutter
    // sitting on the path line does not pin the target inside itself.
    Vec2 pick_local_goal(const GlobalPath& path, std::size_t cursor,
                         const std::vector<Vec2>& cloud) {
        double s = path.arclen[cursor] + kLookahead;
        for (int k = 0; k < 12; ++k) {
            Vec2 g = path.point_at(s + 0.25 * k);
            if (nearest_dist(g, cloud) > kGoalClearance) return g;
        }
        return path.point_at(s);
    }

    // Mix of end-pose alignment with the local goal and actual progress made
    // toward it; progress keeps a stationary trajectory from ever winning.
    static double heading_score(const Pose& end, Vec2 goal, double d0, double reach) {
        double want = std::atan2(goal.y - end.y, goal.x - end.x);
        double align = 1.0 - std::abs(wrap_angle(want - end.theta)) / kPi;
        double dn = std::hypot(goal.x - end.x, goal.y - end.y);
        double progress = clamp((d0 - dn) / reach, 0.0, 1.0);
        return 0.5 * align + 0.5 * progress;
    }

    double nearest_dist(Vec2 p, const std::vector<Vec2>& cloud) {
        if (cloud.empty()) return std::numeric_limits<double>::infinity();
        scratch_.resize(cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i)
            scratch_[i] = sq(cloud[i].x - p.x) + sq(cloud[i].y - p.y);
        return std::sqrt(kernels::min_value(scratch_.data(), scratch_.size()));
    }

    // False if any rollout pose collides; otherwise reports the normalized
    // minimum clearance and the end pose. The speed ramps from v0 toward the
    // candidate setpoint under the accel limit, so deceleration lag is part
    // of the trajectory being judged rather than a surprise at execution.
    // A start that is already closer than the usual margin (wedged against a
    // face) keeps the arcs that do not come nearer than where it began, so
    // retreat stays admissible.
    bool rollout(const Pose& start, double v0, double v, double om, int steps,
                 const std::vector<Vec2>& cloud, double near0,
                 double* clearance, Pose* end) {
        const double r_eff = dwa_effective_radius(
            spec_.radius, std::max(v0, v), cfg_.scaling_speed);
        const double dv = spec_.max_accel * kRolloutDt;
        const double floor_d = std::min(r_eff + kCollisionMargin,
                                        std::max(near0 - 0.005, 0.265));
        Pose p = start;
        double vcur = v0;
        double min_clear = kClearanceCap;
        for (int k = 1; k <= steps; ++k) {
            vcur = vcur < v ? std::min(v, vcur + dv) : std::max(v, vcur - dv);
            p = integrate_arc(p, vcur, om, kRolloutDt);
            double near_k = nearest_dist(p.position(), cloud);
            if (near_k < floor_d) return false;
            min_clear = std::min(min_clear, near_k - r_eff);
        }
        *clearance = clamp(min_clear, 0.0, kClearanceCap) / kClearanceCap;
        *end = p;
        return true;
    }

    PlannerConfig cfg_;
    RobotSpec spec_;
    std::vector<double> scratch_;
    Vec2 anchor_{0.0, 0.0};
    int anchor_age_ = 0;
    int escape_ = 0;
    double escape_omega_ = 0.0;
};

}  // namespace

std::unique_ptr<LocalPlanner> make_dwa(const PlannerConfig& cfg, const RobotSpec& spec) {
    return std::make_unique<DwaPlanner>(cfg, spec);
}

std::unique_ptr<LocalPlanner> make_planner(const PlannerConfig& cfg, const RobotSpec& spec) {
    return cfg.planner == PlannerKind::Dwa ? make_dwa(cfg, spec) : make_teb(cfg, spec);
}

}  // namespace navsim
