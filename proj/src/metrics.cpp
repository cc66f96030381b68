#include "navsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "navsim/errors.hpp"
#include "navsim/kernels.hpp"

namespace navsim {

double safety_metric(double d_obs, double v, double max_accel) {
    if (max_accel <= 0.0) throw DomainError("max_accel must be positive");
    if (d_obs < 0.0) throw DomainError("obstacle distance cannot be negative");
    double d_brake = v * v / (2.0 * max_accel);
    if (d_brake <= 0.0) return 1.0;
    if (d_obs >= d_brake) return 1.0;
    return d_obs / d_brake;
}

double min_obstacle_distance(const std::vector<double>& scan) {
    if (scan.empty()) throw EmptyScan("scan has no beams");
    return kernels::min_value(scan.data(), scan.size());
}

void PathWindow::add(double t, Vec2 p) {
    if (!entries_.empty() && t < entries_.back().t)
        throw DomainError("window timestamps must be non-decreasing");
    entries_.push_back({t, p});
    while (!entries_.empty() && entries_.front().t < t - horizon_ - 1e-9)
        entries_.pop_front();
}

bool PathWindow::spans_horizon() const {
    return !entries_.empty() &&
           entries_.back().t - entries_.front().t >= horizon_ - 1e-9;
}

std::optional<double> performance_metric(const PathWindow& window, const GlobalPath& path,
                                         double robot_max_speed) {
    if (!window.spans_horizon() || path.points.empty() || robot_max_speed <= 0.0)
        return std::nullopt;
    double s_now = path.arclen[path.nearest(window.newest())];
    double s_then = path.arclen[path.nearest(window.oldest())];
    double d_ref = std::abs(s_now - s_then);
    double t_ref = d_ref / robot_max_speed;
    return clamp(t_ref / window.horizon(), 0.0, 1.0);
}

namespace {

double sector_min(const std::vector<double>& scan, const LidarSpec& lidar,
                  double center, double half_width) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scan.size(); ++k) {
        double a = lidar.angular_range * static_cast<double>(k) / lidar.beam_count;
        if (std::abs(wrap_angle(a - center)) <= half_width + 1e-12)
            best = std::min(best, scan[k]);
    }
    return best;
}

}  // namespace

double narrowness_metric(const std::vector<double>& scan, const LidarSpec& lidar,
                         double robot_width) {
    if (scan.empty()) throw EmptyScan("scan has no beams");
    if (robot_width <= 0.0) throw DomainError("robot width must be positive");
    const double half = 5.0 * kPi / 180.0;
    double left = sector_min(scan, lidar, kPi / 2, half);
    double right = sector_min(scan, lidar, -kPi / 2, half);
    if (!std::isfinite(left) || !std::isfinite(right))
        throw EmptyScan("no beams fall in a lateral sector");
    return (std::min(left, 1.0) + std::min(right, 1.0)) / robot_width;
}

double obstacle_density_metric(const OccupancyGrid& grid, const Pose& pose) {
    const double side = 1.0;
    const double res = grid.resolution();
    const int n = static_cast<int>(std::lround(side / res));
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    int occupied = 0;
    for (int i = 0; i < n; ++i) {
        double fx = (i + 0.5) * res;  // forward offset; rear edge at the robot
        for (int j = 0; j < n; ++j) {
            double fy = (j + 0.5) * res - side / 2;
            Vec2 p{pose.x + fx * c - fy * s, pose.y + fx * s + fy * c};
            if (grid.occupied_at(p)) ++occupied;
        }
    }
    return static_cast<double>(occupied) / (static_cast<double>(n) * n);
}

}  // namespace navsim
