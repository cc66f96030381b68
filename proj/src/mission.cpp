#include "navsim/mission.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "navsim/errors.hpp"
#include "navsim/global_plan.hpp"
#include "navsim/planner.hpp"
#include "navsim/rng.hpp"

namespace navsim {

namespace {

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, const char* field) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw ParseError("");
        return v;
    } catch (...) {
        throw ParseError(std::string("bad numeric field '") + field + "': " + s);
    }
}

}  // namespace

std::string RunLog::outcome() const {
    if (rows.empty()) return "none";
    const std::string& e = rows.back().event;
    if (e == "goal" || e == "collision" || e == "timeout") return e;
    return "none";
}

std::string RunLog::serialize() const {
    std::string out = kHeader;
    out.push_back('\n');
    for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.1f", r.t);
        out += buf;
        out.push_back(',');
        out += format_num(r.x) + "," + format_num(r.y) + "," + format_num(r.theta) + ",";
        out += format_num(r.v) + "," + format_num(r.omega) + ",";
        out += r.config_id + ",";
        out += format_num(r.d_obs) + "," + format_num(r.safety) + ",";
        if (r.performance) out += format_num(*r.performance);
        out += "," + format_num(r.narrowness) + "," + format_num(r.obstacle_density) + ",";
        out += r.event;
        out.push_back('\n');
    }
    return out;
}

RunLog RunLog::parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("run log is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw ParseError("run log header mismatch");
    RunLog log;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto f = split_csv(line);
        if (f.size() != 13)
            throw ParseError("run log line " + std::to_string(line_no) + " has " +
                             std::to_string(f.size()) + " fields, want 13");
        RunLogRow r;
        r.t = parse_num(f[0], "t");
        r.x = parse_num(f[1], "x");
        r.y = parse_num(f[2], "y");
        r.theta = parse_num(f[3], "theta");
        r.v = parse_num(f[4], "v");
        r.omega = parse_num(f[5], "omega");
        r.config_id = f[6];
        r.d_obs = parse_num(f[7], "d_obs");
        r.safety = parse_num(f[8], "safety");
        if (!f[9].empty()) r.performance = parse_num(f[9], "performance");
        r.narrowness = parse_num(f[10], "narrowness");
        r.obstacle_density = parse_num(f[11], "obstacle_density");
        r.event = f[12];
        log.rows.push_back(std::move(r));
    }
    return log;
}

void RunLog::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << serialize();
}

RunLog RunLog::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

RunLog run_mission(const MissionSpec& spec, MissionController& controller) {
    if (!spec.grid || !spec.base_grid) throw DomainError("mission needs both grids");
    if (spec.waypoints.size() < 2) throw DomainError("mission needs start and goal");

    const double res = spec.grid->resolution();
    GlobalPath path = plan_route(*spec.base_grid, spec.waypoints, spec.robot.radius + res);
    DistanceField truth(*spec.grid);

    double straight = 0.0;
    for (std::size_t i = 0; i + 1 < spec.waypoints.size(); ++i)
        straight += (spec.waypoints[i + 1] - spec.waypoints[i]).norm();
    const double t_max = spec.timeout_factor * straight / spec.robot.max_speed;

    Rng lidar_rng(derive_seed(spec.seed, "lidar"));
    RobotState state{spec.start_pose, 0.0, 0.0};
    const Vec2 goal = spec.waypoints.back();
    const double dt = spec.robot.control_dt;
    // Planner perception range: generous over the longest braking distance.
    const double cloud_range = std::min(spec.lidar.max_range - 1e-6, 3.6);

    PathWindow window;
    std::size_t cursor = 0;
    RunLog log;
    std::string active_id;
    std::unique_ptr<LocalPlanner> planner;

    auto observe = [&](const Pose& pose, double v, std::vector<double>* scan_out,
                       std::vector<Vec2>* cloud_out) -> MetricsRecord {
        auto scan = lidar_scan(*spec.grid, pose, spec.lidar, &lidar_rng);
        MetricsRecord m;
        m.d_obs = min_obstacle_distance(scan);
        m.safety = safety_metric(m.d_obs, v, spec.robot.max_accel);
        m.performance = performance_metric(window, path, spec.robot.max_speed);
        m.narrowness = narrowness_metric(scan, spec.lidar, spec.robot.width);
        m.obstacle_density = obstacle_density_metric(*spec.grid, pose);
        if (cloud_out) {
            cloud_out->clear();
            for (std::size_t k = 0; k < scan.size(); ++k) {
                if (scan[k] >= cloud_range) continue;
                double a = pose.theta +
                           spec.lidar.angular_range * static_cast<double>(k) /
                               spec.lidar.beam_count;
                cloud_out->push_back(
                    {pose.x + scan[k] * std::cos(a), pose.y + scan[k] * std::sin(a)});
            }
        }
        if (scan_out) *scan_out = std::move(scan);
        return m;
    };

    auto push_row = [&](double t, const RobotState& st, const MetricsRecord& m,
                        const std::string& event) {
        RunLogRow r;
        r.t = t;
        r.x = st.pose.x;
        r.y = st.pose.y;
        r.theta = st.pose.theta;
        r.v = st.v;
        r.omega = st.omega;
        r.config_id = active_id;
        r.d_obs = m.d_obs;
        r.safety = m.safety;
        r.performance = m.performance;
        r.narrowness = m.narrowness;
        r.obstacle_density = m.obstacle_density;
        r.event = event;
        log.rows.push_back(std::move(r));
    };

    const long max_ticks = static_cast<long>(std::ceil(t_max / dt)) + 2;
    for (long i = 0; i < max_ticks; ++i) {
        const double t = static_cast<double>(i) * dt;
        window.add(t, state.pose.position());
        std::vector<Vec2> cloud;
        MetricsRecord m = observe(state.pose, state.v, nullptr, &cloud);

        auto decision = controller.tick(t, m);
        if (decision.config_id != active_id) {
            active_id = decision.config_id;
            planner = make_planner(config_by_id(active_id), spec.robot);
        }

        std::string event = "-";
        if (decision.adapt_start) event = "adapt_start";
        if (decision.adapt_done) event = "adapt_done";
        push_row(t, state, m, event);

        Command cmd{0.0, 0.0};
        if (!decision.dead_time) {
            cmd = planner->tick(state, cloud, path, cursor);
            // Approach cap: never arrive faster than the decel limit allows.
            double d_goal = (goal - state.pose.position()).norm();
            double cap = std::sqrt(2.0 * spec.robot.max_accel * std::max(0.0, d_goal)) + 0.05;
            cmd.v = std::min(cmd.v, cap);
        }
        state = step_kinematics(state, cmd.v, cmd.omega, spec.robot, dt);

        // Monotone path cursor: nearest point in a forward window.
        {
            double best_d = std::numeric_limits<double>::infinity();
            std::size_t best = cursor;
            std::size_t hi = std::min(path.points.size(), cursor + 60);
            for (std::size_t k = cursor; k < hi; ++k) {
                double d = (path.points[k] - state.pose.position()).norm();
                if (d < best_d - 1e-12) {
                    best_d = d;
                    best = k;
                }
            }
            cursor = best;
        }

        const double t_next = static_cast<double>(i + 1) * dt;
        std::string terminal;
        if (truth.sample(state.pose.position()) < spec.robot.radius + 0.25 * res)
            terminal = "collision";
        else if ((state.pose.position() - goal).norm() <= spec.goal_tolerance)
            terminal = "goal";
        else if (t_next >= t_max)
            terminal = "timeout";
        if (!terminal.empty()) {
            window.add(t_next, state.pose.position());
            MetricsRecord mt = observe(state.pose, state.v, nullptr, nullptr);
            push_row(t_next, state, mt, terminal);
            break;
        }
    }
    return log;
}

}  // namespace navsim
