#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "navsim/configs.hpp"
#include "navsim/geometry.hpp"
#include "navsim/grid.hpp"
#include "navsim/metrics.hpp"
#include "navsim/robot.hpp"
#include "navsim/world.hpp"

namespace navsim {

struct RunLogRow {
    double t = 0.0;
    double x = 0.0, y = 0.0, theta = 0.0;
    double v = 0.0, omega = 0.0;
    std::string config_id;
    double d_obs = 0.0;
    double safety = 1.0;
    std::optional<double> performance;  // empty cell while undefined
    double narrowness = 0.0;
    double obstacle_density = 0.0;
    std::string event = "-";  // -, adapt_start, adapt_done, goal, collision, timeout
};

struct RunLog {
    static constexpr const char* kHeader =
        "t,x,y,theta,v,omega,config_id,d_obs,safety,performance,narrowness,"
        "obstacle_density,event";

    std::vector<RunLogRow> rows;

    // Terminal event of the run ("goal", "collision", "timeout"), or "none"
    // for an empty/truncated log.
    std::string outcome() const;
    double duration() const { return rows.empty() ? 0.0 : rows.back().t; }

    std::string serialize() const;
    static RunLog parse(const std::string& text);
    void save(const std::string& path) const;
    static RunLog load(const std::string& path);
};

// Per-tick decision source. run_mission calls tick exactly once per control
// step, before the planner runs, with the metrics row about to be logged.
class MissionController {
  public:
    struct Decision {
        std::string config_id;    // config active this tick
        bool dead_time = false;   // true -> commands forced to (0, 0)
        bool adapt_start = false; // annotate this row
        bool adapt_done = false;
    };
    virtual ~MissionController() = default;
    virtual Decision tick(double t, const MetricsRecord& metrics) = 0;
};

// Always the same configuration; never adapts.
class FixedController final : public MissionController {
  public:
    explicit FixedController(std::string config_id) : id_(std::move(config_id)) {}
    Decision tick(double, const MetricsRecord&) override { return {id_, false, false, false}; }

  private:
    std::string id_;
};

struct MissionSpec {
    const OccupancyGrid* grid = nullptr;       // ground truth
    const OccupancyGrid* base_grid = nullptr;  // a-priori map for global planning
    std::vector<Vec2> waypoints;               // start first, goal last
    Pose start_pose;
    RobotSpec robot;
    LidarSpec lidar;
    uint64_t seed = 0;
    double goal_tolerance = 0.3;
    double timeout_factor = 5.0;  // times the straight-line reference time
};

// Simulates one mission tick by tick: scan, metrics, controller decision,
// local planner (or dead-time stop), kinematics, then terminal checks. The
// terminal event lands on one extra final row.
RunLog run_mission(const MissionSpec& spec, MissionController& controller);

}  // namespace navsim
