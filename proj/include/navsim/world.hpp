#pragma once

#include <cstdint>
#include <vector>

#include "navsim/geometry.hpp"
#include "navsim/grid.hpp"

namespace navsim {

struct EnvironmentSpec {
    enum class Kind { Corridor, Retail };
    Kind kind = Kind::Corridor;
    double corridor_width = 3.0;   // corridor: free width between walls
    double corridor_length = 20.0;
    // Retail: aisle width between shelf faces.
    double aisle_width = 3.0;
    // Corridor: total spawned obstacles. Retail: obstacles per area.
    int clutterness = 0;
    double obstacle_size = 0.5;  // square side
    uint64_t seed = 0;
};

struct CorridorEnv {
    OccupancyGrid grid;       // walls + spawned obstacles (ground truth)
    OccupancyGrid base_grid;  // walls only; what the global planner knows
    Pose start;
    Pose goal;
};

struct RetailEnv {
    OccupancyGrid grid;
    OccupancyGrid base_grid;  // shelves + walls, no spawned obstacles
    std::vector<Pose> waypoints;
    // Spawn areas (axis-aligned), exposed for density comparisons in tests.
    double area_x0 = 0.0, area_x1 = 0.0;
    double area1_y0 = 0.0, area1_y1 = 0.0;
    double area2_y0 = 0.0, area2_y1 = 0.0;
};

// Corridor runs along +x; start near the left end, goal near the right end.
// Spawned obstacles follow a fixed archetype cycle (center gate pair, wall
// spill, open block) so each clutterness level exercises both tight passages
// and plain passes.
CorridorEnv generate_corridor(const EnvironmentSpec& spec);

// Procedural aisle map: 4 parallel aisles between shelf rows, cross-corridors
// at both ends. The mission route runs out along aisle 1 and back along
// aisle 2; obstacles spawn inside Area1 (aisle 1) and Area2 (aisle 2) using
// archetypes (constriction pair, blinder+ambusher pair, turn satellite,
// scatter) keyed to the per-area count.
RetailEnv generate_retail(const EnvironmentSpec& spec);

struct LidarSpec {
    int beam_count = 360;
    double angular_range = 2.0 * kPi;
    double max_range = 5.0;
    double noise_std = 0.0;
};

// Distance to the first occupied cell along the ray, clamped to max_range;
// 0 if the origin cell is occupied. Grid-traversal visits every cell the ray
// passes through.
double raycast(const OccupancyGrid& grid, Vec2 origin, double angle, double max_range);

class Rng;

// beam k points at pose.theta + k * angular_range / beam_count (ccw).
// Gaussian noise (if enabled) is added per beam and clamped to [0, max_range];
// rng may be null when noise_std == 0.
std::vector<double> lidar_scan(const OccupancyGrid& grid, const Pose& pose,
                               const LidarSpec& lidar, Rng* rng = nullptr);

}  // namespace navsim
