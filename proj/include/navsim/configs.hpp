#pragma once

#include <string>
#include <vector>

namespace navsim {

enum class PlannerKind { Dwa, Teb };

// One local-planner configuration. Ids follow
// {dwa|teb}_v{1,2}_a{0,1}_b{0,1}: v picks the speed cap, a and b pick the
// planner-specific knobs.
struct PlannerConfig {
    std::string id;
    PlannerKind planner = PlannerKind::Dwa;
    double max_speed = 1.0;        // v1 = 1.0, v2 = 0.5

    // DWA knobs.
    double sim_time = 1.5;         // a0 = 1.5 s, a1 = 3.0 s
    double scaling_speed = 0.25;   // b0 = 0.25, b1 = 0.75 (footprint scaling onset)

    // TEB knobs.
    double inflation_radius = 0.3;  // a0 = 0.3 m, a1 = 0.6 m
    double weight_obstacle = 10.0;  // b0 = 10, b1 = 50
};

// All 16 configurations in lexicographic id order.
const std::vector<PlannerConfig>& all_configs();

// Lookup by id; throws UnknownConfig.
const PlannerConfig& config_by_id(const std::string& id);

}  // namespace navsim
