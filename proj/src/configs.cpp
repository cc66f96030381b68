#include "navsim/configs.hpp"

#include "navsim/errors.hpp"

namespace navsim {

const std::vector<PlannerConfig>& all_configs() {
    static const std::vector<PlannerConfig> table = [] {
        std::vector<PlannerConfig> out;
        for (PlannerKind planner : {PlannerKind::Dwa, PlannerKind::Teb}) {
            for (int v = 1; v <= 2; ++v) {
                for (int a = 0; a <= 1; ++a) {
                    for (int b = 0; b <= 1; ++b) {
                        PlannerConfig c;
                        c.planner = planner;
                        c.id = (planner == PlannerKind::Dwa ? "dwa" : "teb");
                        c.id += "_v" + std::to_string(v) + "_a" + std::to_string(a) +
                                "_b" + std::to_string(b);
                        c.max_speed = v == 1 ? 1.0 : 0.5;
                        if (planner == PlannerKind::Dwa) {
                            c.sim_time = a == 0 ? 1.5 : 3.0;
                            c.scaling_speed = b == 0 ? 0.25 : 0.75;
                        } else {
                            c.inflation_radius = a == 0 ? 0.3 : 0.6;
                            c.weight_obstacle = b == 0 ? 10.0 : 50.0;
                        }
                        out.push_back(std::move(c));
                    }
                }
            }
        }
        return out;
    }();
    return table;
}

const PlannerConfig& config_by_id(const std::string& id) {
    for (const auto& c : all_configs())
        if (c.id == id) return c;
    throw UnknownConfig("unknown configuration id: " + id);
}

}  // namespace navsim
