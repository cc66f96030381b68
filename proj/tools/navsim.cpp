#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "navsim/adaptation.hpp"
#include "navsim/configs.hpp"
#include "navsim/errors.hpp"
#include "navsim/global_plan.hpp"
#include "navsim/harness.hpp"
#include "navsim/mission.hpp"
#include "navsim/models.hpp"
#include "navsim/world.hpp"

namespace fs = std::filesystem;
using namespace navsim;

namespace {

struct GenEnvArgs {
    std::string type = "corridor";
    double width = 3.0;
    double length = 20.0;
    double aisle_width = 3.0;
    int clutter = 4;
    double obstacle_size = 0.5;
    uint64_t seed = 1;
    std::string out = "env";
};

void write_sidecar(const std::string& stem, const Pose& start,
                   const std::vector<Vec2>& waypoints, const std::string& base_grid) {
    nlohmann::json j;
    j["start"] = {start.x, start.y, start.theta};
    j["waypoints"] = nlohmann::json::array();
    for (const auto& w : waypoints) j["waypoints"].push_back({w.x, w.y});
    if (!base_grid.empty()) j["base_grid"] = base_grid;
    std::ofstream out(stem + ".json", std::ios::binary);
    if (!out) throw Error("cannot write " + stem + ".json");
    out << j.dump(2) << "\n";
}

int cmd_gen_env(const GenEnvArgs& a) {
    EnvironmentSpec spec;
    spec.clutterness = a.clutter;
    spec.obstacle_size = a.obstacle_size;
    spec.seed = a.seed;
    if (a.type == "corridor") {
        spec.kind = EnvironmentSpec::Kind::Corridor;
        spec.corridor_width = a.width;
        spec.corridor_length = a.length;
        CorridorEnv env = generate_corridor(spec);
        env.grid.save(a.out + ".grid");
        env.base_grid.save(a.out + ".base.grid");
        write_sidecar(a.out, env.start, {env.start.position(), env.goal.position()},
                      fs::path(a.out + ".base.grid").filename().string());
    } else if (a.type == "retail") {
        spec.kind = EnvironmentSpec::Kind::Retail;
        spec.aisle_width = a.aisle_width;
        RetailEnv env = generate_retail(spec);
        env.grid.save(a.out + ".grid");
        env.base_grid.save(a.out + ".base.grid");
        std::vector<Vec2> wps;
        for (const auto& p : env.waypoints) wps.push_back(p.position());
        write_sidecar(a.out, env.waypoints.front(), wps,
                      fs::path(a.out + ".base.grid").filename().string());
    } else {
        throw DomainError("unknown environment type: " + a.type);
    }
    std::cout << "wrote " << a.out << ".grid, " << a.out << ".base.grid, " << a.out
              << ".json\n";
    return 0;
}

struct RunArgs {
    std::string map;
    std::string config = "teb_v1_a0_b0";
    std::string out = "run.csv";
    std::string kb_path;
    int mode = 1;
    bool adapt = false;
    uint64_t seed = 1;
};

int cmd_run(const RunArgs& a) {
    OccupancyGrid grid = OccupancyGrid::load(a.map);
    std::optional<OccupancyGrid> base;
    MissionSpec ms;
    ms.robot = RobotSpec{};
    ms.lidar = LidarSpec{};
    ms.seed = a.seed;

    const std::string stem = (fs::path(a.map).parent_path() /
                              fs::path(a.map).stem()).string();
    if (fs::exists(stem + ".json")) {
        std::ifstream in(stem + ".json", std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(ss.str());
            auto s = j.at("start");
            ms.start_pose = {s.at(0).get<double>(), s.at(1).get<double>(),
                             s.at(2).get<double>()};
            for (const auto& w : j.at("waypoints"))
                ms.waypoints.push_back({w.at(0).get<double>(), w.at(1).get<double>()});
            if (j.contains("base_grid")) {
                fs::path bp = fs::path(a.map).parent_path() /
                              j["base_grid"].get<std::string>();
                if (fs::exists(bp)) base = OccupancyGrid::load(bp.string());
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("sidecar JSON invalid: ") + e.what());
        }
    } else {
        // No sidecar: straight route across the middle of the map.
        double yc = grid.world_height() / 2;
        ms.start_pose = {1.0, yc, 0.0};
        ms.waypoints = {{1.0, yc}, {grid.world_width() - 1.0, yc}};
    }
    ms.grid = &grid;
    ms.base_grid = base ? &*base : &grid;

    RunLog log;
    if (a.adapt || !a.kb_path.empty()) {
        if (a.kb_path.empty()) throw DomainError("adaptive run needs --kb");
        KnowledgeBase kb = KnowledgeBase::load(a.kb_path);
        MetaParams params;
        params.mode = a.mode == 0   ? ReasonerMode::BestEffort
                      : a.mode == 2 ? ReasonerMode::Revert
                                    : ReasonerMode::Predictive;
        Metacontroller ctrl(kb, params);
        log = run_mission(ms, ctrl);
        std::ofstream dec(a.out + ".decisions.csv", std::ios::binary);
        dec << ctrl.decision_log();
    } else {
        config_by_id(a.config);
        FixedController ctrl(a.config);
        log = run_mission(ms, ctrl);
    }
    log.save(a.out);
    std::cout << "outcome=" << log.outcome() << " duration=" << log.duration()
              << "s rows=" << log.rows.size() << "\n";
    return 0;
}

Manifest load_manifest(const std::string& path) {
    if (path.empty()) return Manifest{};
    return Manifest::load(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D navigation simulator with a self-adaptive planner stack"};
    app.require_subcommand(1);

    GenEnvArgs ge;
    auto* sc_gen = app.add_subcommand("gen-env", "Generate an environment map");
    sc_gen->add_option("--type", ge.type, "corridor or retail")
        ->check(CLI::IsMember({"corridor", "retail"}));
    sc_gen->add_option("--width", ge.width, "corridor free width [m] (default 3)");
    sc_gen->add_option("--length", ge.length, "corridor length [m] (default 20)");
    sc_gen->add_option("--aisle-width", ge.aisle_width, "retail aisle width [m] (default 3)");
    sc_gen->add_option("--clutter", ge.clutter,
                       "obstacle count (corridor total / retail per area, default 4)");
    sc_gen->add_option("--obstacle-size", ge.obstacle_size, "square side [m] (default 0.5)");
    sc_gen->add_option("--seed", ge.seed, "generator seed (default 1)");
    sc_gen->add_option("--out", ge.out, "output stem; writes <out>.grid/.base.grid/.json");

    RunArgs ra;
    auto* sc_run = app.add_subcommand("run", "Run a single mission on a map");
    sc_run->add_option("--map", ra.map, "map file (.grid)")->required();
    sc_run->add_option("--config", ra.config,
                       "planner configuration id (default teb_v1_a0_b0)");
    sc_run->add_option("--out", ra.out, "run log path (default run.csv)");
    sc_run->add_option("--kb", ra.kb_path, "knowledge base JSON; enables adaptation");
    sc_run->add_option("--mode", ra.mode,
                       "reasoner mode 0/1/2 for adaptive runs (default 1)");
    sc_run->add_flag("--adapt", ra.adapt, "run under the metacontroller (needs --kb)");
    sc_run->add_option("--seed", ra.seed, "mission seed (default 1)");

    std::string manifest_path, out_dir;
    int jobs = 0, degree = 0, mode = -1, reps = 0;
    uint64_t seed = 0;
    bool have_seed = false;

    auto add_common = [&](CLI::App* sc, bool with_jobs) {
        sc->add_option("--manifest", manifest_path, "manifest JSON path");
        sc->add_option("--out", out_dir, "output directory (default out/run)");
        sc->add_option("--seed", seed, "base seed override (default 1)")
            ->each([&](const std::string&) { have_seed = true; });
        if (with_jobs) sc->add_option("--jobs", jobs, "worker threads (default 1)");
    };

    auto* sc_collect = app.add_subcommand(
        "collect", "Run all 16 configurations over the training corridors");
    add_common(sc_collect, true);

    auto* sc_train = app.add_subcommand(
        "train", "Fit per-configuration safety models from collected logs "
                 "(degree 4 polynomial, threshold 0.6 by default)");
    add_common(sc_train, true);
    sc_train->add_option("--degree", degree, "polynomial degree override (default 4)");

    auto* sc_bench = app.add_subcommand(
        "benchmark", "Run mros_qm/mros/s0/s1 over the retail missions "
                     "(latencies 97/520/16/3575 ms)");
    add_common(sc_bench, true);
    sc_bench->add_option("--mode", mode, "mros_qm reasoner mode, 1 or 2 (default 1)");
    sc_bench->add_option("--reps", reps, "repetitions per mission type (default 10)");

    std::vector<int> sweep_degrees = {1, 2, 3, 4, 5, 6};
    auto* sc_sweep = app.add_subcommand(
        "sweep-degree", "Re-train at several polynomial degrees and tabulate fit quality");
    add_common(sc_sweep, true);
    sc_sweep->add_option("--degrees", sweep_degrees, "degrees to sweep (default 1..6)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sc_gen->parsed()) return cmd_gen_env(ge);
        if (sc_run->parsed()) return cmd_run(ra);

        Manifest m = load_manifest(manifest_path);
        if (!out_dir.empty()) m.out_dir = out_dir;
        if (have_seed) m.base_seed = seed;
        if (jobs > 0) m.jobs = jobs;
        if (degree > 0) m.degree = degree;
        if (mode >= 0) m.reasoner_mode = mode;
        if (reps > 0) m.reps = reps;

        if (sc_collect->parsed()) {
            CollectStats st = run_collect(m);
            std::cout << "collected " << st.missions << " missions (" << st.goals
                      << " goal, " << st.collisions << " collision, " << st.timeouts
                      << " timeout), " << st.rows << " rows\n";
        } else if (sc_train->parsed()) {
            TrainResult tr = run_train(m);
            m.save(m.out_dir + "/manifest.json");
            std::printf("%-14s %8s %9s %9s %9s %9s\n", "config", "rows", "train_r2",
                        "test_r2", "test_mse", "avg_perf");
            for (const auto& r : tr.rows)
                std::printf("%-14s %8zu %9.4f %9.4f %9.4f %9.4f\n", r.config_id.c_str(),
                            r.rows, r.train_r2, r.test_r2, r.test_mse, r.avg_performance);
            std::cout << "initial_config=" << tr.kb.initial_config << "\n";
        } else if (sc_bench->parsed()) {
            BenchmarkResult br = run_benchmark(m);
            std::cout << benchmark_csv(br.cells);
            std::cout << "collisions=" << br.collisions << " timeouts=" << br.timeouts
                      << "\n";
        } else if (sc_sweep->parsed()) {
            std::printf("%-7s %12s %12s %12s\n", "degree", "mean_test_r2", "min_test_r2",
                        "mean_test_mse");
            for (int d : sweep_degrees) {
                Manifest md = m;
                md.degree = d;
                TrainResult tr = run_train(md);
                double sum_r2 = 0.0, min_r2 = 1.0, sum_mse = 0.0;
                for (const auto& r : tr.rows) {
                    sum_r2 += r.test_r2;
                    min_r2 = std::min(min_r2, r.test_r2);
                    sum_mse += r.test_mse;
                }
                double n = static_cast<double>(tr.rows.size());
                std::printf("%-7d %12.4f %12.4f %12.4f\n", d, sum_r2 / n, min_r2,
                            sum_mse / n);
            }
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
