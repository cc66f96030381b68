#include "navsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "navsim/configs.hpp"
#include "navsim/errors.hpp"
#include "navsim/rng.hpp"

namespace fs = std::filesystem;

namespace navsim {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Runs fn(0..n-1) over `jobs` worker threads; each result index is owned by
// exactly one task, so aggregation afterwards is order-deterministic.
void run_indexed(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void write_file(const std::string& path, const std::string& text) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace

std::string Manifest::serialize() const {
    nlohmann::json j;
    j["base_seed"] = base_seed;
    j["out_dir"] = out_dir;
    j["jobs"] = jobs;
    j["training"] = {{"corridor_length", corridor_length},
                     {"corridor_widths", corridor_widths},
                     {"corridor_clutter", corridor_clutter},
                     {"instances", instances},
                     {"obstacle_size", training_obstacle_size}};
    j["fitting"] = {{"degree", degree}, {"safety_threshold", safety_threshold}};
    j["benchmark"] = {{"reps", reps},
                      {"aisle_width", aisle_width},
                      {"obstacle_size", benchmark_obstacle_size},
                      {"mission_clutter", mission_clutter},
                      {"reasoner_mode", reasoner_mode}};
    j["latencies"] = {{"monitor_period", meta.monitor_period},
                      {"analyze", meta.analyze_latency},
                      {"plan", meta.plan_latency},
                      {"plan_fast", meta.plan_latency_fast},
                      {"execute", meta.execute_latency},
                      {"monitor_window", meta.monitor_window}};
    j["robot"] = {{"width", robot.width},       {"length", robot.length},
                  {"radius", robot.radius},     {"max_speed", robot.max_speed},
                  {"max_omega", robot.max_omega}, {"max_accel", robot.max_accel},
                  {"control_dt", robot.control_dt}};
    j["lidar"] = {{"beam_count", lidar.beam_count},
                  {"angular_range", lidar.angular_range},
                  {"max_range", lidar.max_range},
                  {"noise_std", lidar.noise_std}};
    return j.dump(2) + "\n";
}

Manifest Manifest::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest JSON malformed: ") + e.what());
    }
    Manifest m;  // defaults; manifest keys override
    try {
        m.base_seed = j.value("base_seed", m.base_seed);
        m.out_dir = j.value("out_dir", m.out_dir);
        m.jobs = j.value("jobs", m.jobs);
        if (j.contains("training")) {
            const auto& t = j["training"];
            m.corridor_length = t.value("corridor_length", m.corridor_length);
            m.corridor_widths = t.value("corridor_widths", m.corridor_widths);
            m.corridor_clutter = t.value("corridor_clutter", m.corridor_clutter);
            m.instances = t.value("instances", m.instances);
            m.training_obstacle_size = t.value("obstacle_size", m.training_obstacle_size);
        }
        if (j.contains("fitting")) {
            const auto& f = j["fitting"];
            m.degree = f.value("degree", m.degree);
            m.safety_threshold = f.value("safety_threshold", m.safety_threshold);
        }
        if (j.contains("benchmark")) {
            const auto& b = j["benchmark"];
            m.reps = b.value("reps", m.reps);
            m.aisle_width = b.value("aisle_width", m.aisle_width);
            m.benchmark_obstacle_size = b.value("obstacle_size", m.benchmark_obstacle_size);
            m.mission_clutter = b.value("mission_clutter", m.mission_clutter);
            m.reasoner_mode = b.value("reasoner_mode", m.reasoner_mode);
        }
        if (j.contains("latencies")) {
            const auto& l = j["latencies"];
            m.meta.monitor_period = l.value("monitor_period", m.meta.monitor_period);
            m.meta.analyze_latency = l.value("analyze", m.meta.analyze_latency);
            m.meta.plan_latency = l.value("plan", m.meta.plan_latency);
            m.meta.plan_latency_fast = l.value("plan_fast", m.meta.plan_latency_fast);
            m.meta.execute_latency = l.value("execute", m.meta.execute_latency);
            m.meta.monitor_window = l.value("monitor_window", m.meta.monitor_window);
        }
        if (j.contains("robot")) {
            const auto& r = j["robot"];
            m.robot.width = r.value("width", m.robot.width);
            m.robot.length = r.value("length", m.robot.length);
            m.robot.radius = r.value("radius", m.robot.radius);
            m.robot.max_speed = r.value("max_speed", m.robot.max_speed);
            m.robot.max_omega = r.value("max_omega", m.robot.max_omega);
            m.robot.max_accel = r.value("max_accel", m.robot.max_accel);
            m.robot.control_dt = r.value("control_dt", m.robot.control_dt);
        }
        if (j.contains("lidar")) {
            const auto& l = j["lidar"];
            m.lidar.beam_count = l.value("beam_count", m.lidar.beam_count);
            m.lidar.angular_range = l.value("angular_range", m.lidar.angular_range);
            m.lidar.max_range = l.value("max_range", m.lidar.max_range);
            m.lidar.noise_std = l.value("noise_std", m.lidar.noise_std);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest JSON has bad field types: ") + e.what());
    }
    return m;
}

Manifest Manifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Manifest::save(const std::string& path) const { write_file(path, serialize()); }

namespace {

struct TrainCase {
    double width;
    int clutter;
    int env_index;
    int instance;
};

std::vector<TrainCase> training_cases(const Manifest& m) {
    std::vector<TrainCase> cases;
    int env_index = 0;
    for (double w : m.corridor_widths) {
        for (int c : m.corridor_clutter) {
            for (int k = 0; k < m.instances; ++k)
                cases.push_back({w, c, env_index, k});
            ++env_index;
        }
    }
    return cases;
}

std::string collect_log_path(const Manifest& m, const std::string& config_id,
                             const TrainCase& tc) {
    return m.out_dir + "/logs/collect/" + config_id + "/w" + fmt_g(tc.width) + "_c" +
           std::to_string(tc.clutter) + "_i" + std::to_string(tc.instance) + ".csv";
}

uint64_t training_map_seed(const Manifest& m, const TrainCase& tc) {
    // The map depends on environment type and instance only, never on the
    // configuration: all 16 configs see identical maps.
    uint64_t root = derive_seed(m.base_seed, "train-map");
    return derive_seed(root, static_cast<uint64_t>(tc.env_index) * 1000 +
                                 static_cast<uint64_t>(tc.instance));
}

CorridorEnv training_env(const Manifest& m, const TrainCase& tc) {
    EnvironmentSpec spec;
    spec.kind = EnvironmentSpec::Kind::Corridor;
    spec.corridor_width = tc.width;
    spec.corridor_length = m.corridor_length;
    spec.clutterness = tc.clutter;
    spec.obstacle_size = m.training_obstacle_size;
    spec.seed = training_map_seed(m, tc);
    return generate_corridor(spec);
}

}  // namespace

CollectStats run_collect(const Manifest& m) {
    const auto& configs = all_configs();
    auto cases = training_cases(m);
    struct Task {
        std::size_t config;
        std::size_t tcase;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < configs.size(); ++c)
        for (std::size_t t = 0; t < cases.size(); ++t) tasks.push_back({c, t});

    std::vector<RunAggregate> agg(tasks.size());
    std::vector<std::size_t> rows(tasks.size());
    run_indexed(tasks.size(), m.jobs, [&](std::size_t i) {
        const auto& cfg = configs[tasks[i].config];
        const auto& tc = cases[tasks[i].tcase];
        CorridorEnv env = training_env(m, tc);
        MissionSpec ms;
        ms.grid = &env.grid;
        ms.base_grid = &env.base_grid;
        ms.waypoints = {env.start.position(), env.goal.position()};
        ms.start_pose = env.start;
        ms.robot = m.robot;
        ms.lidar = m.lidar;
        ms.seed = derive_seed(training_map_seed(m, tc), cfg.id);
        FixedController ctrl(cfg.id);
        RunLog log = run_mission(ms, ctrl);
        write_file(collect_log_path(m, cfg.id, tc), log.serialize());
        agg[i] = aggregate_run(log, m.safety_threshold, m.robot.control_dt);
        rows[i] = log.rows.size();
    });

    CollectStats stats;
    stats.missions = static_cast<int>(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        stats.rows += rows[i];
        if (agg[i].outcome == "goal") ++stats.goals;
        else if (agg[i].outcome == "collision") ++stats.collisions;
        else ++stats.timeouts;
    }
    Manifest echo = m;
    echo.save(m.out_dir + "/manifest.json");
    return stats;
}

RunAggregate aggregate_run(const RunLog& log, double threshold, double dt) {
    RunAggregate a;
    a.outcome = log.outcome();
    a.ttc = log.duration();
    if (log.rows.empty()) return a;
    double sum = 0.0;
    int unsafe = 0;
    for (const auto& r : log.rows) {
        sum += r.safety;
        if (r.safety < threshold) ++unsafe;
    }
    a.mean_safety = sum / static_cast<double>(log.rows.size());
    a.time_unsafe = dt * unsafe;
    return a;
}

Dataset dataset_from_logs(const std::vector<std::vector<std::string>>& run_paths) {
    Dataset data;
    for (const auto& run : run_paths) {
        std::vector<DataPoint> rows;
        for (const auto& path : run) {
            RunLog log = RunLog::load(path);
            for (const auto& r : log.rows)
                rows.push_back({r.narrowness, r.obstacle_density, r.safety});
        }
        data.runs.push_back(std::move(rows));
    }
    return data;
}

TrainResult run_train(const Manifest& m) {
    const auto& configs = all_configs();
    auto cases = training_cases(m);
    fs::create_directories(fs::path(m.out_dir) / "models");

    TrainResult result;
    result.rows.resize(configs.size());
    run_indexed(configs.size(), m.jobs, [&](std::size_t c) {
        const auto& cfg = configs[c];
        // One cross-validation run per instance, pooling the environment types.
        std::vector<std::vector<std::string>> run_paths(
            static_cast<std::size_t>(m.instances));
        for (const auto& tc : cases)
            run_paths[static_cast<std::size_t>(tc.instance)].push_back(
                collect_log_path(m, cfg.id, tc));
        Dataset data = dataset_from_logs(run_paths);

        double sum_s = 0.0, sum_p = 0.0;
        std::size_t n_s = 0, n_p = 0;
        for (const auto& run : data.runs)
            for (const auto& r : run) {
                sum_s += r.safety;
                ++n_s;
            }
        // Performance cells come from the logs directly (undefined excluded).
        for (const auto& run : run_paths)
            for (const auto& path : run) {
                RunLog log = RunLog::load(path);
                for (const auto& r : log.rows)
                    if (r.performance) {
                        sum_p += *r.performance;
                        ++n_p;
                    }
            }

        CvResult cv = cross_validate(data, m.degree);
        cv.best.config_id = cfg.id;
        cv.best.save(m.out_dir + "/models/" + cfg.id + ".json");

        TrainRow row;
        row.config_id = cfg.id;
        row.best_fold = cv.best_fold;
        row.rows = data.total_rows();
        row.train_r2 = cv.best.train_r2;
        row.train_mse = cv.best.train_mse;
        row.test_r2 = cv.best.test_r2;
        row.test_mse = cv.best.test_mse;
        row.avg_safety = n_s ? sum_s / static_cast<double>(n_s) : 0.0;
        row.avg_performance = n_p ? sum_p / static_cast<double>(n_p) : 0.0;
        result.rows[c] = row;
    });

    std::string scores = "config_id,rows,best_fold,train_r2,train_mse,test_r2,test_mse,"
                         "avg_safety,avg_performance\n";
    for (const auto& r : result.rows) {
        scores += r.config_id + "," + std::to_string(r.rows) + "," +
                  std::to_string(r.best_fold) + "," + fmt(r.train_r2) + "," +
                  fmt(r.train_mse) + "," + fmt(r.test_r2) + "," + fmt(r.test_mse) + "," +
                  fmt(r.avg_safety) + "," + fmt(r.avg_performance) + "\n";
    }
    write_file(m.out_dir + "/models/scores.csv", scores);

    KnowledgeBase kb;
    kb.nfr_safety_threshold = m.safety_threshold;
    for (const auto& r : result.rows) {
        KbEntry e;
        e.config_id = r.config_id;
        e.avg_safety = r.avg_safety;
        e.avg_performance = r.avg_performance;
        e.model_path = "models/" + r.config_id + ".json";
        kb.entries.push_back(std::move(e));
    }
    // Default configuration: the best performer.
    const TrainRow* best = nullptr;
    for (const auto& r : result.rows)
        if (!best || r.avg_performance > best->avg_performance + 1e-15 ||
            (std::abs(r.avg_performance - best->avg_performance) <= 1e-15 &&
             r.config_id < best->config_id))
            best = &r;
    kb.initial_config = best ? best->config_id : "";
    kb.validate();
    kb.save(m.out_dir + "/kb.json");
    result.kb = std::move(kb);
    return result;
}

namespace {

struct BenchSystem {
    std::string name;
    bool adaptive = false;
    ReasonerMode mode = ReasonerMode::Predictive;
    std::string fixed_config;  // for non-adaptive systems
};

std::string mission_name(std::size_t idx) { return "m" + std::to_string(idx + 1); }

}  // namespace

std::string benchmark_csv(const std::vector<BenchmarkCell>& cells) {
    std::string out = "system,mission,metric,mean,std,n\n";
    for (const auto& c : cells)
        out += c.system + "," + c.mission + "," + c.metric + "," + fmt(c.mean) + "," +
               fmt(c.stddev) + "," + std::to_string(c.n) + "\n";
    return out;
}

BenchmarkResult run_benchmark(const Manifest& m) {
    KnowledgeBase kb = KnowledgeBase::load(m.out_dir + "/kb.json");
    for (const auto& e : kb.entries)
        if (!e.model) throw MissingModel("kb entry " + e.config_id + " has no model file");

    std::vector<BenchSystem> systems;
    ReasonerMode qm_mode =
        m.reasoner_mode == 2 ? ReasonerMode::Revert : ReasonerMode::Predictive;
    systems.push_back({"mros_qm", true, qm_mode, ""});
    systems.push_back({"mros", true, ReasonerMode::BestEffort, ""});
    systems.push_back({"s0", false, ReasonerMode::Predictive, select_s0(kb)});
    systems.push_back({"s1", false, ReasonerMode::Predictive, select_s1(kb)});

    struct Task {
        std::size_t system;
        std::size_t mission;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < systems.size(); ++s)
        for (std::size_t mi = 0; mi < m.mission_clutter.size(); ++mi)
            for (int rep = 0; rep < m.reps; ++rep) tasks.push_back({s, mi, rep});

    std::vector<RunAggregate> agg(tasks.size());
    run_indexed(tasks.size(), m.jobs, [&](std::size_t i) {
        const Task& task = tasks[i];
        const BenchSystem& sys = systems[task.system];
        // Paired seeds: the map depends on mission type and rep only.
        uint64_t root = derive_seed(m.base_seed, "bench-map");
        uint64_t map_seed = derive_seed(
            root, static_cast<uint64_t>(task.mission) * 1000 + static_cast<uint64_t>(task.rep));
        EnvironmentSpec spec;
        spec.kind = EnvironmentSpec::Kind::Retail;
        spec.aisle_width = m.aisle_width;
        spec.clutterness = m.mission_clutter[task.mission];
        spec.obstacle_size = m.benchmark_obstacle_size;
        spec.seed = map_seed;
        RetailEnv env = generate_retail(spec);

        MissionSpec ms;
        ms.grid = &env.grid;
        ms.base_grid = &env.base_grid;
        for (const auto& wp : env.waypoints) ms.waypoints.push_back(wp.position());
        ms.start_pose = env.waypoints.front();
        ms.robot = m.robot;
        ms.lidar = m.lidar;
        ms.seed = derive_seed(map_seed, sys.name);

        std::string stem = m.out_dir + "/logs/benchmark/" + sys.name + "/" +
                           mission_name(task.mission) + "_rep" + std::to_string(task.rep);
        RunLog log;
        if (sys.adaptive) {
            MetaParams params = m.meta;
            params.mode = sys.mode;
            Metacontroller ctrl(kb, params);
            log = run_mission(ms, ctrl);
            write_file(stem + ".decisions.csv", ctrl.decision_log());
        } else {
            FixedController ctrl(sys.fixed_config);
            log = run_mission(ms, ctrl);
        }
        write_file(stem + ".csv", log.serialize());
        agg[i] = aggregate_run(log, m.safety_threshold, m.robot.control_dt);
    });

    BenchmarkResult result;
    for (const auto& a : agg) {
        if (a.outcome == "collision") ++result.collisions;
        if (a.outcome == "timeout") ++result.timeouts;
    }

    auto stats = [](const std::vector<double>& xs) {
        double mean = 0.0, var = 0.0;
        if (!xs.empty()) {
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            for (double x : xs) var += sq(x - mean);
            var /= static_cast<double>(xs.size());
        }
        return std::pair<double, double>(mean, std::sqrt(var));
    };

    for (std::size_t s = 0; s < systems.size(); ++s) {
        for (std::size_t mi = 0; mi < m.mission_clutter.size(); ++mi) {
            std::vector<double> ttc, avg_s, tu;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (tasks[i].system != s || tasks[i].mission != mi) continue;
                if (agg[i].outcome == "goal") ttc.push_back(agg[i].ttc);
                avg_s.push_back(agg[i].mean_safety);
                tu.push_back(agg[i].time_unsafe);
            }
            auto [tm, ts] = stats(ttc);
            auto [sm, ss] = stats(avg_s);
            auto [um, us] = stats(tu);
            const std::string mname = mission_name(mi);
            result.cells.push_back({systems[s].name, mname, "ttc", tm, ts,
                                    static_cast<int>(ttc.size())});
            result.cells.push_back({systems[s].name, mname, "avg_safety", sm, ss,
                                    static_cast<int>(avg_s.size())});
            result.cells.push_back({systems[s].name, mname, "time_unsafe", um, us,
                                    static_cast<int>(tu.size())});
        }
    }
    write_file(m.out_dir + "/benchmark.csv", benchmark_csv(result.cells));

    // summary.md: one table per metric plus outcome counts.
    std::string md = "# Benchmark summary\n";
    for (const std::string& metric : {std::string("ttc"), std::string("avg_safety"),
                                      std::string("time_unsafe")}) {
        md += "\n## " + metric + "\n\n| system |";
        for (std::size_t mi = 0; mi < m.mission_clutter.size(); ++mi)
            md += " " + mission_name(mi) + " |";
        md += "\n|---|";
        for (std::size_t mi = 0; mi < m.mission_clutter.size(); ++mi) md += "---|";
        md += "\n";
        for (const auto& sys : systems) {
            md += "| " + sys.name + " |";
            for (std::size_t mi = 0; mi < m.mission_clutter.size(); ++mi) {
                for (const auto& c : result.cells)
                    if (c.system == sys.name && c.mission == mission_name(mi) &&
                        c.metric == metric) {
                        char buf[64];
                        std::snprintf(buf, sizeof(buf), " %.3f (n=%d) |", c.mean, c.n);
                        md += buf;
                    }
            }
            md += "\n";
        }
    }
    md += "\n## outcomes\n\ncollisions: " + std::to_string(result.collisions) +
          ", timeouts: " + std::to_string(result.timeouts) + " of " +
          std::to_string(tasks.size()) + " runs\n";
    write_file(m.out_dir + "/summary.md", md);
    Manifest echo = m;
    echo.save(m.out_dir + "/manifest.json");
    return result;
}

}  // namespace navsim
