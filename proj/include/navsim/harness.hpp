#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "navsim/adaptation.hpp"
#include "navsim/models.hpp"
#include "navsim/robot.hpp"
#include "navsim/world.hpp"

namespace navsim {

// Single source of reproducibility for the experiment pipeline. CLI flags
// override individual fields; the effective manifest is echoed into the
// output directory.
struct Manifest {
    uint64_t base_seed = 1;
    std::string out_dir = "out/run";
    int jobs = 1;

    // Training corpus: every (width, clutter) pair times `instances` maps,
    // each map shared by all 16 configurations.
    double corridor_length = 20.0;
    std::vector<double> corridor_widths = {2.6, 3.0};
    std::vector<int> corridor_clutter = {6, 8};
    int instances = 5;
    double training_obstacle_size = 0.5;

    // Model fitting.
    int degree = 4;
    double safety_threshold = 0.6;

    // Benchmark: mission types are clutter budgets (blocks, split across the
    // two retail areas; turn satellites come on top).
    int reps = 10;
    double aisle_width = 4.5;
    double benchmark_obstacle_size = 1.2;
    std::vector<int> mission_clutter = {3, 6, 10};
    int reasoner_mode = 1;  // mros_qm runs mod this; 2 swaps in the reverting reasoner

    MetaParams meta;  // latencies and monitor cadence
    RobotSpec robot;
    LidarSpec lidar;

    std::string serialize() const;
    static Manifest parse(const std::string& text);
    static Manifest load(const std::string& path);
    void save(const std::string& path) const;
};

// Phase 1: run every configuration over the shared training maps and store
// run logs under <out_dir>/logs/collect/<config>/.
struct CollectStats {
    int missions = 0;
    int goals = 0, collisions = 0, timeouts = 0;
    std::size_t rows = 0;
};
CollectStats run_collect(const Manifest& m);

// Phase 2: ingest the collected logs (grouped into one run per instance),
// cross-validate a model per configuration, and write
// <out_dir>/models/*.json, <out_dir>/models/scores.csv and <out_dir>/kb.json.
struct TrainRow {
    std::string config_id;
    int best_fold = 0;
    std::size_t rows = 0;
    double train_r2 = 0.0, train_mse = 0.0;
    double test_r2 = 0.0, test_mse = 0.0;
    double avg_safety = 0.0, avg_performance = 0.0;
};
struct TrainResult {
    std::vector<TrainRow> rows;
    KnowledgeBase kb;
};
TrainResult run_train(const Manifest& m);

// Phase 3: four systems (mros_qm, mros, s0, s1) over the mission types with
// paired seeds; writes logs, benchmark.csv and summary.md.
struct BenchmarkCell {
    std::string system;
    std::string mission;
    std::string metric;  // ttc, avg_safety, time_unsafe
    double mean = 0.0, stddev = 0.0;
    int n = 0;
};
struct BenchmarkResult {
    std::vector<BenchmarkCell> cells;
    int collisions = 0, timeouts = 0;
};
BenchmarkResult run_benchmark(const Manifest& m);

// Tidy-CSV encoding of the benchmark cells (header only when empty).
std::string benchmark_csv(const std::vector<BenchmarkCell>& cells);

// Mission-level aggregates used by both the benchmark and its tests.
struct RunAggregate {
    std::string outcome;
    double ttc = 0.0;          // valid when outcome == "goal"
    double mean_safety = 0.0;  // over all rows, partial logs included
    double time_unsafe = 0.0;  // dt-weighted rows below the threshold
};
RunAggregate aggregate_run(const RunLog& log, double threshold, double dt);

// Dataset ingestion for one configuration: one run per instance, pooling the
// environment types; rows keep every sample regardless of whether the
// performance cell was defined yet.
Dataset dataset_from_logs(const std::vector<std::vector<std::string>>& run_paths);

}  // namespace navsim
