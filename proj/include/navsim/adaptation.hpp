#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "navsim/mission.hpp"
#include "navsim/models.hpp"

namespace navsim {

struct KbEntry {
    std::string config_id;
    double avg_safety = 0.0;
    double avg_performance = 0.0;
    std::string model_path;  // relative to the kb file; may be empty
    std::optional<SafetyModel> model;
    bool error = false;  // runtime mark, never serialized
};

// Shared knowledge the metacontroller reasons over: one entry per known
// configuration plus the safety requirement and the default configuration.
struct KnowledgeBase {
    double nfr_safety_threshold = 0.6;
    std::string initial_config;
    std::vector<KbEntry> entries;

    const KbEntry* find(const std::string& id) const;
    KbEntry* find(const std::string& id);
    // Threshold strictly inside (0, 1), initial config known, and exactly one
    // entry per known configuration.
    void validate() const;

    std::string serialize() const;
    static KnowledgeBase parse(const std::string& text);
    // load() resolves non-empty model_path entries relative to the kb file.
    static KnowledgeBase load(const std::string& path);
    void save(const std::string& path) const;
};

// Statically safest / best-performing configuration (ties toward the
// lexicographically smaller id).
std::string select_s0(const KnowledgeBase& kb);
std::string select_s1(const KnowledgeBase& kb);

enum class ReasonerMode { BestEffort = 0, Predictive = 1, Revert = 2 };

// One analyze+plan evaluation. `violation` tells the reasoner why it runs;
// the reading is the (narrowness, density) context captured at the trigger.
// Returns the configuration to switch to, or nothing.
//
// BestEffort marks the violating configuration as erroneous in this kb copy
// and picks the best-performing entry whose average safety meets the
// threshold; it never returns the current configuration.
// Predictive evaluates every entry's safety model at the reading and picks
// the best-performing compliant entry, falling back to the highest predicted
// safety; returning the current configuration means "stay".
// Revert behaves like Predictive on violations; otherwise it proposes the
// initial configuration once its predicted safety at the reading is
// compliant again.
std::optional<std::string> plan_adaptation(KnowledgeBase& kb, ReasonerMode mode,
                                           const std::string& current,
                                           const std::string& initial, bool violation,
                                           double narrowness, double density);

struct MetaParams {
    ReasonerMode mode = ReasonerMode::Predictive;
    double monitor_period = 0.097;
    double analyze_latency = 0.520;
    double plan_latency = 0.016;      // Predictive / Revert
    double plan_latency_fast = 0.001; // BestEffort table lookup
    double execute_latency = 3.575;
    double monitor_window = 0.5;      // trailing mean fed to the monitor
};

// MAPE-K loop over the knowledge base. Monitoring runs on its own cadence;
// a violation starts the analyze -> plan -> execute pipeline, during whose
// execute phase the robot is commanded to stop (dead time). The new
// configuration becomes active at adapt_done. While a pipeline is in flight
// further violations are suppressed.
class Metacontroller final : public MissionController {
  public:
    Metacontroller(KnowledgeBase kb, MetaParams params);

    Decision tick(double t, const MetricsRecord& metrics) override;

    // "t,phase,detail" rows: every monitor completion plus analyze/plan/
    // execute completions with their latency-accurate timestamps.
    std::string decision_log() const;
    const std::string& active_config() const { return current_; }
    int switch_count() const { return switches_; }

  private:
    void log_row(double t, const std::string& phase, const std::string& detail);

    KnowledgeBase kb_;
    MetaParams params_;
    std::string current_;
    std::string initial_;
    int switches_ = 0;

    std::deque<std::pair<double, double>> safety_hist_;
    double next_monitor_ = 0.0;
    int monitor_index_ = 0;

    bool in_flight_ = false;
    bool switch_pending_ = false;  // emit adapt_start on the current row
    std::string target_;
    double t_plan_done_ = 0.0;
    double t_exec_done_ = 0.0;

    std::string log_;
};

}  // namespace navsim
