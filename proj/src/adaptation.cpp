#include "navsim/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "navsim/configs.hpp"
#include "navsim/errors.hpp"

namespace navsim {

const KbEntry* KnowledgeBase::find(const std::string& id) const {
    for (const auto& e : entries)
        if (e.config_id == id) return &e;
    return nullptr;
}

KbEntry* KnowledgeBase::find(const std::string& id) {
    for (auto& e : entries)
        if (e.config_id == id) return &e;
    return nullptr;
}

void KnowledgeBase::validate() const {
    if (!(nfr_safety_threshold > 0.0 && nfr_safety_threshold < 1.0))
        throw DomainError("safety threshold must lie strictly inside (0, 1)");
    if (!initial_config.empty()) config_by_id(initial_config);
    const auto& known = all_configs();
    if (entries.size() != known.size())
        throw DomainError("knowledge base must cover every configuration");
    for (const auto& c : known) {
        std::size_t n = 0;
        for (const auto& e : entries)
            if (e.config_id == c.id) ++n;
        if (n != 1)
            throw DomainError("knowledge base needs exactly one entry for " + c.id);
    }
}

std::string KnowledgeBase::serialize() const {
    nlohmann::json j;
    j["nfr_safety_threshold"] = nfr_safety_threshold;
    j["initial_config"] = initial_config;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je;
        je["config_id"] = e.config_id;
        je["avg_safety"] = e.avg_safety;
        je["avg_performance"] = e.avg_performance;
        je["model_path"] = e.model_path;
        j["entries"].push_back(std::move(je));
    }
    return j.dump(2) + "\n";
}

KnowledgeBase KnowledgeBase::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("knowledge base JSON malformed: ") + e.what());
    }
    try {
        KnowledgeBase kb;
        kb.nfr_safety_threshold = j.at("nfr_safety_threshold").get<double>();
        kb.initial_config = j.at("initial_config").get<std::string>();
        for (const auto& je : j.at("entries")) {
            KbEntry e;
            e.config_id = je.at("config_id").get<std::string>();
            e.avg_safety = je.at("avg_safety").get<double>();
            e.avg_performance = je.at("avg_performance").get<double>();
            e.model_path = je.value("model_path", std::string());
            kb.entries.push_back(std::move(e));
        }
        kb.validate();
        return kb;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("knowledge base JSON missing fields: ") + e.what());
    }
}

KnowledgeBase KnowledgeBase::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    KnowledgeBase kb = parse(ss.str());
    auto dir = std::filesystem::path(path).parent_path();
    for (auto& e : kb.entries) {
        if (e.model_path.empty()) continue;
        auto mp = std::filesystem::path(e.model_path);
        if (mp.is_relative()) mp = dir / mp;
        if (std::filesystem::exists(mp)) e.model = SafetyModel::load(mp.string());
    }
    return kb;
}

void KnowledgeBase::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << serialize();
}

namespace {

// Lexicographically-stable argmax over entries passing `keep`.
template <typename Keep, typename Score>
const KbEntry* argmax_entry(const KnowledgeBase& kb, Keep keep, Score score) {
    const KbEntry* best = nullptr;
    for (const auto& e : kb.entries) {
        if (!keep(e)) continue;
        if (!best || score(e) > score(*best) + 1e-15 ||
            (std::abs(score(e) - score(*best)) <= 1e-15 && e.config_id < best->config_id))
            best = &e;
    }
    return best;
}

}  // namespace

std::string select_s0(const KnowledgeBase& kb) {
    const KbEntry* e = argmax_entry(
        kb, [](const KbEntry&) { return true; },
        [](const KbEntry& x) { return x.avg_safety; });
    if (!e) throw DomainError("knowledge base has no entries");
    return e->config_id;
}

std::string select_s1(const KnowledgeBase& kb) {
    const KbEntry* e = argmax_entry(
        kb, [](const KbEntry&) { return true; },
        [](const KbEntry& x) { return x.avg_performance; });
    if (!e) throw DomainError("knowledge base has no entries");
    return e->config_id;
}

std::optional<std::string> plan_adaptation(KnowledgeBase& kb, ReasonerMode mode,
                                           const std::string& current,
                                           const std::string& initial, bool violation,
                                           double narrowness, double density) {
    const double thr = kb.nfr_safety_threshold;
    if (mode == ReasonerMode::BestEffort) {
        if (!violation) return std::nullopt;
        if (KbEntry* cur = kb.find(current)) cur->error = true;
        const KbEntry* pick = argmax_entry(
            kb,
            [&](const KbEntry& e) {
                return !e.error && e.config_id != current && e.avg_safety >= thr;
            },
            [](const KbEntry& e) { return e.avg_performance; });
        if (!pick) return std::nullopt;
        return pick->config_id;
    }

    auto predicted = [&](const KbEntry& e) {
        if (!e.model) throw MissingModel("no safety model for " + e.config_id);
        return e.model->predict(narrowness, density);
    };

    if (mode == ReasonerMode::Revert && !violation) {
        if (current == initial || initial.empty()) return std::nullopt;
        const KbEntry* init = kb.find(initial);
        if (!init) throw UnknownConfig("initial configuration missing from kb");
        if (predicted(*init) >= thr) return initial;
        return std::nullopt;
    }
    if (!violation) return std::nullopt;

    // Predictive: evaluate every model at the reading.
    for (const auto& e : kb.entries) (void)predicted(e);  // MissingModel up front
    const KbEntry* pick = argmax_entry(
        kb, [&](const KbEntry& e) { return predicted(e) >= thr; },
        [](const KbEntry& e) { return e.avg_performance; });
    if (!pick)
        pick = argmax_entry(
            kb, [](const KbEntry&) { return true; },
            [&](const KbEntry& e) { return predicted(e); });
    if (!pick) return std::nullopt;
    return pick->config_id;
}

Metacontroller::Metacontroller(KnowledgeBase kb, MetaParams params)
    : kb_(std::move(kb)), params_(params) {
    kb_.validate();
    if (kb_.initial_config.empty())
        throw DomainError("knowledge base does not name an initial configuration");
    current_ = kb_.initial_config;
    initial_ = kb_.initial_config;
    next_monitor_ = params_.monitor_period;
    log_ = "t,phase,detail\n";
}

void Metacontroller::log_row(double t, const std::string& phase, const std::string& detail) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", t);
    log_ += std::string(buf) + "," + phase + "," + detail + "\n";
}

std::string Metacontroller::decision_log() const { return log_; }

MissionController::Decision Metacontroller::tick(double t, const MetricsRecord& metrics) {
    safety_hist_.emplace_back(t, metrics.safety);
    while (!safety_hist_.empty() && safety_hist_.front().first < t - params_.monitor_window - 1e-9)
        safety_hist_.pop_front();

    Decision d;
    d.config_id = current_;

    // Completion of the execute phase: the switch becomes active now.
    if (in_flight_ && !target_.empty() && t >= t_exec_done_ - 1e-9) {
        current_ = target_;
        ++switches_;
        d.config_id = current_;
        d.adapt_done = true;
        in_flight_ = false;
        target_.clear();
    }

    // Monitor completions due at this tick consume the current metrics row.
    while (next_monitor_ <= t + 1e-9) {
        double mean = 0.0;
        for (auto& [ts, s] : safety_hist_) mean += s;
        mean /= static_cast<double>(safety_hist_.size());
        bool violation = mean < kb_.nfr_safety_threshold;
        ++monitor_index_;
        double t_mon = next_monitor_;
        next_monitor_ = params_.monitor_period * (monitor_index_ + 1);

        char det[96];
        if (in_flight_) {
            std::snprintf(det, sizeof(det), "safety=%.4f suppressed", mean);
            log_row(t_mon, "monitor", det);
            continue;
        }
        std::snprintf(det, sizeof(det), "safety=%.4f %s", mean,
                      violation ? "violation" : "ok");
        log_row(t_mon, "monitor", det);

        bool revert_check = params_.mode == ReasonerMode::Revert && !violation &&
                            current_ != initial_;
        if (!violation && !revert_check) continue;

        // Analyze + plan with latency-accurate completion stamps; the
        // decision itself is computed against the reading captured now.
        double plan_latency = params_.mode == ReasonerMode::BestEffort
                                  ? params_.plan_latency_fast
                                  : params_.plan_latency;
        double t_analyze = t_mon + params_.analyze_latency;
        double t_plan = t_analyze + plan_latency;
        char abuf[96];
        std::snprintf(abuf, sizeof(abuf), "reading n=%.4f od=%.4f %s",
                      metrics.narrowness, metrics.obstacle_density,
                      violation ? "violation" : "revert-check");
        log_row(t_analyze, "analyze", abuf);
        auto pick = plan_adaptation(kb_, params_.mode, current_, initial_, violation,
                                    metrics.narrowness, metrics.obstacle_density);
        if (!pick) {
            log_row(t_plan, "plan", "no candidate");
            continue;
        }
        if (*pick == current_) {
            log_row(t_plan, "plan", "keep " + current_);
            continue;
        }
        log_row(t_plan, "plan", "switch to " + *pick);
        target_ = *pick;
        in_flight_ = true;
        switch_pending_ = true;
        t_plan_done_ = t_plan;
        t_exec_done_ = t_plan + params_.execute_latency;
        log_row(t_plan, "execute_start", *pick);
        log_row(t_exec_done_, "execute_done", *pick);
    }

    if (switch_pending_) {
        d.adapt_start = true;
        switch_pending_ = false;
    }
    // Dead time spans the execute phase; planning keeps driving during
    // analyze+plan.
    if (in_flight_ && !target_.empty() && t >= t_plan_done_ - 1e-9) d.dead_time = true;
    return d;
}

}  // namespace navsim
