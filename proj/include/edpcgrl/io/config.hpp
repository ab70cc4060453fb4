#pragma once

// Flat key = value configuration with [section] headers. Keys are addressed
// as "section.key"; keys before any header have no prefix. '#' starts a
// comment. Unknown keys are rejected so typos do not pass silently.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "edpcgrl/agents.hpp"
#include "edpcgrl/error.hpp"
#include "edpcgrl/io/csv.hpp"
#include "edpcgrl/search.hpp"
#include "edpcgrl/session.hpp"
#include "edpcgrl/subjects.hpp"

namespace edpcgrl::io {

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, const std::string& source = "<config>") {
        KeyValueConfig cfg;
        std::string section;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            auto line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const std::string where = source + ":" + std::to_string(line_no);
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3) throw ConfigError(where + ": malformed section header");
                section = std::string(trim(line.substr(1, line.size() - 2)));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
            const auto key = trim(line.substr(0, eq));
            if (key.empty()) throw ConfigError(where + ": empty key");
            const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
            if (cfg.values_.count(full)) throw ConfigError(where + ": duplicate key '" + full + "'");
            cfg.values_[full] = std::string(trim(line.substr(eq + 1)));
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::string& require(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
        used_.insert(key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? require(key) : fallback;
    }

    double get_double(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto v = parse_double(require(key));
        if (!v) throw ConfigError("config key '" + key + "' must be a number");
        return *v;
    }

    int get_int(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const auto v = parse_int(require(key));
        if (!v) throw ConfigError("config key '" + key + "' must be an integer");
        return static_cast<int>(*v);
    }

    std::uint64_t get_u64(const std::string& key) const { return to_u64(key, require(key)); }

    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const {
        if (!has(key)) return fallback;
        std::vector<std::string> out;
        for (auto item : split(require(key)))
            if (!trim(item).empty()) out.emplace_back(trim(item));
        return out;
    }

    /// Throws for any key that no getter has read.
    void check_all_used() const {
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }

    static std::uint64_t to_u64(const std::string& key, std::string_view text) {
        text = trim(text);
        std::uint64_t v = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
            throw ConfigError("'" + key + "' must be a non-negative integer, got '" + std::string(text) + "'");
        }
        return v;
    }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

enum class SimulationKind { Search, Session, Reversed };

inline std::string_view simulation_name(SimulationKind k) {
    switch (k) {
    case SimulationKind::Search: return "search";
    case SimulationKind::Session: return "session";
    case SimulationKind::Reversed: return "reversed";
    }
    return "?";
}

struct RunConfig {
    std::uint64_t seed = 0;
    bool seed_from_env = false;
    SubjectPopulationConfig population;
    SearchExperimentConfig search;
    SessionConfig session;
    int session_subjects = 20;
    unsigned threads = 0;
};

inline constexpr const char* kSeedEnvVar = "EDPCGRL_SEED";

/// Builds a run configuration. `seed` is mandatory unless EDPCGRL_SEED is
/// set, which overrides it.
inline RunConfig load_run_config(const KeyValueConfig& kv, SimulationKind kind) {
    RunConfig rc;
    if (const char* env = std::getenv(kSeedEnvVar); env && *env) {
        rc.seed = KeyValueConfig::to_u64(kSeedEnvVar, env);
        rc.seed_from_env = true;
        if (kv.has("seed")) (void)kv.require("seed");
    } else {
        rc.seed = kv.get_u64("seed");
    }
    rc.threads = static_cast<unsigned>(kv.get_int("threads", 0));

    auto& pop = rc.population;
    pop.master_seed = rc.seed;
    pop.n_subjects = kv.get_int("population.n_subjects", pop.n_subjects);
    pop.noise_sigma = kv.get_double("population.noise_sigma", kind == SimulationKind::Search ? 0.0 : 0.5);
    pop.habituation_decay =
        kv.get_double("population.habituation_decay", kind == SimulationKind::Reversed ? 0.9 : 1.0);
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        const std::string base = "population." + std::string(kAttributeColumns[i]);
        pop.impact[i].mean = kv.get_double(base + "_mean", pop.impact[i].mean);
        pop.impact[i].std = kv.get_double(base + "_std", pop.impact[i].std);
    }
    pop.validate();

    AgentConfig agent;
    agent.epsilon = kv.get_double("agent.epsilon", agent.epsilon);
    agent.alpha = kv.get_double("agent.alpha", agent.alpha);
    agent.gamma = kv.get_double("agent.gamma", agent.gamma);
    agent.validate();
    const auto policy = kv.get_string("agent.empty_candidates", "hold");
    EmptyCandidatePolicy empty_policy{};
    if (policy == "hold") empty_policy = EmptyCandidatePolicy::Hold;
    else if (policy == "nudge") empty_policy = EmptyCandidatePolicy::Nudge;
    else throw ConfigError("agent.empty_candidates must be hold|nudge, got '" + policy + "'");

    auto& s = rc.search;
    s.master_seed = rc.seed;
    s.agent = agent;
    s.empty_policy = empty_policy;
    s.threads = rc.threads;
    s.budget = kv.get_int("search.budget", s.budget);
    s.repetitions = kv.get_int("search.repetitions", s.repetitions);
    s.report_threshold = kv.get_double("search.report_threshold", s.report_threshold);
    s.q_persistence = parse_persistence(kv.get_string("search.q_persistence", "cell"));
    std::vector<std::string> default_agents;
    for (auto a : s.agents) default_agents.emplace_back(agent_name(a));
    s.agents.clear();
    for (const auto& name : kv.get_list("search.agents", default_agents)) s.agents.push_back(parse_agent_kind(name));
    s.validate();

    auto& sess = rc.session;
    sess.agent = agent;
    sess.empty_policy = empty_policy;
    auto& p = sess.protocol;
    p.relax_s = kv.get_double("session.relax_s", p.relax_s);
    p.segment_s = kv.get_double("session.segment_s", p.segment_s);
    p.adapt_interval_s = kv.get_double("session.adapt_interval_s", p.adapt_interval_s);
    p.low_target = kv.get_int("session.low_target", p.low_target);
    p.high_target = kv.get_int("session.high_target", p.high_target);
    p.reversed_targets = kind == SimulationKind::Reversed;
    p.validate();
    rc.session_subjects = kv.get_int("session.n_subjects", rc.session_subjects);
    if (rc.session_subjects < 1) throw ConfigError("session.n_subjects must be >= 1");
    if (kind != SimulationKind::Search && rc.session_subjects > pop.n_subjects) {
        throw ConfigError("session.n_subjects exceeds population.n_subjects");
    }

    kv.check_all_used();
    return rc;
}

/// 64-bit FNV-1a, used to fingerprint configs and outputs in manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

} // namespace edpcgrl::io
