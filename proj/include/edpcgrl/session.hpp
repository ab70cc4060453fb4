#pragma once

// Simulated exposure sessions: relax -> anxious block (agent A) -> relax ->
// anxious block (agent B). Each anxious block has a low-target segment and a
// high-target segment (swapped in the reversed-order variant) and adapts the
// spider once per interval. Time is logical; nothing sleeps.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edpcgrl/agents.hpp"
#include "edpcgrl/error.hpp"
#include "edpcgrl/subjects.hpp"

namespace edpcgrl {

enum class Phase { Relax, LowAnxiety, HighAnxiety };

inline std::string_view phase_name(Phase p) {
    switch (p) {
    case Phase::Relax: return "relax";
    case Phase::LowAnxiety: return "low";
    case Phase::HighAnxiety: return "high";
    }
    return "?";
}

inline Phase parse_phase(std::string_view s) {
    for (auto p : {Phase::Relax, Phase::LowAnxiety, Phase::HighAnxiety})
        if (phase_name(p) == s) return p;
    throw SchemaError("unknown phase '" + std::string(s) + "'");
}

/// Which adaptation method runs the first anxious block.
enum class BlockOrder { RlFirst, RulesFirst };

struct SessionProtocol {
    double relax_s = 120.0;
    double segment_s = 140.0; // the anxious block is two segments
    double adapt_interval_s = 20.0;
    int low_target = 3;
    int high_target = 7;
    /// High-target segment first and an all-max starting spider.
    bool reversed_targets = false;

    int steps_per_segment() const { return static_cast<int>(std::lround(segment_s / adapt_interval_s)); }
    double anxious_s() const { return 2.0 * segment_s; }

    void validate() const {
        if (!(relax_s >= 0.0)) throw ConfigError("protocol.relax_s must be >= 0");
        if (!(adapt_interval_s > 0.0)) throw ConfigError("protocol.adapt_interval_s must be > 0");
        if (!(segment_s >= adapt_interval_s)) throw ConfigError("protocol.segment_s must be >= adapt_interval_s");
        if (std::abs(segment_s / adapt_interval_s - steps_per_segment()) > 1e-9) {
            throw ConfigError("protocol.segment_s must be a multiple of protocol.adapt_interval_s");
        }
        for (int t : {low_target, high_target}) {
            if (t < kMinAnxiety || t > kMaxAnxiety) throw ConfigError("protocol targets must be in 0..10");
        }
    }

    SpiderAttributes initial_spider() const {
        return reversed_targets ? SpiderAttributes::maximal() : SpiderAttributes::minimal();
    }
    /// Segments of an anxious block in presentation order.
    std::array<Phase, 2> segment_order() const {
        return reversed_targets ? std::array{Phase::HighAnxiety, Phase::LowAnxiety}
                                : std::array{Phase::LowAnxiety, Phase::HighAnxiety};
    }
    int target(Phase p) const { return p == Phase::HighAnxiety ? high_target : low_target; }
};

enum class SessionAgent { RL, Rules };

inline std::string_view session_agent_name(SessionAgent a) { return a == SessionAgent::RL ? "RL" : "Rules"; }

inline SessionAgent parse_session_agent(std::string_view s) {
    if (s == "RL") return SessionAgent::RL;
    if (s == "Rules") return SessionAgent::Rules;
    throw SchemaError("unknown agent '" + std::string(s) + "'");
}

/// One trace row. Relax rows carry no spider, anxiety or reward.
struct TraceRow {
    double t_s = 0.0;
    Phase phase = Phase::Relax;
    SessionAgent agent = SessionAgent::RL;
    std::optional<SpiderAttributes> spider;
    std::optional<int> anxiety;
    std::optional<double> reward;
    std::optional<AttributeAction> action;
};

using SessionTrace = std::vector<TraceRow>;

struct SessionConfig {
    SessionProtocol protocol;
    AgentConfig agent;
    EmptyCandidatePolicy empty_policy = EmptyCandidatePolicy::Hold;
};

/// Counterbalancing: even subject indices see RL first.
inline BlockOrder counterbalanced_order(std::size_t subject_index) {
    return subject_index % 2 == 0 ? BlockOrder::RlFirst : BlockOrder::RulesFirst;
}

namespace detail {

inline void run_anxious_block(SessionTrace& trace, double t0, SessionAgent who, const SessionConfig& cfg,
                              SubjectSession& subject, std::uint64_t seed, QTable* q_out) {
    const auto& proto = cfg.protocol;
    AgentConfig ac = cfg.agent;
    ac.seed = derive_seed(seed, {0xa9});
    // The Q-table lives for the whole block, spanning both target segments.
    Agent agent(who == SessionAgent::RL ? AgentKind::RlZero : AgentKind::RulesBased, ac, cfg.empty_policy);
    Rng rng(derive_seed(seed, {0xac7}));

    SpiderAttributes spider = proto.initial_spider();
    const int steps = proto.steps_per_segment();
    const auto segments = proto.segment_order();
    for (int k = 0; k < 2 * steps; ++k) {
        const Phase phase = segments[static_cast<std::size_t>(k / steps)];
        const int target = proto.target(phase);
        const AnxietyLevel anxiety = subject.present(spider);

        TraceRow row;
        row.t_s = t0 + k * proto.adapt_interval_s;
        row.phase = phase;
        row.agent = who;
        row.spider = spider;
        row.anxiety = anxiety.value();
        if (k + 1 < 2 * steps) {
            const auto action = agent.step(spider, anxiety, target, rng);
            row.action = action;
            if (action) spider = apply_action(spider, *action);
        } else {
            agent.finish(spider, anxiety, target);
        }
        row.reward = agent.last_reward();
        trace.push_back(row);
    }
    if (q_out && who == SessionAgent::RL) *q_out = agent.q_table();
}

} // namespace detail

/// Simulate one subject through the full protocol. `seed` roots the agents'
/// and subject's streams; the same inputs give the same trace. If `rl_q_out`
/// is set it receives the RL agent's final Q-table.
inline SessionTrace run_session(const SessionConfig& cfg, const VirtualSubject& subject, BlockOrder order,
                                std::uint64_t seed, QTable* rl_q_out = nullptr) {
    cfg.protocol.validate();
    cfg.agent.validate();
    const auto& proto = cfg.protocol;

    SubjectSession responder(subject, derive_seed(seed, {0x50b}));
    const std::array<SessionAgent, 2> agents = order == BlockOrder::RlFirst
                                                   ? std::array{SessionAgent::RL, SessionAgent::Rules}
                                                   : std::array{SessionAgent::Rules, SessionAgent::RL};
    SessionTrace trace;
    double t = 0.0;
    for (std::size_t b = 0; b < agents.size(); ++b) {
        TraceRow relax;
        relax.t_s = t;
        relax.phase = Phase::Relax;
        relax.agent = agents[b];
        trace.push_back(relax);
        t += proto.relax_s;
        detail::run_anxious_block(trace, t, agents[b], cfg, responder, derive_seed(seed, {0xb10c, b}), rl_q_out);
        t += proto.anxious_s();
    }
    return trace;
}

struct SegmentSummary {
    SessionAgent agent{};
    Phase phase{};
    int target = 0;
    int steps = 0;
    double mean_anxiety = 0.0;
    double mse = 0.0;
    double mean_reward = 0.0;
    std::vector<int> anxiety; // per step, in time order
};

/// Per (agent, segment) statistics, ordered RL-low, RL-high, Rules-low,
/// Rules-high. Throws IntegrityError if any segment does not have exactly
/// `protocol.steps_per_segment()` rows.
inline std::vector<SegmentSummary> segment_summary(const SessionTrace& trace, const SessionProtocol& protocol) {
    std::vector<SegmentSummary> out;
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const auto& row : trace) {
        if (!(row.t_s > prev_t)) throw IntegrityError("trace timestamps are not strictly increasing");
        prev_t = row.t_s;
    }
    for (auto agent : {SessionAgent::RL, SessionAgent::Rules}) {
        for (auto phase : {Phase::LowAnxiety, Phase::HighAnxiety}) {
            SegmentSummary s;
            s.agent = agent;
            s.phase = phase;
            s.target = protocol.target(phase);
            double reward_sum = 0.0;
            for (const auto& row : trace) {
                if (row.agent != agent || row.phase != phase) continue;
                if (!row.anxiety || !row.reward) {
                    throw IntegrityError("adaptation row at t=" + std::to_string(row.t_s) + " lacks anxiety/reward");
                }
                s.anxiety.push_back(*row.anxiety);
                reward_sum += *row.reward;
            }
            s.steps = static_cast<int>(s.anxiety.size());
            if (s.steps != protocol.steps_per_segment()) {
                throw IntegrityError("segment " + std::string(session_agent_name(agent)) + "/" +
                                     std::string(phase_name(phase)) + " has " + std::to_string(s.steps) +
                                     " steps, expected " + std::to_string(protocol.steps_per_segment()));
            }
            double sum = 0.0, sq = 0.0;
            for (int a : s.anxiety) {
                sum += a;
                sq += (a - s.target) * (a - s.target);
            }
            s.mean_anxiety = sum / s.steps;
            s.mse = sq / s.steps;
            s.mean_reward = reward_sum / s.steps;
            out.push_back(std::move(s));
        }
    }
    return out;
}

inline const SegmentSummary& find_segment(const std::vector<SegmentSummary>& summary, SessionAgent agent, Phase phase) {
    for (const auto& s : summary)
        if (s.agent == agent && s.phase == phase) return s;
    throw IntegrityError("segment not found");
}

} // namespace edpcgrl
