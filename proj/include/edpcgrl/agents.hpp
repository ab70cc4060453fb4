#pragma once

// Adaptation policies: tabular epsilon-greedy Q-learning, the rules-based
// correction-factor baseline, and a uniform random walk used as a floor.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edpcgrl/error.hpp"
#include "edpcgrl/reward.hpp"
#include "edpcgrl/rng.hpp"
#include "edpcgrl/state_space.hpp"

namespace edpcgrl {

// ---------------------------------------------------------------------------
// Q-learning
// ---------------------------------------------------------------------------

enum class QInit { Zero, Random };

struct AgentConfig {
    double epsilon = 0.05;
    double alpha = 0.5;
    double gamma = 0.8;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must be in [0,1]");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0,1]");
        if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in [0,1)");
    }
};

/// Dense state x action-slot table. Slots that are invalid for a state hold
/// NaN and are never read by selection or bootstrap.
class QTable {
public:
    explicit QTable(QInit init = QInit::Zero, std::uint64_t seed = 0)
        : values_(static_cast<std::size_t>(kNumStates) * kNumActionSlots,
                  std::numeric_limits<double>::quiet_NaN()) {
        Rng rng(seed);
        for (int s = 0; s < kNumStates; ++s) {
            const auto spider = decode(s);
            for (int slot = 0; slot < kNumActionSlots; ++slot) {
                if (!is_valid_action(spider, action_from_slot(slot))) continue;
                at(s, slot) = init == QInit::Random ? uniform01(rng) : 0.0;
            }
        }
    }

    double get(int state, AttributeAction a) const { return at(state, action_slot(a)); }
    void set(int state, AttributeAction a, double v) { at(state, action_slot(a)) = v; }

    /// Raw slot access; NaN marks an invalid action.
    double slot_value(int state, int slot) const { return at(state, slot); }

    double max_value(const SpiderAttributes& s) const {
        const int idx = encode(s);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& a : valid_actions(s)) best = std::max(best, get(idx, a));
        return best;
    }

    friend bool operator==(const QTable& a, const QTable& b) {
        for (std::size_t i = 0; i < a.values_.size(); ++i) {
            const double x = a.values_[i], y = b.values_[i];
            if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
        }
        return true;
    }

private:
    double& at(int state, int slot) { return values_[static_cast<std::size_t>(state) * kNumActionSlots + slot]; }
    double at(int state, int slot) const { return values_[static_cast<std::size_t>(state) * kNumActionSlots + slot]; }

    std::vector<double> values_;
};

/// Epsilon-greedy selection. Always consumes one uniform draw for the
/// explore/exploit decision, plus one index draw when exploring. Greedy ties
/// go to the earliest canonical slot.
inline AttributeAction ql_select_action(const QTable& q, const SpiderAttributes& state, const AgentConfig& cfg,
                                        Rng& rng) {
    const auto actions = valid_actions(state);
    if (uniform01(rng) < cfg.epsilon) return actions[uniform_index(rng, actions.size())];
    const int idx = encode(state);
    AttributeAction best = actions.front();
    double best_v = q.get(idx, best);
    for (const auto& a : actions) {
        const double v = q.get(idx, a);
        if (v > best_v) {
            best_v = v;
            best = a;
        }
    }
    return best;
}

/// One-step Q-learning backup with max bootstrap over the next state's valid actions.
inline void ql_update(QTable& q, const SpiderAttributes& s, AttributeAction a, double r,
                      const SpiderAttributes& s_next, const AgentConfig& cfg) {
    if (!is_valid_action(s, a) || apply_action(s, a) != s_next) {
        throw InvalidActionError("ql_update: (s, a, s') is not a valid transition");
    }
    const int idx = encode(s);
    const double old = q.get(idx, a);
    const double target = r + cfg.gamma * q.max_value(s_next);
    q.set(idx, a, old + cfg.alpha * (target - old));
}

// ---------------------------------------------------------------------------
// Rules-based baseline
// ---------------------------------------------------------------------------

/// (current anxiety - desired anxiety) / 10, both on the 0..10 scale.
class CorrectionFactor {
public:
    explicit CorrectionFactor(double value) : value_(value) {
        if (!(value >= -1.0 && value <= 1.0)) {
            throw RangeError("correction factor " + std::to_string(value) + " out of range [-1,1]");
        }
    }
    static CorrectionFactor from_levels(int current, int desired) {
        return CorrectionFactor((current - desired) / 10.0);
    }
    double value() const { return value_; }

private:
    double value_;
};

namespace detail {

// Per attribute: level 2 when cf < lo, level 1 when lo <= cf <= hi, level 0
// when cf > hi. Hairiness has no level 2, so its lo sits at the range edge.
struct RuleInterval {
    double lo;
    double hi;
};

inline constexpr std::array<RuleInterval, kNumAttributes> kRuleTable{{
    {-0.7, 0.3},  // locomotion  <- jumping force
    {-0.5, 0.4},  // amount of movement <- velocity
    {-0.7, -0.1}, // closeness <- probability of moving towards user
    {-0.8, -0.2}, // largeness <- size
    {-1.0, 0.0},  // hairiness
    {-0.8, -0.2}, // color <- size
}};

} // namespace detail

inline SpiderAttributes rb_targets(CorrectionFactor cf) {
    const double c = cf.value();
    std::array<int, kNumAttributes> t{};
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        const auto& rule = detail::kRuleTable[i];
        t[i] = c < rule.lo ? 2 : (c <= rule.hi ? 1 : 0);
        t[i] = std::min(t[i], max_level(i));
    }
    return SpiderAttributes(t);
}

/// Attributes whose current value differs from the rule target.
inline std::vector<int> rb_candidates(const SpiderAttributes& current, CorrectionFactor cf) {
    const auto targets = rb_targets(cf);
    std::vector<int> out;
    for (std::size_t i = 0; i < kNumAttributes; ++i)
        if (current[i] != targets[i]) out.push_back(static_cast<int>(i));
    return out;
}

enum class EmptyCandidatePolicy { Hold, Nudge };

/// Pick one off-target attribute uniformly and step it one level toward its
/// target. nullopt means hold the current spider.
inline std::optional<AttributeAction> rb_select_action(const SpiderAttributes& current, CorrectionFactor cf, Rng& rng,
                                                       EmptyCandidatePolicy policy = EmptyCandidatePolicy::Hold) {
    const auto targets = rb_targets(cf);
    const auto candidates = rb_candidates(current, cf);
    if (!candidates.empty()) {
        const int attr = candidates[uniform_index(rng, candidates.size())];
        const auto i = static_cast<std::size_t>(attr);
        return AttributeAction{attr, targets[i] > current[i] ? +1 : -1};
    }
    if (policy == EmptyCandidatePolicy::Hold || cf.value() == 0.0) return std::nullopt;

    // Nudge: a negative factor means anxiety is below target, so increase.
    const int dir = cf.value() < 0 ? +1 : -1;
    std::vector<AttributeAction> options;
    for (int a = 0; a < static_cast<int>(kNumAttributes); ++a)
        if (is_valid_action(current, {a, dir})) options.push_back({a, dir});
    if (options.empty()) return std::nullopt;
    return options[uniform_index(rng, options.size())];
}

// ---------------------------------------------------------------------------
// Stateful policies driven by an experiment loop
// ---------------------------------------------------------------------------

enum class AgentKind { RlZero, RlRandom, RulesBased, RandomWalk };

inline std::string_view agent_name(AgentKind k) {
    switch (k) {
    case AgentKind::RlZero: return "rl_zero";
    case AgentKind::RlRandom: return "rl_random";
    case AgentKind::RulesBased: return "rules";
    case AgentKind::RandomWalk: return "random_walk";
    }
    return "?";
}

inline AgentKind parse_agent_kind(std::string_view s) {
    for (auto k : {AgentKind::RlZero, AgentKind::RlRandom, AgentKind::RulesBased, AgentKind::RandomWalk})
        if (agent_name(k) == s) return k;
    throw ConfigError("unknown agent '" + std::string(s) + "'");
}

/// One adaptation policy with its own learning state. The caller presents a
/// spider, reports the observed anxiety via step(), and applies the returned
/// action (nullopt = keep the spider).
class Agent {
public:
    Agent(AgentKind kind, const AgentConfig& cfg, EmptyCandidatePolicy empty_policy = EmptyCandidatePolicy::Hold)
        : kind_(kind), cfg_(cfg), empty_policy_(empty_policy),
          q_(kind == AgentKind::RlRandom ? QInit::Random : QInit::Zero, derive_seed(cfg.seed, {0x71})) {
        cfg_.validate();
    }

    AgentKind kind() const { return kind_; }
    const QTable& q_table() const { return q_; }

    std::optional<AttributeAction> step(const SpiderAttributes& state, AnxietyLevel observed, int target, Rng& rng) {
        last_reward_ = reward(observed, RewardSpec{target});
        switch (kind_) {
        case AgentKind::RlZero:
        case AgentKind::RlRandom: {
            learn(state);
            const auto a = ql_select_action(q_, state, cfg_, rng);
            pending_ = Pending{state, a};
            return a;
        }
        case AgentKind::RulesBased:
            return rb_select_action(state, CorrectionFactor::from_levels(observed.value(), target), rng,
                                    empty_policy_);
        case AgentKind::RandomWalk: {
            const auto actions = valid_actions(state);
            return actions[uniform_index(rng, actions.size())];
        }
        }
        return std::nullopt;
    }

    /// Apply the backup for the last transition without choosing a new action.
    void finish(const SpiderAttributes& state, AnxietyLevel observed, int target) {
        last_reward_ = reward(observed, RewardSpec{target});
        learn(state);
    }

    /// Forget the in-flight transition (start of a new episode); learned values persist.
    void reset_episode() { pending_.reset(); }

    double last_reward() const { return last_reward_; }

private:
    struct Pending {
        SpiderAttributes state;
        AttributeAction action;
    };

    void learn(const SpiderAttributes& state) {
        if (pending_ && (kind_ == AgentKind::RlZero || kind_ == AgentKind::RlRandom)) {
            ql_update(q_, pending_->state, pending_->action, last_reward_, state, cfg_);
        }
        pending_.reset();
    }

    AgentKind kind_;
    AgentConfig cfg_;
    EmptyCandidatePolicy empty_policy_;
    QTable q_;
    std::optional<Pending> pending_;
    double last_reward_ = 0.0;
};

} // namespace edpcgrl
