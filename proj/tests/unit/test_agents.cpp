#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "edpcgrl/agents.hpp"

using namespace edpcgrl;

namespace {

SpiderAttributes S(std::array<int, 6> v) { return SpiderAttributes(v); }

// Correction-factor thresholds per attribute, restated as explicit intervals.
int threshold_level(int attr, double cf) {
    struct Row {
        double two_below, zero_above;
    };
    const Row rows[] = {{-0.7, 0.3}, {-0.5, 0.4}, {-0.7, -0.1}, {-0.8, -0.2}, {-1.0, 0.0}, {-0.8, -0.2}};
    const auto& r = rows[attr];
    if (cf > r.zero_above) return 0;
    if (cf >= r.two_below) return 1;
    return attr == 4 ? 1 : 2;
}

} // namespace

TEST(QTable, ZeroInitAndInvalidSlots) {
    const QTable q(QInit::Zero);
    for (int s = 0; s < kNumStates; ++s) {
        const auto spider = decode(s);
        for (int slot = 0; slot < kNumActionSlots; ++slot) {
            const double v = q.slot_value(s, slot);
            if (is_valid_action(spider, action_from_slot(slot))) EXPECT_EQ(v, 0.0);
            else EXPECT_TRUE(std::isnan(v));
        }
    }
}

TEST(QTable, RandomInitInUnitIntervalAndSeeded) {
    const QTable a(QInit::Random, 7), b(QInit::Random, 7), c(QInit::Random, 8);
    EXPECT_TRUE(a == b);
    EXPECT_FALSE(a == c);
    for (const auto& act : valid_actions(S({1, 1, 1, 1, 1, 1}))) {
        const double v = a.get(encode(S({1, 1, 1, 1, 1, 1})), act);
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(QLearning, UpdateHandComputed) {
    QTable q;
    AgentConfig cfg;
    const auto s = S({1, 0, 1, 1, 1, 1});
    const AttributeAction a{1, +1};
    const auto s2 = apply_action(s, a);
    // Q = 0 + 0.5 * (1 + 0.8 * 0 - 0) = 0.5
    ql_update(q, s, a, 1.0, s2, cfg);
    EXPECT_DOUBLE_EQ(q.get(encode(s), a), 0.5);
    // Raise one next-state value to 0.4: Q = 0.5 + 0.5 * (1 + 0.32 - 0.5) = 0.91
    q.set(encode(s2), {0, +1}, 0.4);
    ql_update(q, s, a, 1.0, s2, cfg);
    EXPECT_NEAR(q.get(encode(s), a), 0.91, 1e-15);
}

TEST(QLearning, UpdateRejectsInconsistentTransition) {
    QTable q;
    const auto s = S({1, 1, 1, 1, 1, 1});
    EXPECT_THROW(ql_update(q, s, {0, +1}, 0.0, s, AgentConfig{}), InvalidActionError);
    EXPECT_THROW(ql_update(q, SpiderAttributes::maximal(), {0, +1}, 0.0, SpiderAttributes::maximal(), AgentConfig{}),
                 InvalidActionError);
}

TEST(QLearning, GreedyPicksArgmaxAndBreaksTiesCanonically) {
    QTable q;
    AgentConfig cfg;
    cfg.epsilon = 0.0;
    Rng rng(1);
    const auto s = S({1, 1, 1, 1, 1, 1});
    EXPECT_EQ(ql_select_action(q, s, cfg, rng), (AttributeAction{0, +1}));
    q.set(encode(s), {3, -1}, 0.2);
    EXPECT_EQ(ql_select_action(q, s, cfg, rng), (AttributeAction{3, -1}));
    q.set(encode(s), {2, +1}, 0.2);
    EXPECT_EQ(ql_select_action(q, s, cfg, rng), (AttributeAction{2, +1}));
}

TEST(QLearning, FullExplorationIsUniformOverValidActions) {
    QTable q;
    AgentConfig cfg;
    cfg.epsilon = 1.0;
    Rng rng(99);
    const auto s = SpiderAttributes::minimal();
    std::map<int, int> counts;
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        const auto a = ql_select_action(q, s, cfg, rng);
        ASSERT_TRUE(is_valid_action(s, a));
        ++counts[action_slot(a)];
    }
    ASSERT_EQ(counts.size(), 6u);
    for (const auto& [slot, c] : counts) EXPECT_NEAR(c / double(n), 1.0 / 6.0, 0.01);
}

TEST(QLearning, AlwaysValidUnderRandomPlay) {
    QTable q(QInit::Random, 3);
    AgentConfig cfg;
    Rng rng(5);
    auto s = SpiderAttributes::minimal();
    for (int i = 0; i < 2000; ++i) {
        const auto a = ql_select_action(q, s, cfg, rng);
        ASSERT_TRUE(is_valid_action(s, a));
        const auto next = apply_action(s, a);
        ql_update(q, s, a, uniform01(rng) * 2 - 1, next, cfg);
        s = next;
    }
}

TEST(AgentConfig, Validation) {
    AgentConfig c;
    c.epsilon = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.alpha = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.gamma = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(CorrectionFactor, RangeAndFromLevels) {
    EXPECT_DOUBLE_EQ(CorrectionFactor::from_levels(4, 7).value(), -0.3);
    EXPECT_DOUBLE_EQ(CorrectionFactor::from_levels(10, 0).value(), 1.0);
    EXPECT_THROW(CorrectionFactor(1.1), RangeError);
    EXPECT_THROW(CorrectionFactor(std::nan("")), RangeError);
}

TEST(RulesBased, TargetsMatchTableAcrossCorrectionRange) {
    for (int k = -10; k <= 10; ++k) {
        const double cf = k / 10.0;
        const auto t = rb_targets(CorrectionFactor(cf));
        for (int a = 0; a < 6; ++a)
            EXPECT_EQ(t[static_cast<std::size_t>(a)], threshold_level(a, cf)) << "attr " << a << " cf " << cf;
    }
    // Interval edges.
    for (double cf : {-0.71, -0.7, -0.51, -0.5, -0.81, -0.8, -0.2, -0.19, -0.1, -0.09, 0.0, 0.01, 0.3, 0.31, 0.4, 0.41}) {
        const auto t = rb_targets(CorrectionFactor(cf));
        for (int a = 0; a < 6; ++a) EXPECT_EQ(t[static_cast<std::size_t>(a)], threshold_level(a, cf)) << cf;
    }
}

TEST(RulesBased, WorkedExampleFirstStep) {
    const auto start = S({1, 0, 1, 1, 1, 1});
    const auto cf = CorrectionFactor::from_levels(4, 7);
    EXPECT_EQ(rb_candidates(start, cf), std::vector<int>{1});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto a = rb_select_action(start, cf, rng);
        ASSERT_TRUE(a.has_value());
        EXPECT_EQ(apply_action(start, *a), S({1, 1, 1, 1, 1, 1}));
    }
}

TEST(RulesBased, EveryStepMovesTowardTarget) {
    Rng rng(11);
    for (int idx = 0; idx < kNumStates; idx += 7) {
        const auto s = decode(idx);
        for (int k = -10; k <= 10; k += 3) {
            const CorrectionFactor cf(k / 10.0);
            const auto targets = rb_targets(cf);
            const auto a = rb_select_action(s, cf, rng);
            if (!a) {
                EXPECT_EQ(s, targets);
                continue;
            }
            const auto next = apply_action(s, *a);
            const auto i = static_cast<std::size_t>(a->attribute);
            EXPECT_LT(std::abs(next[i] - targets[i]), std::abs(s[i] - targets[i]));
        }
    }
}

TEST(RulesBased, EmptyCandidatePolicies) {
    const CorrectionFactor cf(-0.3); // targets all 1
    const auto at_target = S({1, 1, 1, 1, 1, 1});
    Rng rng(2);
    EXPECT_FALSE(rb_select_action(at_target, cf, rng, EmptyCandidatePolicy::Hold).has_value());
    const auto nudged = rb_select_action(at_target, cf, rng, EmptyCandidatePolicy::Nudge);
    ASSERT_TRUE(nudged.has_value());
    EXPECT_EQ(nudged->direction, +1);
    // Zero factor: nothing to correct, so no nudge either.
    const SpiderAttributes zero_target(rb_targets(CorrectionFactor(0.0)));
    EXPECT_FALSE(rb_select_action(zero_target, CorrectionFactor(0.0), rng, EmptyCandidatePolicy::Nudge).has_value());
}

TEST(Agent, SameSeedSameDecisions) {
    AgentConfig cfg;
    cfg.seed = 42;
    for (auto kind : {AgentKind::RlZero, AgentKind::RlRandom, AgentKind::RulesBased, AgentKind::RandomWalk}) {
        Agent a(kind, cfg), b(kind, cfg);
        Rng ra(1), rb(1);
        auto sa = SpiderAttributes::minimal(), sb = sa;
        for (int i = 0; i < 50; ++i) {
            const AnxietyLevel obs(i % 11);
            const auto xa = a.step(sa, obs, 7, ra);
            const auto xb = b.step(sb, obs, 7, rb);
            ASSERT_EQ(xa.has_value(), xb.has_value());
            if (xa) {
                EXPECT_EQ(*xa, *xb);
                sa = apply_action(sa, *xa);
                sb = apply_action(sb, *xb);
            }
        }
        EXPECT_TRUE(a.q_table() == b.q_table());
    }
}

TEST(Agent, LearnsOnlyForRlKinds) {
    AgentConfig cfg;
    Agent rl(AgentKind::RlZero, cfg), rules(AgentKind::RulesBased, cfg);
    Rng rng(3);
    auto s = SpiderAttributes::minimal();
    const auto a = rl.step(s, AnxietyLevel(0), 7, rng);
    ASSERT_TRUE(a);
    const auto s2 = apply_action(s, *a);
    rl.finish(s2, AnxietyLevel(7), 7);
    EXPECT_DOUBLE_EQ(rl.last_reward(), 1.0);
    EXPECT_DOUBLE_EQ(rl.q_table().get(encode(s), *a), 0.5);
    EXPECT_TRUE(rules.q_table() == QTable());
}

TEST(Agent, NamesRoundTrip) {
    for (auto k : {AgentKind::RlZero, AgentKind::RlRandom, AgentKind::RulesBased, AgentKind::RandomWalk})
        EXPECT_EQ(parse_agent_kind(agent_name(k)), k);
    EXPECT_THROW(parse_agent_kind("sarsa"), ConfigError);
}
