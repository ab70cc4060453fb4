#pragma once

// Cross-subject analysis of simulated sessions: per-subject signed-rank tests
// of high- vs low-target anxiety, and aggregate paired t-tests.

#include <string>
#include <utility>
#include <vector>

#include "edpcgrl/error.hpp"
#include "edpcgrl/session.hpp"
#include "edpcgrl/stats/tests.hpp"

namespace edpcgrl {

struct SubjectAgentReport {
    std::string subject;
    SessionAgent agent{};
    double mean_low = 0.0;
    double mean_high = 0.0;
    double mse_low = 0.0;
    double mse_high = 0.0;
    /// Step-paired high vs low, alternative "greater"; undefined when every pair ties.
    stats::WilcoxonResult wilcoxon;
    bool wilcoxon_defined = false;
};

inline std::vector<SubjectAgentReport> subject_reports(const std::string& subject, const SessionTrace& trace,
                                                       const SessionProtocol& protocol) {
    const auto summary = segment_summary(trace, protocol);
    std::vector<SubjectAgentReport> out;
    for (auto agent : {SessionAgent::RL, SessionAgent::Rules}) {
        const auto& low = find_segment(summary, agent, Phase::LowAnxiety);
        const auto& high = find_segment(summary, agent, Phase::HighAnxiety);
        SubjectAgentReport r;
        r.subject = subject;
        r.agent = agent;
        r.mean_low = low.mean_anxiety;
        r.mean_high = high.mean_anxiety;
        r.mse_low = low.mse;
        r.mse_high = high.mse;
        stats::PairedSamples ps;
        ps.a.assign(high.anxiety.begin(), high.anxiety.end());
        ps.b.assign(low.anxiety.begin(), low.anxiety.end());
        try {
            r.wilcoxon = stats::wilcoxon_signed_rank(ps, stats::Alternative::Greater);
            r.wilcoxon_defined = true;
        } catch (const DegenerateInputError&) {
            r.wilcoxon_defined = false;
        }
        out.push_back(r);
    }
    return out;
}

struct AggregateTest {
    std::string name;
    std::string alternative;
    int n = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    bool t_defined = false;
    bool wilcoxon_defined = false;
    stats::TTestResult t;
    stats::WilcoxonResult wilcoxon;
};

namespace detail {

inline AggregateTest aggregate(std::string name, const std::vector<double>& a, const std::vector<double>& b,
                               stats::Alternative alt) {
    AggregateTest r;
    r.name = std::move(name);
    r.alternative = std::string(stats::alternative_name(alt));
    r.n = static_cast<int>(a.size());
    double sa = 0.0, sb = 0.0;
    for (double v : a) sa += v;
    for (double v : b) sb += v;
    if (!a.empty()) {
        r.mean_a = sa / static_cast<double>(a.size());
        r.mean_b = sb / static_cast<double>(b.size());
    }
    const stats::PairedSamples ps{a, b};
    try {
        r.t = stats::paired_t_test(ps, alt);
        r.t_defined = true;
    } catch (const Error&) {
    }
    try {
        r.wilcoxon = stats::wilcoxon_signed_rank(ps, alt);
        r.wilcoxon_defined = true;
    } catch (const Error&) {
    }
    return r;
}

} // namespace detail

/// Across subjects: high > low mean anxiety for each agent, and RL vs Rules
/// MSE in each segment (RL lower).
inline std::vector<AggregateTest> aggregate_tests(const std::vector<SubjectAgentReport>& reports) {
    std::vector<double> rl_low, rl_high, ru_low, ru_high, rl_mse_low, ru_mse_low, rl_mse_high, ru_mse_high;
    for (const auto& r : reports) {
        if (r.agent == SessionAgent::RL) {
            rl_low.push_back(r.mean_low);
            rl_high.push_back(r.mean_high);
            rl_mse_low.push_back(r.mse_low);
            rl_mse_high.push_back(r.mse_high);
        } else {
            ru_low.push_back(r.mean_low);
            ru_high.push_back(r.mean_high);
            ru_mse_low.push_back(r.mse_low);
            ru_mse_high.push_back(r.mse_high);
        }
    }
    if (rl_low.size() != ru_low.size()) throw IntegrityError("every subject needs both an RL and a Rules block");
    using stats::Alternative;
    return {
        detail::aggregate("RL_high_vs_low_mean", rl_high, rl_low, Alternative::Greater),
        detail::aggregate("Rules_high_vs_low_mean", ru_high, ru_low, Alternative::Greater),
        detail::aggregate("low_mse_RL_vs_Rules", rl_mse_low, ru_mse_low, Alternative::Less),
        detail::aggregate("high_mse_RL_vs_Rules", rl_mse_high, ru_mse_high, Alternative::Less),
    };
}

} // namespace edpcgrl
