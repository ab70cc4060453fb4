#pragma once

// Search experiment: how many spiders does each policy show a virtual
// subject before one lands in a target stress category?

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "edpcgrl/agents.hpp"
#include "edpcgrl/error.hpp"
#include "edpcgrl/parallel.hpp"
#include "edpcgrl/subjects.hpp"

namespace edpcgrl {

struct StressCategory {
    std::string name;
    int lo = 0;
    int hi = 0;

    bool contains(AnxietyLevel a) const { return a.value() >= lo && a.value() <= hi; }
    /// Reward target used by the learning agents: the interval midpoint.
    int target() const { return (lo + hi) / 2; }
};

inline std::vector<StressCategory> default_categories() {
    return {{"low", 1, 3}, {"moderate", 4, 6}, {"high", 7, 9}};
}

inline std::vector<SpiderAttributes> default_initial_states() {
    return {SpiderAttributes::minimal(), SpiderAttributes({1, 1, 1, 1, 1, 1}), SpiderAttributes::maximal()};
}

/// How long a learning agent keeps its Q-table: one attempt, the repetitions
/// of one (subject, category, initial state) cell, or every initial state of
/// one (subject, category).
enum class QPersistence { PerAttempt, PerCell, PerCategory };

inline std::string_view persistence_name(QPersistence p) {
    switch (p) {
    case QPersistence::PerAttempt: return "attempt";
    case QPersistence::PerCell: return "cell";
    case QPersistence::PerCategory: return "category";
    }
    return "?";
}

inline QPersistence parse_persistence(std::string_view s) {
    for (auto p : {QPersistence::PerAttempt, QPersistence::PerCell, QPersistence::PerCategory})
        if (persistence_name(p) == s) return p;
    throw ConfigError("unknown q persistence '" + std::string(s) + "' (expected attempt|cell|category)");
}

struct SearchExperimentConfig {
    std::vector<StressCategory> categories = default_categories();
    std::vector<SpiderAttributes> initial_states = default_initial_states();
    int budget = 30;
    int repetitions = 10;
    std::vector<AgentKind> agents{AgentKind::RlZero, AgentKind::RlRandom, AgentKind::RulesBased,
                                  AgentKind::RandomWalk};
    AgentConfig agent;
    EmptyCandidatePolicy empty_policy = EmptyCandidatePolicy::Hold;
    QPersistence q_persistence = QPersistence::PerCell;
    /// Accuracy below which spiders_presented is not reported.
    double report_threshold = 0.75;
    std::uint64_t master_seed = 2024;
    unsigned threads = 0;

    void validate() const {
        if (budget < 0) throw ConfigError("experiment.budget must be >= 0");
        if (repetitions < 1) throw ConfigError("experiment.repetitions must be >= 1");
        for (const auto& c : categories) {
            if (c.lo < kMinAnxiety || c.hi > kMaxAnxiety || c.lo > c.hi) {
                throw ConfigError("category '" + c.name + "' bounds must satisfy 0 <= lo <= hi <= 10");
            }
        }
        if (initial_states.empty()) throw ConfigError("at least one initial state is required");
        agent.validate();
    }
};

struct AttemptOutcome {
    bool success = false;
    /// Spiders shown, counting the initial spider.
    int presented = 0;
};

struct SearchResult {
    AgentKind agent{};
    std::string category;
    int initial_state = 0; // state index
    int attempts = 0;
    int successes = 0;
    double spiders_presented = std::numeric_limits<double>::quiet_NaN();
    double accuracy = 0.0;
    bool reported = false;
};

/// One attempt: show the initial spider, then let the agent edit it until the
/// subject's anxiety falls inside the category or the budget is spent.
inline AttemptOutcome run_attempt(Agent& agent, SubjectSession& subject, const StressCategory& category,
                                  const SpiderAttributes& initial, int budget, Rng& rng) {
    AttemptOutcome out;
    if (budget <= 0) return out;
    agent.reset_episode();
    SpiderAttributes spider = initial;
    AnxietyLevel anxiety = subject.present(spider);
    out.presented = 1;
    while (true) {
        if (category.contains(anxiety)) {
            agent.finish(spider, anxiety, category.target());
            out.success = true;
            return out;
        }
        if (out.presented >= budget) return out;
        const auto action = agent.step(spider, anxiety, category.target(), rng);
        if (action) spider = apply_action(spider, *action);
        anxiety = subject.present(spider);
        ++out.presented;
    }
}

namespace detail {

struct CellTally {
    int attempts = 0;
    int successes = 0;
    long long presented_on_success = 0;
};

} // namespace detail

/// Results are ordered agent-major, then category, then initial state.
inline std::vector<SearchResult> run_search(const SearchExperimentConfig& cfg,
                                            const std::vector<VirtualSubject>& population) {
    cfg.validate();
    if (population.empty()) throw ConfigError("search experiment needs a non-empty population");

    const std::size_t n_agents = cfg.agents.size();
    const std::size_t n_cat = cfg.categories.size();
    const std::size_t n_init = cfg.initial_states.size();
    const std::size_t n_cells = n_agents * n_cat * n_init;

    // tallies[subject][cell]; each worker fills only its subject's row.
    std::vector<std::vector<detail::CellTally>> tallies(population.size(),
                                                        std::vector<detail::CellTally>(n_cells));
    parallel_for(
        population.size(),
        [&](std::size_t s) {
            for (std::size_t ag = 0; ag < n_agents; ++ag) {
                const auto kind = static_cast<std::uint64_t>(cfg.agents[ag]);
                auto make_agent = [&](std::uint64_t seed) {
                    AgentConfig ac = cfg.agent;
                    ac.seed = seed;
                    return Agent(cfg.agents[ag], ac, cfg.empty_policy);
                };
                for (std::size_t c = 0; c < n_cat; ++c) {
                    Agent agent = make_agent(derive_seed(cfg.master_seed, {0x5eb, s, kind, c}));
                    for (std::size_t i = 0; i < n_init; ++i) {
                        const std::size_t cell = (ag * n_cat + c) * n_init + i;
                        const std::uint64_t cell_seed = derive_seed(cfg.master_seed, {0x5ea, s, kind, c, i});
                        if (cfg.q_persistence != QPersistence::PerCategory) agent = make_agent(cell_seed);
                        auto& tally = tallies[s][cell];
                        for (int r = 0; r < cfg.repetitions; ++r) {
                            const auto rep = static_cast<std::uint64_t>(r);
                            if (cfg.q_persistence == QPersistence::PerAttempt && r > 0) {
                                agent = make_agent(derive_seed(cell_seed, {rep}));
                            }
                            Rng rng(derive_seed(cell_seed, {0xac7, rep}));
                            SubjectSession subject(population[s], derive_seed(cell_seed, {0x50b, rep}));
                            const auto outcome = run_attempt(agent, subject, cfg.categories[c],
                                                             cfg.initial_states[i], cfg.budget, rng);
                            ++tally.attempts;
                            if (outcome.success) {
                                ++tally.successes;
                                tally.presented_on_success += outcome.presented;
                            }
                        }
                    }
                }
            }
        },
        cfg.threads);

    std::vector<SearchResult> results;
    results.reserve(n_cells);
    for (std::size_t ag = 0; ag < n_agents; ++ag) {
        for (std::size_t c = 0; c < n_cat; ++c) {
            for (std::size_t i = 0; i < n_init; ++i) {
                const std::size_t cell = (ag * n_cat + c) * n_init + i;
                detail::CellTally total;
                for (const auto& row : tallies) {
                    total.attempts += row[cell].attempts;
                    total.successes += row[cell].successes;
                    total.presented_on_success += row[cell].presented_on_success;
                }
                SearchResult r;
                r.agent = cfg.agents[ag];
                r.category = cfg.categories[c].name;
                r.initial_state = encode(cfg.initial_states[i]);
                r.attempts = total.attempts;
                r.successes = total.successes;
                r.accuracy = total.attempts ? static_cast<double>(total.successes) / total.attempts : 0.0;
                r.reported = r.successes > 0 && r.accuracy >= cfg.report_threshold;
                if (r.reported) {
                    r.spiders_presented = static_cast<double>(total.presented_on_success) / total.successes;
                }
                results.push_back(r);
            }
        }
    }
    return results;
}

} // namespace edpcgrl
