#pragma once

// Virtual subjects: parametric anxiety-response functions that stand in for
// human participants when evaluating adaptation policies.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "edpcgrl/error.hpp"
#include "edpcgrl/reward.hpp"
#include "edpcgrl/rng.hpp"
#include "edpcgrl/state_space.hpp"

namespace edpcgrl {

struct ImpactDistribution {
    double mean = 0.0;
    double std = 0.0;
};

struct SubjectPopulationConfig {
    // Shipped defaults are illustrative, not measured impact factors: movement
    // attributes and size weigh more than hairiness and colour.
    std::array<ImpactDistribution, kNumAttributes> impact{{
        {1.0, 0.3},  // locomotion
        {0.9, 0.3},  // amount_of_movement
        {1.0, 0.3},  // closeness
        {0.8, 0.25}, // largeness
        {0.4, 0.2},  // hairiness
        {0.3, 0.15}, // color
    }};
    double noise_sigma = 0.0;
    int n_subjects = 100;
    std::uint64_t master_seed = 2024;
    /// Per-exposure multiplicative decay of the response to an already-seen
    /// spider; 1.0 disables habituation.
    double habituation_decay = 1.0;

    void validate() const {
        bool any_positive = false;
        for (std::size_t i = 0; i < kNumAttributes; ++i) {
            if (!(impact[i].std >= 0.0)) {
                throw ConfigError("impact." + std::string(kAttributeNames[i]) + ".std must be >= 0");
            }
            if (!std::isfinite(impact[i].mean)) {
                throw ConfigError("impact." + std::string(kAttributeNames[i]) + ".mean must be finite");
            }
            any_positive = any_positive || impact[i].mean > 0.0;
        }
        if (!any_positive) throw ConfigError("at least one impact mean must be > 0");
        if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
        if (n_subjects < 0) throw ConfigError("n_subjects must be >= 0");
        if (!(habituation_decay > 0.0 && habituation_decay <= 1.0)) {
            throw ConfigError("habituation_decay must be in (0,1]");
        }
    }
};

struct VirtualSubject {
    std::array<double, kNumAttributes> weights{};
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double habituation_decay = 1.0;

    /// Weighted attribute sum of the all-max spider.
    double max_response() const {
        double m = 0.0;
        for (std::size_t i = 0; i < kNumAttributes; ++i) m += weights[i] * max_level(i);
        return m;
    }
};

inline std::vector<VirtualSubject> sample_population(const SubjectPopulationConfig& cfg) {
    cfg.validate();
    constexpr int kMaxRetries = 100;
    std::vector<VirtualSubject> out;
    out.reserve(static_cast<std::size_t>(cfg.n_subjects));
    for (int s = 0; s < cfg.n_subjects; ++s) {
        Rng rng(derive_seed(cfg.master_seed, {0x5b, static_cast<std::uint64_t>(s)}));
        VirtualSubject subj;
        subj.noise_sigma = cfg.noise_sigma;
        subj.habituation_decay = cfg.habituation_decay;
        subj.seed = derive_seed(cfg.master_seed, {0x5e, static_cast<std::uint64_t>(s)});
        int attempt = 0;
        for (;; ++attempt) {
            if (attempt == kMaxRetries) {
                throw ConfigError("subject " + std::to_string(s) + ": all-zero weights after " +
                                  std::to_string(kMaxRetries) + " draws");
            }
            for (std::size_t i = 0; i < kNumAttributes; ++i)
                subj.weights[i] = std::max(0.0, gaussian(rng, cfg.impact[i].mean, cfg.impact[i].std));
            if (subj.max_response() > 0.0) break;
        }
        out.push_back(subj);
    }
    return out;
}

/// Noiseless continuous response on the 0..10 scale.
inline double response_fraction(const VirtualSubject& subject, const SpiderAttributes& spider) {
    double num = 0.0;
    for (std::size_t i = 0; i < kNumAttributes; ++i) num += subject.weights[i] * spider[i];
    return num / subject.max_response();
}

namespace detail {

inline AnxietyLevel discretize(double x) {
    return AnxietyLevel(static_cast<int>(std::clamp(std::lround(x), 0L, 10L)));
}

} // namespace detail

/// One noisy evaluation without habituation. Draws from rng only when the
/// subject's noise sigma is positive.
inline AnxietyLevel evaluate(const VirtualSubject& subject, const SpiderAttributes& spider, Rng& rng) {
    double x = 10.0 * response_fraction(subject, spider);
    if (subject.noise_sigma > 0.0) x += gaussian(rng, 0.0, subject.noise_sigma);
    return detail::discretize(x);
}

/// A subject during one experiment: owns the subject's noise stream and, when
/// habituation is enabled, the per-spider exposure history.
class SubjectSession {
public:
    SubjectSession(const VirtualSubject& subject, std::uint64_t stream)
        : subject_(subject), rng_(derive_seed(subject.seed, {stream})) {}

    const VirtualSubject& subject() const { return subject_; }

    AnxietyLevel present(const SpiderAttributes& spider) {
        const int idx = encode(spider);
        const int prior = exposures_[idx]++;
        double x = 10.0 * response_fraction(subject_, spider) * std::pow(subject_.habituation_decay, prior);
        if (subject_.noise_sigma > 0.0) x += gaussian(rng_, 0.0, subject_.noise_sigma);
        return detail::discretize(x);
    }

    int exposures(const SpiderAttributes& spider) const {
        auto it = exposures_.find(encode(spider));
        return it == exposures_.end() ? 0 : it->second;
    }

private:
    VirtualSubject subject_;
    Rng rng_;
    std::map<int, int> exposures_;
};

} // namespace edpcgrl
