#pragma once

#include <array>
#include <string>
#include <utility>

#include "edpcgrl/error.hpp"

namespace edpcgrl::stats {

/// Six-item short-form state anxiety questionnaire, items scored 1..4.
struct Stai6Response {
    int calm = 1;
    int tense = 1;
    int upset = 1;
    int relaxed = 1;
    int content = 1;
    int worried = 1;
};

/// Reverse-scores the calm/relaxed/content items, sums, and rescales the
/// 6..24 sum to 20..80.
inline double stai6_score(const Stai6Response& r) {
    const std::array<std::pair<const char*, int>, 6> items{{{"calm", r.calm},
                                                            {"tense", r.tense},
                                                            {"upset", r.upset},
                                                            {"relaxed", r.relaxed},
                                                            {"content", r.content},
                                                            {"worried", r.worried}}};
    for (const auto& [name, v] : items) {
        if (v < 1 || v > 4) throw RangeError(std::string("STAI-6 item '") + name + "' must be in 1..4");
    }
    const int sum = (5 - r.calm) + r.tense + r.upset + (5 - r.relaxed) + (5 - r.content) + r.worried;
    return sum / 6.0 * 20.0;
}

} // namespace edpcgrl::stats
