#pragma once

// The spider content space: six ordinal attributes, 486 states, and the
// single-step edits an adaptation policy may apply.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edpcgrl/error.hpp"

namespace edpcgrl {

enum class Attribute : std::uint8_t {
    Locomotion = 0,
    AmountOfMovement = 1,
    Closeness = 2,
    Largeness = 3,
    Hairiness = 4,
    Color = 5,
};

inline constexpr std::size_t kNumAttributes = 6;

/// Number of levels per attribute, in canonical column order.
inline constexpr std::array<int, kNumAttributes> kAttributeLevels{3, 3, 3, 3, 2, 3};

inline constexpr std::array<std::string_view, kNumAttributes> kAttributeNames{
    "locomotion", "amount_of_movement", "closeness", "largeness", "hairiness", "color"};

/// Short column names used in trace and cluster CSVs.
inline constexpr std::array<std::string_view, kNumAttributes> kAttributeColumns{
    "loc", "aom", "close", "large", "hair", "color"};

inline constexpr int kNumStates = [] {
    int n = 1;
    for (int l : kAttributeLevels) n *= l;
    return n;
}();
static_assert(kNumStates == 486);

constexpr int max_level(std::size_t attr) { return kAttributeLevels[attr] - 1; }

class SpiderAttributes {
public:
    constexpr SpiderAttributes() = default;

    /// Throws RangeError if any value is outside its attribute's bounds.
    explicit SpiderAttributes(const std::array<int, kNumAttributes>& values) : values_(values) {
        for (std::size_t i = 0; i < kNumAttributes; ++i) {
            if (values_[i] < 0 || values_[i] > max_level(i)) {
                throw RangeError("attribute " + std::string(kAttributeNames[i]) + " = " +
                                 std::to_string(values_[i]) + " out of range 0.." +
                                 std::to_string(max_level(i)));
            }
        }
    }

    static SpiderAttributes minimal() { return SpiderAttributes{}; }
    static SpiderAttributes maximal() {
        std::array<int, kNumAttributes> v{};
        for (std::size_t i = 0; i < kNumAttributes; ++i) v[i] = max_level(i);
        return SpiderAttributes(v);
    }

    constexpr int operator[](std::size_t attr) const { return values_[attr]; }
    constexpr int get(Attribute a) const { return values_[static_cast<std::size_t>(a)]; }
    constexpr const std::array<int, kNumAttributes>& values() const { return values_; }

    friend constexpr bool operator==(const SpiderAttributes&, const SpiderAttributes&) = default;

private:
    std::array<int, kNumAttributes> values_{};
};

struct AttributeAction {
    int attribute = 0;  // 0..5
    int direction = +1; // +1 or -1

    friend constexpr bool operator==(const AttributeAction&, const AttributeAction&) = default;
};

/// Canonical slot of an action: attribute ascending, increment before decrement.
inline constexpr int kNumActionSlots = 2 * static_cast<int>(kNumAttributes);

constexpr int action_slot(AttributeAction a) { return 2 * a.attribute + (a.direction > 0 ? 0 : 1); }
constexpr AttributeAction action_from_slot(int slot) { return {slot / 2, slot % 2 == 0 ? +1 : -1}; }

/// Mixed-radix index, locomotion most significant.
inline int encode(const SpiderAttributes& s) {
    int idx = 0;
    for (std::size_t i = 0; i < kNumAttributes; ++i) idx = idx * kAttributeLevels[i] + s[i];
    return idx;
}

inline SpiderAttributes decode(int state_index) {
    if (state_index < 0 || state_index >= kNumStates) {
        throw RangeError("state index " + std::to_string(state_index) + " out of range 0.." +
                         std::to_string(kNumStates - 1));
    }
    std::array<int, kNumAttributes> v{};
    for (std::size_t i = kNumAttributes; i-- > 0;) {
        v[i] = state_index % kAttributeLevels[i];
        state_index /= kAttributeLevels[i];
    }
    return SpiderAttributes(v);
}

inline bool is_valid_action(const SpiderAttributes& s, AttributeAction a) {
    if (a.attribute < 0 || a.attribute >= static_cast<int>(kNumAttributes)) return false;
    if (a.direction != 1 && a.direction != -1) return false;
    const int next = s[static_cast<std::size_t>(a.attribute)] + a.direction;
    return next >= 0 && next <= max_level(static_cast<std::size_t>(a.attribute));
}

/// All in-bounds +/-1 edits, in canonical slot order.
inline std::vector<AttributeAction> valid_actions(const SpiderAttributes& s) {
    std::vector<AttributeAction> out;
    out.reserve(kNumActionSlots);
    for (int slot = 0; slot < kNumActionSlots; ++slot) {
        const auto a = action_from_slot(slot);
        if (is_valid_action(s, a)) out.push_back(a);
    }
    return out;
}

inline SpiderAttributes apply_action(const SpiderAttributes& s, AttributeAction a) {
    if (!is_valid_action(s, a)) {
        throw InvalidActionError("action (attr " + std::to_string(a.attribute) + ", " +
                                 (a.direction > 0 ? "+1" : "-1") + ") leaves bounds");
    }
    auto v = s.values();
    v[static_cast<std::size_t>(a.attribute)] += a.direction;
    return SpiderAttributes(v);
}

/// Number of attributes whose values differ.
inline int hamming_distance(const SpiderAttributes& a, const SpiderAttributes& b) {
    int d = 0;
    for (std::size_t i = 0; i < kNumAttributes; ++i) d += a[i] != b[i];
    return d;
}

// Rendering parameters looked up from the attribute levels. Locomotion has
// no numeric parameters (it selects stationary / walk / walk+jump behaviour).

struct Rgb {
    int r = 0, g = 0, b = 0;
    friend constexpr bool operator==(const Rgb&, const Rgb&) = default;
};

struct VisualParameters {
    double speed = 0;
    double waiting_time_s = 0;
    double walking_duration_s = 0;
    double inner_radius_m = 0;
    double outer_radius_m = 0;
    double scale = 0;
    double fur_length = 0;
    Rgb color;
};

inline VisualParameters visual_parameters(const SpiderAttributes& s) {
    static constexpr std::array<double, 3> speed{1.0, 1.5, 3.0};
    static constexpr std::array<double, 3> waiting{5.0, 3.0, 1.0};
    static constexpr std::array<double, 3> walking{8.0, 10.0, 12.0};
    static constexpr std::array<double, 3> r1{7.0, 5.0, 3.0};
    static constexpr std::array<double, 3> r2{9.0, 7.0, 5.0};
    static constexpr std::array<double, 3> scale{0.25, 0.5, 1.0};
    static constexpr std::array<double, 2> fur{0.0, 0.08};
    static constexpr std::array<Rgb, 3> color{Rgb{123, 113, 113}, Rgb{77, 40, 42}, Rgb{0, 0, 0}};

    const auto aom = static_cast<std::size_t>(s.get(Attribute::AmountOfMovement));
    const auto close = static_cast<std::size_t>(s.get(Attribute::Closeness));
    VisualParameters p;
    p.speed = speed[aom];
    p.waiting_time_s = waiting[aom];
    p.walking_duration_s = walking[aom];
    p.inner_radius_m = r1[close];
    p.outer_radius_m = r2[close];
    p.scale = scale[static_cast<std::size_t>(s.get(Attribute::Largeness))];
    p.fur_length = fur[static_cast<std::size_t>(s.get(Attribute::Hairiness))];
    p.color = color[static_cast<std::size_t>(s.get(Attribute::Color))];
    return p;
}

inline std::string to_string(const SpiderAttributes& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        if (i) out += ',';
        out += std::to_string(s[i]);
    }
    return out + "]";
}

} // namespace edpcgrl
