#pragma once

#include <cmath>
#include <string>

#include "edpcgrl/error.hpp"

namespace edpcgrl {

inline constexpr int kMinAnxiety = 0;
inline constexpr int kMaxAnxiety = 10;

/// Discretized anxiety on the 0..10 scale.
class AnxietyLevel {
public:
    constexpr AnxietyLevel() = default;
    explicit AnxietyLevel(int value) : value_(value) {
        if (value < kMinAnxiety || value > kMaxAnxiety) {
            throw RangeError("anxiety level " + std::to_string(value) + " out of range 0..10");
        }
    }

    /// Round a continuous 0..10 estimate to the nearest level (halves away from zero).
    static AnxietyLevel from_continuous(double x) {
        if (!(x >= kMinAnxiety && x <= kMaxAnxiety)) {
            throw RangeError("continuous anxiety " + std::to_string(x) + " out of range 0..10");
        }
        return AnxietyLevel(static_cast<int>(std::lround(x)));
    }

    constexpr int value() const { return value_; }
    friend constexpr auto operator<=>(const AnxietyLevel&, const AnxietyLevel&) = default;

private:
    int value_ = 0;
};

struct RewardSpec {
    int target = 5;
    /// Width of the Gaussian: half the anxiety range.
    static constexpr double delta = (kMaxAnxiety - kMinAnxiety) / 2.0;
};

namespace detail {

inline double gauss_kernel(double d) { return std::exp(-0.5 * (d / RewardSpec::delta) * (d / RewardSpec::delta)); }

} // namespace detail

/// Scaled-Gaussian reward on a continuous anxiety value. Maps the target to 1
/// and the farther endpoint of [0, 10] to -1.
inline double reward_continuous(double x, int target) {
    if (target < kMinAnxiety || target > kMaxAnxiety) {
        throw RangeError("target anxiety " + std::to_string(target) + " out of range 0..10");
    }
    if (!(x >= kMinAnxiety && x <= kMaxAnxiety)) {
        throw RangeError("anxiety " + std::to_string(x) + " out of range 0..10");
    }
    const double mu = target;
    // The far endpoint is 10 for low targets and 0 for targets >= 5.
    const double far = target < 5 ? detail::gauss_kernel(kMaxAnxiety - mu) : detail::gauss_kernel(kMinAnxiety - mu);
    if (x == mu) return 1.0;
    return (2.0 * detail::gauss_kernel(x - mu) - far - 1.0) / (1.0 - far);
}

inline double reward(AnxietyLevel x, const RewardSpec& spec) { return reward_continuous(x.value(), spec.target); }

} // namespace edpcgrl
