#include <gtest/gtest.h>

#include <cmath>

#include "edpcgrl/reward.hpp"

using namespace edpcgrl;

namespace {

// Independent restatement: rescale N(mu, 5) so mu -> 1 and the farther end
// of [0, 10] -> -1.
double oracle(double x, double mu) {
    auto g = [&](double v) { return std::exp(-(v - mu) * (v - mu) / 50.0); };
    const double far_end = std::abs(mu - 0.0) >= std::abs(10.0 - mu) ? 0.0 : 10.0;
    const double hi = g(mu), lo = g(far_end);
    return -1.0 + 2.0 * (g(x) - lo) / (hi - lo);
}

} // namespace

TEST(Reward, WorkedExampleFromRlTrace) {
    // The worked example quotes two decimals: 0.47 for anxiety 4 and 0.93
    // for anxiety 6, target 7. Compare at that precision.
    const double r4 = reward(AnxietyLevel(4), RewardSpec{7});
    const double r6 = reward(AnxietyLevel(6), RewardSpec{7});
    EXPECT_EQ(std::trunc(r4 * 100.0), 47.0);
    EXPECT_EQ(std::trunc(r6 * 100.0), 93.0);
}

TEST(Reward, MatchesOracleOnGrid) {
    for (int mu = 0; mu <= 10; ++mu)
        for (int x = 0; x <= 10; ++x)
            EXPECT_NEAR(reward(AnxietyLevel(x), RewardSpec{mu}), oracle(x, mu), 1e-12) << "x=" << x << " mu=" << mu;
}

TEST(Reward, TargetAndFarEndpoint) {
    for (int mu = 0; mu <= 10; ++mu) {
        EXPECT_NEAR(reward(AnxietyLevel(mu), RewardSpec{mu}), 1.0, 1e-12);
        const int far_end = mu < 5 ? 10 : 0;
        EXPECT_NEAR(reward(AnxietyLevel(far_end), RewardSpec{mu}), -1.0, 1e-12);
    }
}

TEST(Reward, BoundedAndPeakedAtTarget) {
    for (int mu = 0; mu <= 10; ++mu) {
        for (double x = 0.0; x <= 10.0; x += 0.25) {
            const double r = reward_continuous(x, mu);
            EXPECT_GE(r, -1.0 - 1e-12);
            EXPECT_LE(r, 1.0 + 1e-12);
            // Monotone in |x - mu|.
            const double closer = x < mu ? std::min(x + 0.25, double(mu)) : std::max(x - 0.25, double(mu));
            EXPECT_GE(reward_continuous(closer, mu), r - 1e-12);
        }
    }
}

TEST(Reward, SymmetricAboutTargetWhileInRange) {
    EXPECT_NEAR(reward_continuous(3.0, 5), reward_continuous(7.0, 5), 1e-12);
    EXPECT_NEAR(reward_continuous(5.0, 7), reward_continuous(9.0, 7), 1e-12);
}

TEST(Reward, RangeErrors) {
    EXPECT_THROW(AnxietyLevel(11), RangeError);
    EXPECT_THROW(AnxietyLevel(-1), RangeError);
    EXPECT_THROW(reward_continuous(5.0, 11), RangeError);
    EXPECT_THROW(reward_continuous(10.5, 5), RangeError);
}

TEST(AnxietyLevel, FromContinuousRoundsHalfAwayFromZero) {
    EXPECT_EQ(AnxietyLevel::from_continuous(4.5).value(), 5);
    EXPECT_EQ(AnxietyLevel::from_continuous(4.49).value(), 4);
    EXPECT_EQ(AnxietyLevel::from_continuous(0.0).value(), 0);
    EXPECT_THROW(AnxietyLevel::from_continuous(10.2), RangeError);
}
