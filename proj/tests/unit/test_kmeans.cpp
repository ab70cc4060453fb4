#include <gtest/gtest.h>

#include <random>

#include "edpcgrl/stats/kmeans.hpp"

using namespace edpcgrl;
using namespace edpcgrl::stats;

namespace {

using P6 = Point<6>;

std::vector<P6> blobs(const std::vector<P6>& centres, int per_blob, double spread, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    std::vector<P6> out;
    for (const auto& c : centres)
        for (int i = 0; i < per_blob; ++i) {
            P6 p = c;
            for (double& v : p) v += spread * n01(rng);
            out.push_back(p);
        }
    return out;
}

const std::vector<P6> kTriangle{{0, 0, 0, 0, 0, 0}, {10, 0, 0, 0, 0, 0}, {5, 8.66, 0, 0, 0, 0}};

} // namespace

TEST(KMeans, KEqualsNGivesZeroWcss) {
    const auto pts = blobs({{0, 0, 0, 0, 0, 0}}, 7, 1.0, 1);
    const auto m = kmeans(pts, 7, 3);
    EXPECT_NEAR(m.wcss, 0.0, 1e-12);
    auto counts = m.member_counts();
    for (int c : counts) EXPECT_EQ(c, 1);
}

TEST(KMeans, SeparatedBlobsRecovered) {
    const auto pts = blobs(kTriangle, 30, 0.3, 2);
    const auto m = kmeans_best_of(pts, 3, 5, 5);
    for (int b = 0; b < 3; ++b) {
        const int label = m.assignments[static_cast<std::size_t>(b * 30)];
        for (int i = 0; i < 30; ++i) EXPECT_EQ(m.assignments[static_cast<std::size_t>(b * 30 + i)], label);
    }
    EXPECT_EQ(m.member_counts(), (std::vector<int>{30, 30, 30}));
}

TEST(KMeans, EveryPointAssignedToNearestCenter) {
    const auto pts = blobs(kTriangle, 20, 2.0, 4);
    const auto m = kmeans(pts, 4, 8);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double own = detail::sq_dist(pts[i], m.centers[static_cast<std::size_t>(m.assignments[i])]);
        for (const auto& c : m.centers) EXPECT_LE(own, detail::sq_dist(pts[i], c) + 1e-12);
    }
}

TEST(KMeans, WcssNeverIncreases) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto pts = blobs(kTriangle, 25, 3.0, seed);
        const auto m = kmeans(pts, 5, seed);
        ASSERT_FALSE(m.wcss_history.empty());
        for (std::size_t i = 1; i < m.wcss_history.size(); ++i) EXPECT_LE(m.wcss_history[i], m.wcss_history[i - 1] + 1e-9);
        EXPECT_EQ(m.wcss, m.wcss_history.back());
    }
}

TEST(KMeans, Deterministic) {
    const auto pts = blobs(kTriangle, 25, 3.0, 7);
    EXPECT_TRUE(kmeans(pts, 4, 11) == kmeans(pts, 4, 11));
    EXPECT_TRUE(kmeans_best_of(pts, 4, 11, 5) == kmeans_best_of(pts, 4, 11, 5));
}

TEST(KMeans, Errors) {
    const std::vector<P6> dup(5, P6{1, 1, 1, 1, 1, 1});
    EXPECT_THROW(kmeans(dup, 2, 0), ConfigError);
    EXPECT_NO_THROW(kmeans(dup, 1, 0));
    EXPECT_THROW(kmeans(dup, 0, 0), ConfigError);
    EXPECT_THROW(kmeans_best_of(dup, 1, 0, 0), ConfigError);
}

TEST(Elbow, ThreeBlobs) {
    const auto pts = blobs(kTriangle, 30, 0.5, 3);
    const auto r = elbow_select(pts, 1, 8, 42);
    EXPECT_EQ(r.k, 3);
    EXPECT_EQ(r.ks.front(), 1);
    EXPECT_EQ(r.ks.back(), 8);
}

TEST(Elbow, TiesGoToSmallerK) {
    // Linear curve: every second difference is zero.
    EXPECT_EQ(elbow_from_wcss({10, 8, 6, 4, 2}, 1), 2);
    EXPECT_EQ(elbow_from_wcss({100, 40, 30, 25}, 2), 3);
    EXPECT_THROW(elbow_from_wcss({1, 2}, 1), ConfigError);
}

TEST(Elbow, RangeErrors) {
    std::vector<Point<1>> pts;
    for (int i = 0; i < 4; ++i) pts.push_back({static_cast<double>(i)});
    EXPECT_THROW(elbow_select(pts, 1, 2, 1), ConfigError);
    EXPECT_THROW(elbow_select(pts, 0, 3, 1), ConfigError);
    EXPECT_EQ(elbow_select(pts, 2, 4, 1).wcss.back(), 0.0);
}

TEST(Discretize, RoundsAndClamps) {
    EXPECT_EQ(discretize({0.4, 1.6, 2.9, -0.7, 0.8, 1.5}), SpiderAttributes({0, 2, 2, 0, 1, 2}));
    EXPECT_EQ(discretize({5, 5, 5, 5, 5, 5}), SpiderAttributes::maximal());
}
