#pragma once

// K-means (k-means++ seeding, Lloyd iterations) and elbow selection of k.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "edpcgrl/error.hpp"
#include "edpcgrl/rng.hpp"
#include "edpcgrl/state_space.hpp"

namespace edpcgrl::stats {

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
struct ClusterModel {
    int k = 0;
    std::vector<Point<D>> centers;
    std::vector<int> assignments;
    double wcss = 0.0;
    /// WCSS after each assignment step, first to last.
    std::vector<double> wcss_history;
    int iterations = 0;

    std::vector<int> member_counts() const {
        std::vector<int> c(static_cast<std::size_t>(k), 0);
        for (int a : assignments) ++c[static_cast<std::size_t>(a)];
        return c;
    }
    bool operator==(const ClusterModel&) const = default;
};

namespace detail {

template <std::size_t D>
double sq_dist(const Point<D>& a, const Point<D>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < D; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

template <std::size_t D>
std::size_t count_distinct(const std::vector<Point<D>>& points) {
    return std::set<Point<D>>(points.begin(), points.end()).size();
}

template <std::size_t D>
std::vector<Point<D>> kmeanspp_seed(const std::vector<Point<D>>& points, int k, Rng& rng) {
    std::vector<Point<D>> centers;
    centers.push_back(points[uniform_index(rng, points.size())]);
    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = sq_dist(points[i], centers[0]);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        const double u = uniform01(rng) * total;
        // Walk the cumulative weights; zero-weight points (existing centers)
        // are never chosen.
        std::size_t pick = points.size();
        double acc = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (d2[i] <= 0.0) continue;
            acc += d2[i];
            pick = i;
            if (acc > u) break;
        }
        centers.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i) d2[i] = std::min(d2[i], sq_dist(points[i], centers.back()));
    }
    return centers;
}

} // namespace detail

/// Deterministic given `seed`. Empty clusters keep their previous center.
template <std::size_t D>
ClusterModel<D> kmeans(const std::vector<Point<D>>& points, int k, std::uint64_t seed, int max_iterations = 300) {
    if (k < 1) throw ConfigError("k must be >= 1");
    const std::size_t distinct = detail::count_distinct(points);
    if (static_cast<std::size_t>(k) > distinct) {
        throw ConfigError("k = " + std::to_string(k) + " exceeds the " + std::to_string(distinct) + " distinct points");
    }
    Rng rng(seed);
    ClusterModel<D> m;
    m.k = k;
    m.centers = detail::kmeanspp_seed(points, k, rng);
    m.assignments.assign(points.size(), -1);

    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = detail::sq_dist(points[i], m.centers[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            changed |= m.assignments[i] != best;
            m.assignments[i] = best;
            wcss += best_d;
        }
        m.wcss = wcss;
        m.wcss_history.push_back(wcss);
        m.iterations = it + 1;
        if (!changed) break;

        std::vector<Point<D>> sums(static_cast<std::size_t>(k), Point<D>{});
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto c = static_cast<std::size_t>(m.assignments[i]);
            ++counts[c];
            for (std::size_t j = 0; j < D; ++j) sums[c][j] += points[i][j];
        }
        for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t j = 0; j < D; ++j) m.centers[c][j] = sums[c][j] / counts[c];
        }
    }
    return m;
}

/// Best (lowest WCSS) of `restarts` seeded runs.
template <std::size_t D>
ClusterModel<D> kmeans_best_of(const std::vector<Point<D>>& points, int k, std::uint64_t seed, int restarts) {
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
    ClusterModel<D> best;
    for (int r = 0; r < restarts; ++r) {
        auto m = kmeans(points, k, derive_seed(seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r)}));
        if (r == 0 || m.wcss < best.wcss) best = std::move(m);
    }
    return best;
}

/// Elbow on a WCSS curve whose first entry is k = k_first: the interior k
/// maximizing wcss(k-1) - 2 wcss(k) + wcss(k+1). Ties go to the smaller k.
inline int elbow_from_wcss(const std::vector<double>& wcss, int k_first) {
    if (wcss.size() < 3) throw ConfigError("elbow selection needs at least 3 values of k");
    std::size_t best = 1;
    double best_curv = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < wcss.size(); ++i) {
        const double curv = wcss[i - 1] - 2.0 * wcss[i] + wcss[i + 1];
        if (curv > best_curv) {
            best_curv = curv;
            best = i;
        }
    }
    return k_first + static_cast<int>(best);
}

struct ElbowResult {
    int k = 0;
    std::vector<int> ks;
    std::vector<double> wcss;
};

template <std::size_t D>
ElbowResult elbow_select(const std::vector<Point<D>>& points, int k_min, int k_max, std::uint64_t seed,
                         int restarts = 10) {
    if (k_min < 1 || k_max - k_min < 2) throw ConfigError("elbow k range must span at least 3 values starting at >= 1");
    ElbowResult r;
    for (int k = k_min; k <= k_max; ++k) {
        r.ks.push_back(k);
        r.wcss.push_back(kmeans_best_of(points, k, seed, restarts).wcss);
    }
    r.k = elbow_from_wcss(r.wcss, k_min);
    return r;
}

/// Round a 6-dimensional center to the nearest spider, clamping each
/// attribute to its bounds.
inline SpiderAttributes discretize(const Point<kNumAttributes>& center) {
    std::array<int, kNumAttributes> v{};
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        const auto r = static_cast<int>(std::lround(center[i]));
        v[i] = std::clamp(r, 0, kAttributeLevels[i] - 1);
    }
    return SpiderAttributes(v);
}

} // namespace edpcgrl::stats
