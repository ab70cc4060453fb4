#pragma once

// Hypothesis tests used in the session analyses: Wilcoxon signed-rank, paired
// t, Pearson correlation, exact binomial and pooled two-proportion z.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "edpcgrl/error.hpp"

namespace edpcgrl::stats {

/// "greater" means the first sample tends to exceed the second.
enum class Alternative { TwoSided, Greater, Less };

inline std::string_view alternative_name(Alternative a) {
    switch (a) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
    }
    return "?";
}

inline Alternative parse_alternative(std::string_view s) {
    for (auto a : {Alternative::TwoSided, Alternative::Greater, Alternative::Less})
        if (alternative_name(a) == s) return a;
    throw ConfigError("unknown alternative '" + std::string(s) + "'");
}

struct PairedSamples {
    std::vector<double> a;
    std::vector<double> b;

    void validate() const {
        if (a.size() != b.size()) throw LengthError("paired samples differ in length");
        if (a.empty()) throw LengthError("paired samples are empty");
    }
    std::vector<double> differences() const {
        validate();
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return d;
    }
};

namespace detail {

inline double normal_cdf(double z) { return boost::math::cdf(boost::math::normal_distribution<double>(), z); }
inline double normal_sf(double z) {
    return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), z));
}

/// p-value of a statistic that is standard normal under the null.
inline double normal_p(double z, Alternative alt) {
    switch (alt) {
    case Alternative::Greater: return normal_sf(z);
    case Alternative::Less: return normal_cdf(z);
    case Alternative::TwoSided: return std::min(1.0, 2.0 * normal_sf(std::abs(z)));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double t_p(double t, double df, Alternative alt) {
    const boost::math::students_t_distribution<double> dist(df);
    if (std::isinf(t)) {
        const bool upper = t > 0;
        if (alt == Alternative::TwoSided) return 0.0;
        return (alt == Alternative::Greater) == upper ? 0.0 : 1.0;
    }
    switch (alt) {
    case Alternative::Greater: return boost::math::cdf(boost::math::complement(dist, t));
    case Alternative::Less: return boost::math::cdf(dist, t);
    case Alternative::TwoSided: return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Average (mid) ranks, 1-based.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace detail

struct WilcoxonResult {
    double statistic = 0.0; // W+, the sum of ranks of positive differences
    double p_value = 1.0;
    double effect_r = 0.0;  // z / sqrt(N)
    double z = 0.0;
    int n = 0;              // nonzero pairs
    bool exact = false;
};

inline constexpr int kWilcoxonExactMaxN = 12;

/// Signed-rank test on a - b. Zero differences are dropped and tied absolute
/// differences share their average rank. The p-value is exact for up to 12
/// nonzero pairs and uses the tie-corrected normal approximation with a
/// continuity correction above that; z (and hence r) always comes from the
/// approximation.
inline WilcoxonResult wilcoxon_signed_rank(const PairedSamples& s, Alternative alt = Alternative::TwoSided) {
    std::vector<double> d;
    for (double v : s.differences())
        if (v != 0.0) d.push_back(v);
    if (d.empty()) throw DegenerateInputError("all paired differences are zero");

    std::vector<double> absd(d.size());
    std::transform(d.begin(), d.end(), absd.begin(), [](double v) { return std::abs(v); });
    const auto ranks = detail::average_ranks(absd);

    WilcoxonResult r;
    r.n = static_cast<int>(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] > 0) r.statistic += ranks[i];

    const double n = r.n;
    const double mean = n * (n + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        auto sorted = absd;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
    }
    const double sd = std::sqrt(n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0);
    const double dev = r.statistic - mean;
    r.z = (dev > 0 ? 1.0 : dev < 0 ? -1.0 : 0.0) * std::max(std::abs(dev) - 0.5, 0.0) / sd;
    r.effect_r = r.z / std::sqrt(n);

    if (r.n <= kWilcoxonExactMaxN) {
        // Null distribution of W+ over all 2^n sign patterns, on doubled ranks
        // so mid-ranks stay integral.
        std::vector<int> twice(ranks.size());
        for (std::size_t i = 0; i < ranks.size(); ++i) twice[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
        const int total = std::accumulate(twice.begin(), twice.end(), 0);
        std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
        count[0] = 1.0;
        for (int w : twice)
            for (int v = total; v >= w; --v) count[static_cast<std::size_t>(v)] += count[static_cast<std::size_t>(v - w)];
        const double all = std::ldexp(1.0, r.n);
        const int obs = static_cast<int>(std::lround(2.0 * r.statistic));
        double upper = 0.0, lower = 0.0;
        for (int v = 0; v <= total; ++v) {
            if (v >= obs) upper += count[static_cast<std::size_t>(v)];
            if (v <= obs) lower += count[static_cast<std::size_t>(v)];
        }
        upper /= all;
        lower /= all;
        r.exact = true;
        switch (alt) {
        case Alternative::Greater: r.p_value = upper; break;
        case Alternative::Less: r.p_value = lower; break;
        case Alternative::TwoSided: r.p_value = std::min(1.0, 2.0 * std::min(upper, lower)); break;
        }
    } else {
        switch (alt) {
        case Alternative::Greater: r.p_value = detail::normal_sf((dev - 0.5) / sd); break;
        case Alternative::Less: r.p_value = detail::normal_cdf((dev + 0.5) / sd); break;
        case Alternative::TwoSided:
            r.p_value = std::min(1.0, 2.0 * detail::normal_sf(std::max(std::abs(dev) - 0.5, 0.0) / sd));
            break;
        }
    }
    return r;
}

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    double mean_difference = 0.0;
    // Confidence interval for the mean difference; one side is infinite for
    // one-sided alternatives.
    double ci_low = -std::numeric_limits<double>::infinity();
    double ci_high = std::numeric_limits<double>::infinity();
};

inline TTestResult paired_t_test(const PairedSamples& s, Alternative alt = Alternative::TwoSided,
                                 double confidence = 0.95) {
    const auto d = s.differences();
    if (d.size() < 2) throw LengthError("paired t-test needs at least 2 pairs");
    const double n = static_cast<double>(d.size());
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DegenerateInputError("paired differences have zero variance");

    TTestResult r;
    r.df = n - 1.0;
    r.mean_difference = mean;
    const double se = sd / std::sqrt(n);
    r.t = mean / se;
    r.p_value = detail::t_p(r.t, r.df, alt);
    const boost::math::students_t_distribution<double> dist(r.df);
    if (alt == Alternative::TwoSided) {
        const double q = boost::math::quantile(dist, 0.5 + confidence / 2.0);
        r.ci_low = mean - q * se;
        r.ci_high = mean + q * se;
    } else {
        const double q = boost::math::quantile(dist, confidence);
        if (alt == Alternative::Greater) r.ci_low = mean - q * se;
        else r.ci_high = mean + q * se;
    }
    return r;
}

inline double mse_vs_target(const std::vector<double>& series, double target) {
    if (series.empty()) throw LengthError("MSE of an empty series");
    double sq = 0.0;
    for (double v : series) sq += (v - target) * (v - target);
    return sq / static_cast<double>(series.size());
}

struct PearsonResult {
    double r = 0.0;
    double t = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    double ci_low = std::numeric_limits<double>::quiet_NaN();
    double ci_high = std::numeric_limits<double>::quiet_NaN();
};

/// Product-moment correlation; p from the t distribution with n-2 df, CI via
/// the Fisher transform (needs n > 3).
inline PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y,
                             Alternative alt = Alternative::TwoSided, double confidence = 0.95) {
    if (x.size() != y.size()) throw LengthError("pearson inputs differ in length");
    if (x.size() < 3) throw LengthError("pearson needs at least 3 pairs");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateInputError("pearson input has zero variance");

    PearsonResult r;
    r.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    r.df = n - 2.0;
    const double one_minus = 1.0 - r.r * r.r;
    r.t = one_minus > 0.0 ? r.r * std::sqrt(r.df / one_minus)
                          : std::copysign(std::numeric_limits<double>::infinity(), r.r);
    r.p_value = detail::t_p(r.t, r.df, alt);
    if (n > 3.0) {
        if (std::abs(r.r) == 1.0) {
            r.ci_low = r.ci_high = r.r;
        } else {
            const double q = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + confidence / 2.0);
            const double zr = std::atanh(r.r), se = 1.0 / std::sqrt(n - 3.0);
            r.ci_low = std::tanh(zr - q * se);
            r.ci_high = std::tanh(zr + q * se);
        }
    }
    return r;
}

/// Exact binomial test. The two-sided p sums every outcome no more likely
/// than the observed one (with a small relative tolerance for ties).
inline double binomial_test(int successes, int n, double p0 = 0.5, Alternative alt = Alternative::TwoSided) {
    if (n < 0 || successes < 0 || successes > n) throw RangeError("binomial test needs 0 <= successes <= n");
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw RangeError("binomial p0 must be in [0, 1]");
    if (n == 0) return 1.0;
    const boost::math::binomial_distribution<double> dist(n, p0);
    const double k = successes;
    switch (alt) {
    case Alternative::Greater: return successes == 0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, k - 1.0));
    case Alternative::Less: return boost::math::cdf(dist, k);
    case Alternative::TwoSided: {
        const double observed = boost::math::pdf(dist, k);
        double p = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double pi = boost::math::pdf(dist, static_cast<double>(i));
            if (pi <= observed * (1.0 + 1e-7)) p += pi;
        }
        return std::min(1.0, p);
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct ZTestResult {
    double z = 0.0;
    double p_value = 1.0;
};

/// Pooled two-proportion z test of p1 vs p2.
inline ZTestResult two_proportion_z(int successes1, int n1, int successes2, int n2,
                                    Alternative alt = Alternative::TwoSided) {
    if (n1 < 1 || n2 < 1) throw RangeError("two-proportion z test needs n1, n2 >= 1");
    if (successes1 < 0 || successes1 > n1 || successes2 < 0 || successes2 > n2) {
        throw RangeError("successes must lie in 0..n");
    }
    const double p1 = static_cast<double>(successes1) / n1;
    const double p2 = static_cast<double>(successes2) / n2;
    const double pooled = static_cast<double>(successes1 + successes2) / (n1 + n2);
    ZTestResult r;
    if (pooled <= 0.0 || pooled >= 1.0) return r; // both samples identical and extreme
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    r.z = (p1 - p2) / se;
    r.p_value = detail::normal_p(r.z, alt);
    return r;
}

} // namespace edpcgrl::stats
