#pragma once

// Photoplethysmography: band-pass conditioning, fixed 60 s windows, systolic
// peak detection, and time/frequency-domain heart-rate-variability features.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "edpcgrl/error.hpp"
#include "edpcgrl/signals/filter.hpp"
#include "edpcgrl/signals/series.hpp"

namespace edpcgrl::signals {

struct PpgConfig {
    double band_low_hz = 0.5;
    double band_high_hz = 8.0;
    int order = 4;
    double window_s = 60.0;
    double min_bpm = 40.0;
    double max_bpm = 200.0;
    double tachogram_rate_hz = 4.0;
    double welch_segment_s = 64.0;
    double lf_low_hz = 0.04;
    double lf_high_hz = 0.15;
    double hf_low_hz = 0.15;
    double hf_high_hz = 0.40;
};

inline SignalSeries ppg_preprocess(const SignalSeries& raw, const PpgConfig& cfg = {}) {
    raw.validate();
    if (!(raw.sample_rate_hz > 2.0 * cfg.band_high_hz)) {
        throw ConfigError("PPG sample rate " + std::to_string(raw.sample_rate_hz) + " Hz must exceed " +
                          std::to_string(2.0 * cfg.band_high_hz) + " Hz");
    }
    const auto bp = butter_bandpass(cfg.order, cfg.band_low_hz, cfg.band_high_hz, raw.sample_rate_hz);
    return {raw.sample_rate_hz, bp.filtfilt(raw.samples), raw.start_time_s};
}

/// Non-overlapping windows; a trailing partial window is dropped.
inline std::vector<SignalSeries> ppg_windows(const SignalSeries& signal, double window_s = 60.0) {
    std::vector<SignalSeries> out;
    const auto per_window = static_cast<std::size_t>(std::llround(window_s * signal.sample_rate_hz));
    if (per_window == 0) return out;
    for (std::size_t first = 0; first + per_window <= signal.size(); first += per_window)
        out.push_back(signal.slice(first, per_window));
    return out;
}

/// Beat times in seconds (relative to the series start), refined to sub-sample
/// precision by parabolic interpolation.
inline std::vector<double> detect_beats(const SignalSeries& signal, const PpgConfig& cfg = {}) {
    const auto& x = signal.samples;
    const double fs = signal.sample_rate_hz;
    const auto min_dist = static_cast<std::size_t>(std::ceil(fs * 60.0 / cfg.max_bpm));
    // Envelope window: one slowest-allowed beat period on each side.
    const auto env_half = static_cast<std::size_t>(std::ceil(fs * 60.0 / cfg.min_bpm / 2.0));

    struct Candidate {
        std::size_t index;
        double value;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (!(x[i] > x[i - 1] && x[i] >= x[i + 1])) continue;
        const std::size_t lo = i >= env_half ? i - env_half : 0;
        const std::size_t hi = std::min(x.size(), i + env_half + 1);
        double local_max = -std::numeric_limits<double>::infinity();
        double local_mean = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            local_max = std::max(local_max, x[j]);
            local_mean += x[j];
        }
        local_mean /= static_cast<double>(hi - lo);
        // Adaptive threshold: halfway between the local mean and the local peak.
        if (x[i] >= local_mean + 0.5 * (local_max - local_mean)) cands.push_back({i, x[i]});
    }

    // Keep the tallest peaks first, suppressing neighbours closer than min_dist.
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cands[a].value > cands[b].value; });
    std::vector<bool> removed(cands.size(), false);
    std::vector<std::size_t> kept;
    for (std::size_t oi : order) {
        if (removed[oi]) continue;
        kept.push_back(cands[oi].index);
        for (std::size_t j = 0; j < cands.size(); ++j) {
            const std::size_t a = cands[j].index, b = cands[oi].index;
            if (j != oi && (a > b ? a - b : b - a) < min_dist) removed[j] = true;
        }
    }
    std::sort(kept.begin(), kept.end());

    std::vector<double> beats;
    beats.reserve(kept.size());
    for (std::size_t i : kept) {
        const double y0 = x[i - 1], y1 = x[i], y2 = x[i + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        const double offset = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
        beats.push_back((static_cast<double>(i) + offset) / fs);
    }
    return beats;
}

struct HrvFeatures {
    int n_beats = 0;
    double mean_nn_ms = 0.0;
    double sdnn_ms = 0.0;
    double rmssd_ms = 0.0;
    double pnn20 = 0.0;
    double pnn50 = 0.0;
    double lf_power = 0.0; // ms^2
    double hf_power = 0.0; // ms^2
    double lf_hf_ratio = std::numeric_limits<double>::quiet_NaN();
    double ln_hf = std::numeric_limits<double>::quiet_NaN();
};

struct TimeDomainHrv {
    double mean_nn_ms = 0.0;
    double sdnn_ms = 0.0;
    double rmssd_ms = 0.0;
    double pnn20 = 0.0;
    double pnn50 = 0.0;
};

inline TimeDomainHrv hrv_time_domain(const std::vector<double>& nn_ms) {
    if (nn_ms.empty()) throw InsufficientDataError("no NN intervals");
    TimeDomainHrv t;
    const double n = static_cast<double>(nn_ms.size());
    t.mean_nn_ms = std::accumulate(nn_ms.begin(), nn_ms.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : nn_ms) ss += (v - t.mean_nn_ms) * (v - t.mean_nn_ms);
    t.sdnn_ms = std::sqrt(ss / n);
    if (nn_ms.size() >= 2) {
        double sq = 0.0;
        int over20 = 0, over50 = 0;
        for (std::size_t i = 1; i < nn_ms.size(); ++i) {
            const double d = nn_ms[i] - nn_ms[i - 1];
            sq += d * d;
            over20 += std::abs(d) > 20.0;
            over50 += std::abs(d) > 50.0;
        }
        const double m = static_cast<double>(nn_ms.size() - 1);
        t.rmssd_ms = std::sqrt(sq / m);
        t.pnn20 = over20 / m;
        t.pnn50 = over50 / m;
    }
    return t;
}

namespace detail {

/// Natural cubic spline through (x, y), evaluated at `at`. Falls back to
/// linear interpolation for two knots. Values outside the knots are clamped.
inline std::vector<double> spline_resample(const std::vector<double>& x, const std::vector<double>& y,
                                           const std::vector<double>& at) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0); // second derivatives
    if (n >= 3) {
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            const double a = h0, b = 2.0 * (h0 + h1), cc = h1;
            const double r = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            const double denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (r - a * d[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) m[i] = d[i] - c[i] * m[i + 1];
    }
    std::vector<double> out;
    out.reserve(at.size());
    std::size_t k = 0;
    for (double t : at) {
        t = std::clamp(t, x.front(), x.back());
        while (k + 2 < n && t > x[k + 1]) ++k;
        const double h = x[k + 1] - x[k];
        const double a = (x[k + 1] - t) / h, b = (t - x[k]) / h;
        out.push_back(a * y[k] + b * y[k + 1] + ((a * a * a - a) * m[k] + (b * b * b - b) * m[k + 1]) * h * h / 6.0);
    }
    return out;
}

struct Spectrum {
    std::vector<double> freq;
    std::vector<double> power; // one-sided density
};

/// Welch periodogram with a Hann window and 50% overlap; each segment is
/// mean-detrended. Plain DFT; segment lengths here are a few hundred points.
inline Spectrum welch(const std::vector<double>& x, double fs, std::size_t nperseg) {
    nperseg = std::min(nperseg, x.size());
    const std::size_t step = std::max<std::size_t>(1, nperseg / 2);
    std::vector<double> w(nperseg);
    for (std::size_t i = 0; i < nperseg; ++i)
        w[i] = nperseg > 1 ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / nperseg) : 1.0;
    const double wss = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);

    const std::size_t nfreq = nperseg / 2 + 1;
    Spectrum s;
    s.freq.resize(nfreq);
    s.power.assign(nfreq, 0.0);
    for (std::size_t k = 0; k < nfreq; ++k) s.freq[k] = k * fs / nperseg;

    std::size_t nseg = 0;
    std::vector<double> seg(nperseg);
    for (std::size_t start = 0; start + nperseg <= x.size(); start += step, ++nseg) {
        const double mean = std::accumulate(x.begin() + static_cast<std::ptrdiff_t>(start),
                                            x.begin() + static_cast<std::ptrdiff_t>(start + nperseg), 0.0) / nperseg;
        for (std::size_t i = 0; i < nperseg; ++i) seg[i] = (x[start + i] - mean) * w[i];
        for (std::size_t k = 0; k < nfreq; ++k) {
            std::complex<double> acc = 0.0;
            for (std::size_t i = 0; i < nperseg; ++i)
                acc += seg[i] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i % nperseg) / nperseg);
            double p = std::norm(acc) / (fs * wss);
            if (k != 0 && !(nperseg % 2 == 0 && k == nfreq - 1)) p *= 2.0;
            s.power[k] += p;
        }
    }
    for (double& p : s.power) p /= static_cast<double>(nseg);
    return s;
}

inline double band_power(const Spectrum& s, double lo, double hi) {
    if (s.freq.size() < 2) return 0.0;
    const double df = s.freq[1] - s.freq[0];
    double total = 0.0;
    for (std::size_t k = 0; k < s.freq.size(); ++k)
        if (s.freq[k] >= lo && s.freq[k] < hi) total += s.power[k] * df;
    return total;
}

} // namespace detail

/// Features from beat times (seconds). Intervals outside the configured BPM
/// band are discarded as artefacts.
inline HrvFeatures hrv_from_beats(const std::vector<double>& beats_s, const PpgConfig& cfg = {}) {
    if (beats_s.size() < 2) {
        throw InsufficientDataError("HRV needs at least 2 detected beats, found " + std::to_string(beats_s.size()));
    }
    const double min_nn = 60000.0 / cfg.max_bpm, max_nn = 60000.0 / cfg.min_bpm;
    std::vector<double> nn, nn_t;
    for (std::size_t i = 1; i < beats_s.size(); ++i) {
        const double ms = (beats_s[i] - beats_s[i - 1]) * 1000.0;
        if (ms >= min_nn && ms <= max_nn) {
            nn.push_back(ms);
            nn_t.push_back(beats_s[i]);
        }
    }
    if (nn.empty()) throw InsufficientDataError("no physiologically plausible NN intervals");

    HrvFeatures f;
    f.n_beats = static_cast<int>(beats_s.size());
    const auto td = hrv_time_domain(nn);
    f.mean_nn_ms = td.mean_nn_ms;
    f.sdnn_ms = td.sdnn_ms;
    f.rmssd_ms = td.rmssd_ms;
    f.pnn20 = td.pnn20;
    f.pnn50 = td.pnn50;

    if (nn.size() >= 2) {
        std::vector<double> grid;
        for (double t = nn_t.front(); t <= nn_t.back() + 1e-12; t += 1.0 / cfg.tachogram_rate_hz) grid.push_back(t);
        if (grid.size() >= 4) {
            const auto tach = detail::spline_resample(nn_t, nn, grid);
            const auto nperseg = static_cast<std::size_t>(std::llround(cfg.welch_segment_s * cfg.tachogram_rate_hz));
            const auto spec = detail::welch(tach, cfg.tachogram_rate_hz, nperseg);
            f.lf_power = detail::band_power(spec, cfg.lf_low_hz, cfg.lf_high_hz);
            f.hf_power = detail::band_power(spec, cfg.hf_low_hz, cfg.hf_high_hz);
        }
    }
    if (f.hf_power > 0.0) {
        f.lf_hf_ratio = f.lf_power / f.hf_power;
        f.ln_hf = std::log(f.hf_power);
    }
    return f;
}

/// Detect beats in one (already band-passed) window and compute HRV features.
inline HrvFeatures hrv_features(const SignalSeries& window, const PpgConfig& cfg = {}) {
    window.validate();
    return hrv_from_beats(detect_beats(window, cfg), cfg);
}

} // namespace edpcgrl::signals
