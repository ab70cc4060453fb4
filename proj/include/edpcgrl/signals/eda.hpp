#pragma once

// Electrodermal activity: low-pass + 1 Hz decimation, tonic/phasic
// decomposition, SCL normalization to the 0..10 anxiety scale, and SCR peak
// features.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "edpcgrl/error.hpp"
#include "edpcgrl/signals/filter.hpp"
#include "edpcgrl/signals/series.hpp"

namespace edpcgrl::signals {

struct EdaPreprocessConfig {
    double lowpass_hz = 0.25;
    int order = 4;
    double output_rate_hz = 1.0;
};

/// Zero-phase low-pass, then non-overlapping boxcar averaging down to
/// `output_rate_hz`. Only complete output periods are emitted.
inline SignalSeries eda_preprocess(const SignalSeries& raw, const EdaPreprocessConfig& cfg = {}) {
    raw.validate();
    const double fs = raw.sample_rate_hz;
    if (!(fs > 2.0 * cfg.lowpass_hz)) {
        throw ConfigError("EDA sample rate " + std::to_string(fs) + " Hz must exceed twice the " +
                          std::to_string(cfg.lowpass_hz) + " Hz low-pass cutoff");
    }
    if (!(fs >= cfg.output_rate_hz)) {
        throw ConfigError("EDA sample rate must be at least the output rate");
    }
    const auto filtered = butter_lowpass(cfg.order, cfg.lowpass_hz, fs).filtfilt(raw.samples);

    const double per_block = fs / cfg.output_rate_hz;
    const auto n_out = static_cast<std::size_t>(std::floor(static_cast<double>(filtered.size()) / per_block + 1e-9));
    if (n_out == 0) throw LengthError("EDA recording shorter than one output period");

    SignalSeries out;
    out.sample_rate_hz = cfg.output_rate_hz;
    out.start_time_s = raw.start_time_s;
    out.samples.reserve(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const auto first = static_cast<std::size_t>(std::llround(std::ceil(k * per_block - 1e-9)));
        const auto last = std::min(filtered.size(), static_cast<std::size_t>(std::llround(std::ceil((k + 1) * per_block - 1e-9))));
        double sum = 0.0;
        for (std::size_t i = first; i < last; ++i) sum += filtered[i];
        out.samples.push_back(sum / static_cast<double>(last - first));
    }
    return out;
}

enum class DecompositionMethod { MedianSmoothing, HighPass };

inline std::string_view method_name(DecompositionMethod m) {
    return m == DecompositionMethod::MedianSmoothing ? "median" : "highpass";
}

inline DecompositionMethod parse_method(std::string_view s) {
    if (s == "median") return DecompositionMethod::MedianSmoothing;
    if (s == "highpass") return DecompositionMethod::HighPass;
    throw ConfigError("unknown decomposition method '" + std::string(s) + "' (expected median|highpass)");
}

struct EdaDecomposition {
    SignalSeries scl; // tonic
    SignalSeries scr; // phasic
    DecompositionMethod method = DecompositionMethod::MedianSmoothing;
};

struct DecompositionConfig {
    DecompositionMethod method = DecompositionMethod::MedianSmoothing;
    /// Median smoothing window; the kernel spans floor(window_s * fs / 2)
    /// samples on each side of the centre.
    double window_s = 8.0;
    double highpass_hz = 0.05;
    int highpass_order = 4;
};

/// Centered running median; the window is truncated at the edges.
inline std::vector<double> running_median(const std::vector<double>& x, std::size_t half) {
    std::vector<double> out(x.size());
    std::vector<double> buf;
    buf.reserve(2 * half + 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(x.size(), i + half + 1);
        buf.assign(x.begin() + static_cast<std::ptrdiff_t>(lo), x.begin() + static_cast<std::ptrdiff_t>(hi));
        const std::size_t mid = buf.size() / 2;
        std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
        if (buf.size() % 2 == 1) {
            out[i] = buf[mid];
        } else {
            const double upper = buf[mid];
            const double lower = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
            out[i] = 0.5 * (lower + upper);
        }
    }
    return out;
}

inline EdaDecomposition eda_decompose(const SignalSeries& signal, const DecompositionConfig& cfg = {}) {
    signal.validate();
    EdaDecomposition d;
    d.method = cfg.method;
    d.scl = d.scr = SignalSeries{signal.sample_rate_hz, {}, signal.start_time_s};
    const auto& x = signal.samples;

    if (cfg.method == DecompositionMethod::MedianSmoothing) {
        const double half_d = std::floor(cfg.window_s * signal.sample_rate_hz / 2.0);
        if (!(half_d >= 1.0)) {
            throw ConfigError("median window of " + std::to_string(cfg.window_s) + " s spans fewer than 3 samples");
        }
        // Odd extension at both ends so a drifting baseline has no edge bias.
        const auto half = static_cast<std::size_t>(half_d);
        const std::size_t pad = std::min(half, x.size() - 1);
        std::vector<double> ext;
        ext.reserve(x.size() + 2 * pad);
        for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * x.front() - x[k]);
        ext.insert(ext.end(), x.begin(), x.end());
        for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * x.back() - x[x.size() - 1 - k]);
        const auto med = running_median(ext, half);
        d.scl.samples.assign(med.begin() + static_cast<std::ptrdiff_t>(pad),
                             med.begin() + static_cast<std::ptrdiff_t>(pad + x.size()));
        d.scr.samples.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d.scr.samples[i] = x[i] - d.scl.samples[i];
    } else {
        d.scr.samples = butter_highpass(cfg.highpass_order, cfg.highpass_hz, signal.sample_rate_hz).filtfilt(x);
        d.scl.samples.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d.scl.samples[i] = x[i] - d.scr.samples[i];
    }
    return d;
}

/// Map SCL to 0..10 between the subject's relaxed minimum and an assumed maximum.
inline double scl_normalize(double scl, double relax_min, double assumed_max = 20.0) {
    if (!(relax_min < assumed_max)) {
        throw ConfigError("relax minimum (" + std::to_string(relax_min) + ") must be below the assumed maximum (" +
                          std::to_string(assumed_max) + ")");
    }
    return std::clamp((scl - relax_min) / (assumed_max - relax_min) * 10.0, 0.0, 10.0);
}

inline SignalSeries scl_normalize(const SignalSeries& scl, double relax_min, double assumed_max = 20.0) {
    SignalSeries out{scl.sample_rate_hz, {}, scl.start_time_s};
    out.samples.reserve(scl.size());
    for (double v : scl.samples) out.samples.push_back(scl_normalize(v, relax_min, assumed_max));
    return out;
}

struct ScrPeak {
    std::size_t index = 0;
    double amplitude = 0.0; // peak minus preceding trough
};

struct ScrFeatures {
    int n_peaks = 0;
    double mean_amplitude = 0.0;
    double max_amplitude = 0.0;
    double sum_amplitude = 0.0;
};

/// Local maxima rising more than `min_amplitude` above the lowest point since
/// the previous accepted peak (or the start of the series).
inline std::vector<ScrPeak> scr_peaks(const SignalSeries& scr, double min_amplitude = 0.01) {
    std::vector<ScrPeak> peaks;
    const auto& x = scr.samples;
    if (x.size() < 3) return peaks;
    double trough = x[0];
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        trough = std::min(trough, x[i]);
        if (!(x[i] > x[i - 1])) continue;
        // Plateau: the peak is the first sample; it must eventually fall.
        std::size_t j = i;
        while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
        if (j + 1 >= x.size() || !(x[j + 1] < x[i])) continue;
        const double amp = x[i] - trough;
        if (amp > min_amplitude) {
            peaks.push_back({i, amp});
            trough = x[i];
        }
        i = j;
    }
    return peaks;
}

inline ScrFeatures scr_features(const SignalSeries& scr, double min_amplitude = 0.01) {
    ScrFeatures f;
    for (const auto& p : scr_peaks(scr, min_amplitude)) {
        ++f.n_peaks;
        f.sum_amplitude += p.amplitude;
        f.max_amplitude = std::max(f.max_amplitude, p.amplitude);
    }
    if (f.n_peaks > 0) f.mean_amplitude = f.sum_amplitude / f.n_peaks;
    return f;
}

} // namespace edpcgrl::signals
