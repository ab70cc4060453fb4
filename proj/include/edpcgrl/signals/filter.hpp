#pragma once

// Butterworth IIR design as cascaded biquads, and forward-backward
// (zero-phase) filtering with odd-extension padding and steady-state initial
// conditions.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "edpcgrl/error.hpp"

namespace edpcgrl::signals {

/// One second-order section, a0 normalized to 1:
/// H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
    double b0 = 1, b1 = 0, b2 = 0;
    double a1 = 0, a2 = 0;

    std::complex<double> response(double omega) const {
        const auto z1 = std::polar(1.0, -omega);
        const auto z2 = z1 * z1;
        return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
    }
    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

class SosFilter {
public:
    SosFilter() = default;
    explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

    const std::vector<Biquad>& sections() const { return sections_; }

    /// Complex response at a frequency in Hz.
    std::complex<double> response(double freq_hz, double fs) const {
        const double omega = 2.0 * std::numbers::pi * freq_hz / fs;
        std::complex<double> h = 1.0;
        for (const auto& s : sections_) h *= s.response(omega);
        return h;
    }
    double magnitude(double freq_hz, double fs) const { return std::abs(response(freq_hz, fs)); }

    /// Edge padding used by filtfilt.
    std::size_t pad_length() const {
        std::size_t ntaps = 2 * sections_.size() + 1;
        std::size_t b_zero = 0, a_zero = 0;
        for (const auto& s : sections_) {
            b_zero += s.b2 == 0.0;
            a_zero += s.a2 == 0.0;
        }
        ntaps -= std::min(b_zero, a_zero);
        return 3 * ntaps;
    }

    /// Causal filtering in transposed direct form II. `state` holds two values
    /// per section and is updated in place.
    void filter_inplace(std::span<double> x, std::vector<double>& state) const {
        for (std::size_t k = 0; k < sections_.size(); ++k) {
            const auto& s = sections_[k];
            double z1 = state[2 * k], z2 = state[2 * k + 1];
            for (double& v : x) {
                const double in = v;
                const double out = s.b0 * in + z1;
                z1 = s.b1 * in - s.a1 * out + z2;
                z2 = s.b2 * in - s.a2 * out;
                v = out;
            }
            state[2 * k] = z1;
            state[2 * k + 1] = z2;
        }
    }

    /// Initial state giving a steady-state response to a unit step.
    std::vector<double> step_initial_state() const {
        std::vector<double> zi(2 * sections_.size());
        double scale = 1.0;
        for (std::size_t k = 0; k < sections_.size(); ++k) {
            const auto& s = sections_[k];
            const double gain = s.dc_gain();
            const double z2 = s.b2 - s.a2 * gain;
            const double z1 = s.b1 - s.a1 * gain + z2;
            zi[2 * k] = scale * z1;
            zi[2 * k + 1] = scale * z2;
            scale *= gain;
        }
        return zi;
    }

    std::vector<double> filter(std::span<const double> x) const {
        std::vector<double> y(x.begin(), x.end());
        std::vector<double> state(2 * sections_.size(), 0.0);
        filter_inplace(y, state);
        return y;
    }

    /// Zero-phase forward-backward filtering. Throws LengthError when the
    /// input is not longer than pad_length().
    std::vector<double> filtfilt(std::span<const double> x) const {
        const std::size_t n = x.size();
        const std::size_t pad = pad_length();
        if (n <= pad) {
            throw LengthError("signal of " + std::to_string(n) + " samples is too short for zero-phase filtering (needs > " +
                              std::to_string(pad) + ")");
        }
        std::vector<double> ext;
        ext.reserve(n + 2 * pad);
        for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
        ext.insert(ext.end(), x.begin(), x.end());
        for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

        const auto zi = step_initial_state();
        auto state = zi;
        for (double& z : state) z *= ext.front();
        filter_inplace(ext, state);

        std::reverse(ext.begin(), ext.end());
        state = zi;
        for (double& z : state) z *= ext.front();
        filter_inplace(ext, state);
        std::reverse(ext.begin(), ext.end());

        return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
    }

private:
    std::vector<Biquad> sections_;
};

namespace detail {

using cplx = std::complex<double>;

inline std::vector<cplx> butter_prototype_poles(int order) {
    std::vector<cplx> p;
    for (int k = 0; k < order; ++k) {
        const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
        p.push_back(std::polar(1.0, theta));
    }
    return p;
}

inline double prewarp(double freq_hz, double fs) { return 2.0 * fs * std::tan(std::numbers::pi * freq_hz / fs); }

/// Group digital poles (conjugate pairs, then leftover reals) and real zeros
/// into biquads. `zeros` must hold exactly as many entries as poles.
inline std::vector<Biquad> pair_sections(const std::vector<cplx>& poles, std::vector<double> zeros) {
    std::vector<std::array<double, 2>> denominators; // a1, a2
    std::vector<int> order;                          // 1 or 2 poles per section
    std::vector<double> reals;
    for (const auto& p : poles) {
        if (std::abs(p.imag()) > 1e-12 * std::max(1.0, std::abs(p))) {
            if (p.imag() > 0) {
                denominators.push_back({-2.0 * p.real(), std::norm(p)});
                order.push_back(2);
            }
        } else {
            reals.push_back(p.real());
        }
    }
    for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
        denominators.push_back({-(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
        order.push_back(2);
    }
    if (reals.size() % 2 == 1) {
        denominators.push_back({-reals.back(), 0.0});
        order.push_back(1);
    }

    // Alternate zero signs within a section so band-pass sections get one
    // zero at DC and one at Nyquist.
    std::sort(zeros.begin(), zeros.end());
    std::vector<Biquad> out;
    std::size_t lo = 0, hi = zeros.size();
    for (std::size_t s = 0; s < denominators.size(); ++s) {
        Biquad q;
        q.a1 = denominators[s][0];
        q.a2 = denominators[s][1];
        if (order[s] == 2) {
            const double z1 = zeros[lo++];
            const double z2 = zeros[--hi];
            q.b0 = 1.0;
            q.b1 = -(z1 + z2);
            q.b2 = z1 * z2;
        } else {
            const double z1 = zeros[lo++];
            q.b0 = 1.0;
            q.b1 = -z1;
            q.b2 = 0.0;
        }
        out.push_back(q);
    }
    return out;
}

inline cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

inline void normalize_gain(std::vector<Biquad>& sections, double ref_freq_hz, double fs) {
    const double g = SosFilter(sections).magnitude(ref_freq_hz, fs);
    sections.front().b0 /= g;
    sections.front().b1 /= g;
    sections.front().b2 /= g;
}

inline void check_design(int order, double fs) {
    if (order < 1) throw ConfigError("filter order must be >= 1");
    if (!(fs > 0.0)) throw ConfigError("sample rate must be positive");
}

inline void check_cutoff(double f, double fs) {
    if (!(f > 0.0 && f < fs / 2.0)) {
        throw ConfigError("cutoff " + std::to_string(f) + " Hz must lie strictly between 0 and Nyquist (" +
                          std::to_string(fs / 2.0) + " Hz)");
    }
}

} // namespace detail

inline SosFilter butter_lowpass(int order, double cutoff_hz, double fs) {
    detail::check_design(order, fs);
    detail::check_cutoff(cutoff_hz, fs);
    const double wc = detail::prewarp(cutoff_hz, fs);
    std::vector<detail::cplx> poles;
    for (const auto& p : detail::butter_prototype_poles(order)) poles.push_back(detail::bilinear(p * wc, fs));
    auto sections = detail::pair_sections(poles, std::vector<double>(static_cast<std::size_t>(order), -1.0));
    detail::normalize_gain(sections, 0.0, fs);
    return SosFilter(std::move(sections));
}

inline SosFilter butter_highpass(int order, double cutoff_hz, double fs) {
    detail::check_design(order, fs);
    detail::check_cutoff(cutoff_hz, fs);
    const double wc = detail::prewarp(cutoff_hz, fs);
    std::vector<detail::cplx> poles;
    for (const auto& p : detail::butter_prototype_poles(order)) poles.push_back(detail::bilinear(wc / p, fs));
    auto sections = detail::pair_sections(poles, std::vector<double>(static_cast<std::size_t>(order), 1.0));
    detail::normalize_gain(sections, fs / 2.0, fs);
    return SosFilter(std::move(sections));
}

/// Band-pass from an order-N low-pass prototype (2N poles in total).
inline SosFilter butter_bandpass(int order, double low_hz, double high_hz, double fs) {
    detail::check_design(order, fs);
    detail::check_cutoff(low_hz, fs);
    detail::check_cutoff(high_hz, fs);
    if (!(low_hz < high_hz)) throw ConfigError("band-pass edges must satisfy low < high");
    const double wl = detail::prewarp(low_hz, fs);
    const double wh = detail::prewarp(high_hz, fs);
    const double bw = wh - wl;
    const double w0 = std::sqrt(wl * wh);
    std::vector<detail::cplx> poles;
    for (const auto& p : detail::butter_prototype_poles(order)) {
        const detail::cplx half = p * bw / 2.0;
        const detail::cplx root = std::sqrt(half * half - w0 * w0);
        poles.push_back(detail::bilinear(half + root, fs));
        poles.push_back(detail::bilinear(half - root, fs));
    }
    std::vector<double> zeros(static_cast<std::size_t>(order), 1.0);
    zeros.insert(zeros.end(), static_cast<std::size_t>(order), -1.0);
    auto sections = detail::pair_sections(poles, std::move(zeros));
    const double center_hz = fs / std::numbers::pi * std::atan(w0 / (2.0 * fs));
    detail::normalize_gain(sections, center_hz, fs);
    return SosFilter(std::move(sections));
}

} // namespace edpcgrl::signals
