#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "edpcgrl/error.hpp"

namespace edpcgrl::signals {

/// Uniformly sampled recording.
struct SignalSeries {
    double sample_rate_hz = 1.0;
    std::vector<double> samples;
    double start_time_s = 0.0;

    std::size_t size() const { return samples.size(); }
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
    double time_at(std::size_t i) const { return start_time_s + static_cast<double>(i) / sample_rate_hz; }

    void validate() const {
        if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
            throw ConfigError("sample rate must be a positive finite number");
        }
        if (samples.empty()) throw LengthError("signal is empty");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!std::isfinite(samples[i])) throw SchemaError("non-finite sample at index " + std::to_string(i));
        }
    }

    /// Samples [first, first + count) as a new series with adjusted start time.
    SignalSeries slice(std::size_t first, std::size_t count) const {
        SignalSeries out;
        out.sample_rate_hz = sample_rate_hz;
        out.start_time_s = time_at(first);
        out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(first),
                           samples.begin() + static_cast<std::ptrdiff_t>(first + count));
        return out;
    }
};

} // namespace edpcgrl::signals
