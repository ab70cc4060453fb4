#pragma once

// Plain comma-separated I/O for traces, experiment results and signal input.
// No quoting: no field the library writes contains a comma.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "edpcgrl/agents.hpp"
#include "edpcgrl/error.hpp"
#include "edpcgrl/search.hpp"
#include "edpcgrl/session.hpp"
#include "edpcgrl/signals/series.hpp"
#include "edpcgrl/subjects.hpp"

namespace edpcgrl::io {

/// Shortest text that round-trips; NaN becomes an empty field.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Lines of a text file, with a trailing newline not producing an empty line.
inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

// ---------------------------------------------------------------------------
// Signal input
// ---------------------------------------------------------------------------

/// Reads `t_s,value` with a header row. Lines starting with '#' and blank
/// lines are skipped. Timestamps must be uniform: every step within 1% of the
/// mean step.
inline signals::SignalSeries read_signal_csv(const std::string& path) {
    const auto lines = read_lines(path);
    std::vector<double> t, v;
    bool header_seen = false;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto line = trim(lines[ln]);
        if (line.empty() || line.front() == '#') continue;
        const std::string where = path + ":" + std::to_string(ln + 1);
        const auto fields = split(line);
        if (!header_seen) {
            if (fields.size() != 2 || trim(fields[0]) != "t_s" || trim(fields[1]) != "value") {
                throw SchemaError(where + ": expected header 't_s,value'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) throw SchemaError(where + ": expected 2 fields, found " + std::to_string(fields.size()));
        const auto ts = parse_double(fields[0]);
        const auto val = parse_double(fields[1]);
        if (!ts || !val || !std::isfinite(*ts) || !std::isfinite(*val)) {
            throw SchemaError(where + ": malformed row '" + std::string(line) + "'");
        }
        t.push_back(*ts);
        v.push_back(*val);
    }
    if (!header_seen) throw SchemaError(path + ": empty file (missing 't_s,value' header)");
    if (t.size() < 2) throw SchemaError(path + ": need at least 2 samples");

    const double mean_dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(mean_dt > 0.0)) throw SamplingError(path + ": timestamps must increase");
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double dt = t[i] - t[i - 1];
        if (std::abs(dt - mean_dt) > 0.01 * mean_dt) {
            throw SamplingError(path + ": non-uniform sampling between t=" + fmt(t[i - 1]) + " and t=" + fmt(t[i]));
        }
    }
    return {1.0 / mean_dt, std::move(v), t.front()};
}

inline void write_signal_csv(std::ostream& os, const signals::SignalSeries& s) {
    os << "t_s,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) os << fmt(s.time_at(i)) << ',' << fmt(s.samples[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Session traces
// ---------------------------------------------------------------------------

inline constexpr std::string_view kTraceHeader =
    "t_s,phase,agent,state_index,loc,aom,close,large,hair,color,anxiety,reward,action_attr,action_dir";

inline void write_trace(std::ostream& os, const SessionTrace& trace) {
    os << kTraceHeader << '\n';
    for (const auto& r : trace) {
        os << fmt(r.t_s) << ',' << phase_name(r.phase) << ',' << session_agent_name(r.agent) << ',';
        if (r.spider) {
            os << encode(*r.spider);
            for (std::size_t i = 0; i < kNumAttributes; ++i) os << ',' << (*r.spider)[i];
        } else {
            os << ",,,,,,";
        }
        os << ',' << (r.anxiety ? std::to_string(*r.anxiety) : "");
        os << ',' << (r.reward ? fmt(*r.reward) : "");
        if (r.action) {
            os << ',' << kAttributeColumns[static_cast<std::size_t>(r.action->attribute)] << ','
               << (r.action->direction > 0 ? "+1" : "-1");
        } else {
            os << ",,";
        }
        os << '\n';
    }
}

inline SessionTrace read_trace(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw SchemaError(path + ": empty file");
    if (trim(lines[0]) != kTraceHeader) throw SchemaError(path + ":1: unexpected trace header");
    SessionTrace trace;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto line = trim(lines[ln]);
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(ln + 1);
        const auto f = split(line);
        if (f.size() != 14) throw SchemaError(where + ": expected 14 fields, found " + std::to_string(f.size()));
        try {
            TraceRow r;
            const auto t = parse_double(f[0]);
            if (!t) throw SchemaError("bad t_s");
            r.t_s = *t;
            r.phase = parse_phase(trim(f[1]));
            r.agent = parse_session_agent(trim(f[2]));
            if (!trim(f[3]).empty()) {
                std::array<int, kNumAttributes> v{};
                for (std::size_t i = 0; i < kNumAttributes; ++i) {
                    const auto x = parse_int(f[4 + i]);
                    if (!x) throw SchemaError("bad attribute value");
                    v[i] = static_cast<int>(*x);
                }
                r.spider = SpiderAttributes(v);
                const auto idx = parse_int(f[3]);
                if (!idx || *idx != encode(*r.spider)) throw SchemaError("state_index does not match attributes");
            }
            if (!trim(f[10]).empty()) {
                const auto a = parse_int(f[10]);
                if (!a) throw SchemaError("bad anxiety");
                r.anxiety = AnxietyLevel(static_cast<int>(*a)).value();
            }
            if (!trim(f[11]).empty()) {
                const auto rw = parse_double(f[11]);
                if (!rw) throw SchemaError("bad reward");
                r.reward = *rw;
            }
            if (!trim(f[12]).empty()) {
                int attr = -1;
                for (std::size_t i = 0; i < kNumAttributes; ++i)
                    if (kAttributeColumns[i] == trim(f[12])) attr = static_cast<int>(i);
                const auto dir = parse_int(f[13]);
                if (attr < 0 || !dir || (*dir != 1 && *dir != -1)) throw SchemaError("bad action");
                r.action = AttributeAction{attr, static_cast<int>(*dir)};
            }
            trace.push_back(r);
        } catch (const Error& e) {
            throw SchemaError(where + ": " + e.what());
        }
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Experiment outputs
// ---------------------------------------------------------------------------

inline void write_search_results(std::ostream& os, const std::vector<SearchResult>& results) {
    os << "agent,category,initial_state,spiders_presented,accuracy,reported\n";
    for (const auto& r : results) {
        os << agent_name(r.agent) << ',' << r.category << ',' << r.initial_state << ','
           << (r.reported ? fmt(r.spiders_presented) : "") << ',' << fmt(r.accuracy) << ','
           << (r.reported ? "true" : "false") << '\n';
    }
}

inline void write_population(std::ostream& os, const std::vector<VirtualSubject>& population) {
    os << "subject";
    for (auto c : kAttributeColumns) os << ",w_" << c;
    os << ",noise_sigma,habituation_decay,seed\n";
    for (std::size_t s = 0; s < population.size(); ++s) {
        const auto& p = population[s];
        os << s;
        for (double w : p.weights) os << ',' << fmt(w);
        os << ',' << fmt(p.noise_sigma) << ',' << fmt(p.habituation_decay) << ',' << p.seed << '\n';
    }
}

/// Valid slots only; invalid slots are left out.
inline void write_qtable(std::ostream& os, const QTable& q) {
    os << "state_index,action_slot,q_value\n";
    for (int s = 0; s < kNumStates; ++s) {
        const auto spider = decode(s);
        for (int slot = 0; slot < kNumActionSlots; ++slot) {
            if (!is_valid_action(spider, action_from_slot(slot))) continue;
            os << s << ',' << slot << ',' << fmt(q.get(s, action_from_slot(slot))) << '\n';
        }
    }
}

} // namespace edpcgrl::io
