#pragma once

// Command implementations behind the edpcgrl executable. Each command writes
// into an output directory and returns normally or throws; run_guarded maps
// exceptions to exit codes and removes partial outputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "edpcgrl/analysis.hpp"
#include "edpcgrl/error.hpp"
#include "edpcgrl/io/config.hpp"
#include "edpcgrl/io/csv.hpp"
#include "edpcgrl/parallel.hpp"
#include "edpcgrl/search.hpp"
#include "edpcgrl/session.hpp"
#include "edpcgrl/signals/eda.hpp"
#include "edpcgrl/signals/ppg.hpp"
#include "edpcgrl/stats/kmeans.hpp"
#include "edpcgrl/subjects.hpp"

namespace edpcgrl::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Collects the files a command writes so they can be removed on failure.
class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        if (!fs::exists(dir_)) {
            fs::create_directories(dir_);
            created_ = true;
        } else if (!fs::is_directory(dir_)) {
            throw ConfigError("output path '" + dir_.string() + "' is not a directory");
        }
    }

    const fs::path& path() const { return dir_; }

    /// Write `content` to dir/name (subdirectories allowed) and record it.
    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        if (p.has_parent_path() && !fs::exists(p.parent_path())) {
            fs::create_directories(p.parent_path());
            made_dirs_.push_back(p.parent_path());
        }
        written_.push_back(p);
        std::ofstream out(p, std::ios::binary);
        out << content;
        if (!out) throw Error("failed writing '" + p.string() + "'");
        hashes_.emplace_back(name, io::fnv1a64(content));
    }

    /// Name/hash of every file written so far, in write order.
    const std::vector<std::pair<std::string, std::uint64_t>>& hashes() const { return hashes_; }

    void remove_partial() noexcept {
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
        for (auto it = made_dirs_.rbegin(); it != made_dirs_.rend(); ++it) fs::remove(*it, ec);
        if (created_) fs::remove(dir_, ec);
    }

private:
    fs::path dir_;
    bool created_ = false;
    std::vector<fs::path> written_;
    std::vector<fs::path> made_dirs_;
    std::vector<std::pair<std::string, std::uint64_t>> hashes_;
};

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// The manifest is deterministic (no timestamps), so identical reruns give
/// identical manifests.
inline std::string manifest_text(const std::string& command, const std::string& config_text,
                                 const io::RunConfig& rc, const OutputDir& out) {
    std::ostringstream m;
    m << "command = " << command << '\n';
    m << "config_hash = fnv1a64:" << io::hex64(io::fnv1a64(config_text)) << '\n';
    m << "seed = " << rc.seed << '\n';
    m << "seed_source = " << (rc.seed_from_env ? io::kSeedEnvVar : "config") << '\n';
    for (const auto& [name, h] : out.hashes()) m << "output = " << name << " fnv1a64:" << io::hex64(h) << '\n';
    return m.str();
}

template <class Fn>
std::string to_text(Fn&& fn) {
    std::ostringstream ss;
    fn(ss);
    return ss.str();
}

inline std::string subject_label(std::size_t i) {
    std::string s = std::to_string(i);
    return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    io::SimulationKind kind = io::SimulationKind::Search;
    fs::path config;
    fs::path out;
};

inline void simulate(const SimulateOptions& opt, OutputDir& out, std::ostream& log) {
    const std::string text = read_file(opt.config);
    const auto kv = io::KeyValueConfig::parse(text, opt.config.string());
    const auto rc = io::load_run_config(kv, opt.kind);
    const auto population = sample_population(rc.population);
    out.write("population.csv", to_text([&](std::ostream& os) { io::write_population(os, population); }));

    if (opt.kind == io::SimulationKind::Search) {
        const auto results = run_search(rc.search, population);
        out.write("search_results.csv", to_text([&](std::ostream& os) { io::write_search_results(os, results); }));
        log << "search: " << results.size() << " result rows\n";
    } else {
        const auto n = static_cast<std::size_t>(rc.session_subjects);
        std::vector<SessionTrace> traces(n);
        std::vector<QTable> qtables(n);
        parallel_for(
            n,
            [&](std::size_t i) {
                traces[i] = run_session(rc.session, population[i], counterbalanced_order(i),
                                        derive_seed(rc.seed, {0x5e55, i}), &qtables[i]);
            },
            rc.threads);
        std::ostringstream summary;
        summary << "subject,order,agent,phase,target,steps,mean_anxiety,mse,mean_reward\n";
        for (std::size_t i = 0; i < n; ++i) {
            const auto label = subject_label(i);
            out.write("traces/trace_" + label + ".csv",
                      to_text([&](std::ostream& os) { io::write_trace(os, traces[i]); }));
            out.write("qtables/qtable_" + label + ".csv",
                      to_text([&](std::ostream& os) { io::write_qtable(os, qtables[i]); }));
            const auto order = counterbalanced_order(i) == BlockOrder::RlFirst ? "RL_first" : "Rules_first";
            for (const auto& s : segment_summary(traces[i], rc.session.protocol)) {
                summary << label << ',' << order << ',' << session_agent_name(s.agent) << ',' << phase_name(s.phase)
                        << ',' << s.target << ',' << s.steps << ',' << io::fmt(s.mean_anxiety) << ','
                        << io::fmt(s.mse) << ',' << io::fmt(s.mean_reward) << '\n';
            }
        }
        out.write("segment_summary.csv", summary.str());
        log << io::simulation_name(opt.kind) << ": " << n << " subjects simulated\n";
    }
    out.write("manifest.txt",
              manifest_text("simulate " + std::string(io::simulation_name(opt.kind)), text, rc, out));
}

// ---------------------------------------------------------------------------
// process
// ---------------------------------------------------------------------------

struct RelaxWindow {
    double start_s = 0.0;
    double end_s = 0.0;
};

inline RelaxWindow parse_relax_window(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("--relax-window must look like START:END (seconds)");
    const auto a = io::parse_double(std::string_view(s).substr(0, colon));
    const auto b = io::parse_double(std::string_view(s).substr(colon + 1));
    if (!a || !b || !(*a < *b)) throw ConfigError("--relax-window needs numeric START < END, got '" + s + "'");
    return {*a, *b};
}

struct EdaOptions {
    fs::path in;
    RelaxWindow relax;
    signals::DecompositionMethod method = signals::DecompositionMethod::MedianSmoothing;
    double window_s = 8.0;
    double min_amplitude = 0.01;
    double assumed_max = 20.0;
};

inline void process_eda(const EdaOptions& opt, OutputDir& out, std::ostream& log) {
    const auto raw = io::read_signal_csv(opt.in.string());
    const auto eda = signals::eda_preprocess(raw);
    signals::DecompositionConfig dc;
    dc.method = opt.method;
    dc.window_s = opt.window_s;
    const auto d = signals::eda_decompose(eda, dc);

    double relax_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.scl.size(); ++i) {
        const double t = d.scl.time_at(i);
        if (t >= opt.relax.start_s && t < opt.relax.end_s) relax_min = std::min(relax_min, d.scl.samples[i]);
    }
    if (!std::isfinite(relax_min)) throw ConfigError("relax window contains no processed samples");
    const auto norm = signals::scl_normalize(d.scl, relax_min, opt.assumed_max);
    const auto f = signals::scr_features(d.scr, opt.min_amplitude);

    std::ostringstream params;
    params << "# process eda in=" << opt.in.filename().string() << " lowpass_hz=0.25 order=4 rate_hz=1"
           << " method=" << signals::method_name(opt.method) << " window_s=" << io::fmt(opt.window_s)
           << " relax_window=" << io::fmt(opt.relax.start_s) << ':' << io::fmt(opt.relax.end_s)
           << " relax_min_uS=" << io::fmt(relax_min) << " assumed_max_uS=" << io::fmt(opt.assumed_max)
           << " min_amplitude_uS=" << io::fmt(opt.min_amplitude) << '\n';

    std::ostringstream series;
    series << params.str() << "t_s,eda_uS,scl_uS,scr_uS,scl_norm\n";
    for (std::size_t i = 0; i < eda.size(); ++i) {
        series << io::fmt(eda.time_at(i)) << ',' << io::fmt(eda.samples[i]) << ',' << io::fmt(d.scl.samples[i]) << ','
               << io::fmt(d.scr.samples[i]) << ',' << io::fmt(norm.samples[i]) << '\n';
    }
    out.write("eda_series.csv", series.str());

    double norm_mean = 0.0;
    for (double v : norm.samples) norm_mean += v;
    norm_mean /= static_cast<double>(norm.size());
    std::ostringstream feats;
    feats << params.str() << "n_peaks,mean_amplitude_uS,max_amplitude_uS,sum_amplitude_uS,relax_min_uS,scl_norm_mean\n"
          << f.n_peaks << ',' << io::fmt(f.mean_amplitude) << ',' << io::fmt(f.max_amplitude) << ','
          << io::fmt(f.sum_amplitude) << ',' << io::fmt(relax_min) << ',' << io::fmt(norm_mean) << '\n';
    out.write("eda_features.csv", feats.str());
    log << "eda: " << eda.size() << " samples at 1 Hz, " << f.n_peaks << " SCR peaks\n";
}

struct PpgOptions {
    fs::path in;
};

inline void process_ppg(const PpgOptions& opt, OutputDir& out, std::ostream& log) {
    const signals::PpgConfig cfg;
    const auto raw = io::read_signal_csv(opt.in.string());
    const auto filtered = signals::ppg_preprocess(raw, cfg);
    const auto windows = signals::ppg_windows(filtered, cfg.window_s);

    std::ostringstream os;
    os << "# process ppg in=" << opt.in.filename().string() << " band_hz=" << io::fmt(cfg.band_low_hz) << '-'
       << io::fmt(cfg.band_high_hz) << " order=" << cfg.order << " window_s=" << io::fmt(cfg.window_s)
       << " bpm=" << io::fmt(cfg.min_bpm) << '-' << io::fmt(cfg.max_bpm)
       << " tachogram_hz=" << io::fmt(cfg.tachogram_rate_hz) << '\n';
    os << "window,t_start_s,t_end_s,status,n_beats,mean_nn_ms,sdnn_ms,rmssd_ms,pnn20,pnn50,lf_power_ms2,hf_power_ms2,"
          "lf_hf_ratio,ln_hf\n";
    int ok = 0;
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto& win = windows[w];
        os << w << ',' << io::fmt(win.start_time_s) << ',' << io::fmt(win.start_time_s + win.duration_s()) << ',';
        try {
            const auto h = signals::hrv_features(win, cfg);
            os << "ok," << h.n_beats << ',' << io::fmt(h.mean_nn_ms) << ',' << io::fmt(h.sdnn_ms) << ','
               << io::fmt(h.rmssd_ms) << ',' << io::fmt(h.pnn20) << ',' << io::fmt(h.pnn50) << ','
               << io::fmt(h.lf_power) << ',' << io::fmt(h.hf_power) << ',' << io::fmt(h.lf_hf_ratio) << ','
               << io::fmt(h.ln_hf) << '\n';
            ++ok;
        } catch (const InsufficientDataError&) {
            os << "insufficient_beats,,,,,,,,,,\n";
        }
    }
    out.write("ppg_features.csv", os.str());
    log << "ppg: " << windows.size() << " windows, " << ok << " with features\n";
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeOptions {
    fs::path traces;
    std::optional<fs::path> config; // protocol overrides; defaults otherwise
};

inline void analyze_session(const AnalyzeOptions& opt, OutputDir& out, std::ostream& log) {
    SessionProtocol protocol;
    if (opt.config) {
        const auto kv = io::KeyValueConfig::parse(read_file(*opt.config), opt.config->string());
        protocol.relax_s = kv.get_double("session.relax_s", protocol.relax_s);
        protocol.segment_s = kv.get_double("session.segment_s", protocol.segment_s);
        protocol.adapt_interval_s = kv.get_double("session.adapt_interval_s", protocol.adapt_interval_s);
        protocol.low_target = kv.get_int("session.low_target", protocol.low_target);
        protocol.high_target = kv.get_int("session.high_target", protocol.high_target);
        protocol.validate();
    }
    if (!fs::is_directory(opt.traces)) throw ConfigError("--traces '" + opt.traces.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(opt.traces))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no trace CSVs found in '" + opt.traces.string() + "'");

    std::vector<SubjectAgentReport> reports;
    std::size_t rows = 0;
    for (const auto& f : files) {
        const auto trace = io::read_trace(f.string());
        if (rows == 0) rows = trace.size();
        if (trace.size() != rows) {
            throw IntegrityError("trace '" + f.filename().string() + "' has " + std::to_string(trace.size()) +
                                 " rows, expected " + std::to_string(rows));
        }
        try {
            for (auto& r : subject_reports(f.stem().string(), trace, protocol)) reports.push_back(std::move(r));
        } catch (const IntegrityError& e) {
            throw IntegrityError(f.filename().string() + ": " + e.what());
        }
    }

    std::ostringstream subj;
    subj << "subject,agent,mean_low,mean_high,mse_low,mse_high,wilcoxon_w,wilcoxon_p,wilcoxon_z,wilcoxon_r\n";
    for (const auto& r : reports) {
        subj << r.subject << ',' << session_agent_name(r.agent) << ',' << io::fmt(r.mean_low) << ','
             << io::fmt(r.mean_high) << ',' << io::fmt(r.mse_low) << ',' << io::fmt(r.mse_high) << ',';
        if (r.wilcoxon_defined) {
            subj << io::fmt(r.wilcoxon.statistic) << ',' << io::fmt(r.wilcoxon.p_value) << ','
                 << io::fmt(r.wilcoxon.z) << ',' << io::fmt(r.wilcoxon.effect_r) << '\n';
        } else {
            subj << ",,,\n";
        }
    }
    out.write("subject_report.csv", subj.str());

    std::ostringstream agg;
    agg << "test,alternative,n,mean_a,mean_b,t,df,t_p,wilcoxon_w,wilcoxon_p,wilcoxon_r\n";
    for (const auto& a : aggregate_tests(reports)) {
        agg << a.name << ',' << a.alternative << ',' << a.n << ',' << io::fmt(a.mean_a) << ',' << io::fmt(a.mean_b)
            << ',';
        if (a.t_defined) agg << io::fmt(a.t.t) << ',' << io::fmt(a.t.df) << ',' << io::fmt(a.t.p_value) << ',';
        else agg << ",,,";
        if (a.wilcoxon_defined) {
            agg << io::fmt(a.wilcoxon.statistic) << ',' << io::fmt(a.wilcoxon.p_value) << ','
                << io::fmt(a.wilcoxon.effect_r) << '\n';
        } else {
            agg << ",,\n";
        }
    }
    out.write("aggregate_report.csv", agg.str());
    log << "analyze: " << files.size() << " traces\n";
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

struct ClusterOptions {
    fs::path in;
    std::optional<int> k; // nullopt = elbow selection
    int k_min = 1;
    int k_max = 8;
    int restarts = 10;
    std::uint64_t seed = 2024;
};

/// Reads rows of the six attribute columns (loc..color); values may be real.
inline std::vector<stats::Point<kNumAttributes>> read_points(const std::string& path) {
    const auto lines = io::read_lines(path);
    std::vector<stats::Point<kNumAttributes>> pts;
    bool header = false;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto line = io::trim(lines[ln]);
        if (line.empty() || line.front() == '#') continue;
        const std::string where = path + ":" + std::to_string(ln + 1);
        const auto f = io::split(line);
        if (!header) {
            bool ok = f.size() == kNumAttributes;
            for (std::size_t i = 0; ok && i < kNumAttributes; ++i) ok = io::trim(f[i]) == kAttributeColumns[i];
            if (!ok) throw SchemaError(where + ": expected header 'loc,aom,close,large,hair,color'");
            header = true;
            continue;
        }
        if (f.size() != kNumAttributes) throw SchemaError(where + ": expected 6 fields");
        stats::Point<kNumAttributes> p{};
        for (std::size_t i = 0; i < kNumAttributes; ++i) {
            const auto v = io::parse_double(f[i]);
            if (!v || !std::isfinite(*v)) throw SchemaError(where + ": malformed value '" + std::string(f[i]) + "'");
            p[i] = *v;
        }
        pts.push_back(p);
    }
    if (!header) throw SchemaError(path + ": empty file");
    if (pts.empty()) throw SchemaError(path + ": no data rows");
    return pts;
}

inline void cluster_spiders(const ClusterOptions& opt, OutputDir& out, std::ostream& log) {
    const auto pts = read_points(opt.in.string());
    int k = 0;
    std::string selection;
    if (opt.k) {
        k = *opt.k;
        selection = "fixed";
    } else {
        const int k_max = std::min<int>(opt.k_max, static_cast<int>(stats::detail::count_distinct(pts)));
        const auto elbow = stats::elbow_select(pts, opt.k_min, k_max, opt.seed, opt.restarts);
        k = elbow.k;
        selection = "elbow";
        std::ostringstream e;
        e << "k,wcss\n";
        for (std::size_t i = 0; i < elbow.ks.size(); ++i) e << elbow.ks[i] << ',' << io::fmt(elbow.wcss[i]) << '\n';
        out.write("elbow.csv", e.str());
    }
    const auto model = stats::kmeans_best_of(pts, k, opt.seed, opt.restarts);
    const auto counts = model.member_counts();

    std::ostringstream c;
    c << "cluster,loc,aom,close,large,hair,color,members";
    for (auto col : kAttributeColumns) c << ",raw_" << col;
    c << '\n';
    for (int j = 0; j < model.k; ++j) {
        const auto& center = model.centers[static_cast<std::size_t>(j)];
        const auto spider = stats::discretize(center);
        c << j;
        for (std::size_t i = 0; i < kNumAttributes; ++i) c << ',' << spider[i];
        c << ',' << counts[static_cast<std::size_t>(j)];
        for (double v : center) c << ',' << io::fmt(v);
        c << '\n';
    }
    out.write("cluster_centers.csv", c.str());

    std::ostringstream a;
    a << "row,cluster\n";
    for (std::size_t i = 0; i < model.assignments.size(); ++i) a << i << ',' << model.assignments[i] << '\n';
    out.write("cluster_assignments.csv", a.str());

    std::ostringstream s;
    s << "k,selection,wcss,points,seed\n"
      << k << ',' << selection << ',' << io::fmt(model.wcss) << ',' << pts.size() << ',' << opt.seed << '\n';
    out.write("cluster_summary.csv", s.str());
    log << "cluster: k=" << k << " (" << selection << ")\n";
}

// ---------------------------------------------------------------------------

/// Runs `body` against a fresh output directory and maps failures to exit
/// codes: configuration problems -> 2, everything else -> 1. Partial outputs
/// are removed on failure.
inline int run_guarded(const fs::path& out_dir, const std::function<void(OutputDir&)>& body,
                       std::ostream& err = std::cerr) {
    std::optional<OutputDir> out;
    try {
        out.emplace(out_dir);
        body(*out);
        return kExitOk;
    } catch (const ConfigError& e) {
        if (out) out->remove_partial();
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        if (out) out->remove_partial();
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace edpcgrl::cli
