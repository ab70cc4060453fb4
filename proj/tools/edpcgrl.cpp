#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "edpcgrl/cli/commands.hpp"

namespace cli = edpcgrl::cli;
namespace io = edpcgrl::io;

int main(int argc, char** argv) {
    CLI::App app{"Adaptive spider generation: simulation, signal processing and analysis"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run a simulated experiment from a config file");
    sim->require_subcommand(1);
    cli::SimulateOptions sim_opt;
    std::string sim_out;
    for (auto kind : {io::SimulationKind::Search, io::SimulationKind::Session, io::SimulationKind::Reversed}) {
        const std::string name(io::simulation_name(kind));
        const char* help = kind == io::SimulationKind::Search    ? "Search experiment over stress categories"
                           : kind == io::SimulationKind::Session ? "Counterbalanced RL/Rules sessions"
                                                                 : "Sessions with the high-target segment first";
        auto* sub = sim->add_subcommand(name, help);
        sub->add_option("--config", sim_opt.config, "Config file (key = value with [sections])")->required();
        sub->add_option("--out", sim_out, "Output directory")->required();
        sub->callback([&sim_opt, kind] { sim_opt.kind = kind; });
    }

    // process
    auto* proc = app.add_subcommand("process", "Process a physiological recording (CSV t_s,value)");
    proc->require_subcommand(1);
    auto* eda = proc->add_subcommand("eda", "EDA: 1 Hz SCL/SCR, normalized SCL and SCR features");
    cli::EdaOptions eda_opt;
    std::string relax_window, method = "median", eda_out;
    eda->add_option("--in", eda_opt.in, "Input CSV")->required();
    eda->add_option("--relax-window", relax_window, "Relaxation window START:END in seconds")->required();
    eda->add_option("--method", method, "Decomposition: median|highpass")
        ->check(CLI::IsMember({"median", "highpass"}))
        ->capture_default_str();
    eda->add_option("--window-s", eda_opt.window_s, "Median smoothing window in seconds")->capture_default_str();
    eda->add_option("--min-amplitude", eda_opt.min_amplitude, "SCR peak threshold in microsiemens")
        ->capture_default_str();
    eda->add_option("--out", eda_out, "Output directory")->required();

    auto* ppg = proc->add_subcommand("ppg", "PPG: 60 s windows of HRV features");
    cli::PpgOptions ppg_opt;
    std::string ppg_out;
    ppg->add_option("--in", ppg_opt.in, "Input CSV")->required();
    ppg->add_option("--out", ppg_out, "Output directory")->required();

    // analyze
    auto* ana = app.add_subcommand("analyze", "Statistical analysis of simulation outputs");
    ana->require_subcommand(1);
    auto* ana_sess = ana->add_subcommand("session", "Per-subject and aggregate tests over session traces");
    cli::AnalyzeOptions ana_opt;
    std::string ana_out, ana_config;
    ana_sess->add_option("--traces", ana_opt.traces, "Directory of trace CSVs")->required();
    ana_sess->add_option("--config", ana_config, "Config with [session] protocol overrides");
    ana_sess->add_option("--out", ana_out, "Output directory")->required();

    // cluster
    auto* clu = app.add_subcommand("cluster", "K-means clustering");
    clu->require_subcommand(1);
    auto* spiders = clu->add_subcommand("spiders", "Cluster spiders (CSV columns loc,aom,close,large,hair,color)");
    cli::ClusterOptions clu_opt;
    std::string k_text = "auto", clu_out;
    spiders->add_option("--in", clu_opt.in, "Input CSV")->required();
    spiders->add_option("--k", k_text, "Number of clusters, or 'auto' for elbow selection")->capture_default_str();
    spiders->add_option("--k-min", clu_opt.k_min, "Smallest k tried by elbow selection")->capture_default_str();
    spiders->add_option("--k-max", clu_opt.k_max, "Largest k tried by elbow selection")->capture_default_str();
    spiders->add_option("--restarts", clu_opt.restarts, "Seeded restarts per k")->capture_default_str();
    spiders->add_option("--seed", clu_opt.seed, "Seed for k-means++ initialization")->capture_default_str();
    spiders->add_option("--out", clu_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kExitOk : cli::kExitUsage;
    }

    if (sim->parsed()) {
        return cli::run_guarded(sim_out, [&](cli::OutputDir& out) { cli::simulate(sim_opt, out, std::cerr); });
    }
    if (eda->parsed()) {
        return cli::run_guarded(eda_out, [&](cli::OutputDir& out) {
            eda_opt.relax = cli::parse_relax_window(relax_window);
            eda_opt.method = edpcgrl::signals::parse_method(method);
            cli::process_eda(eda_opt, out, std::cerr);
        });
    }
    if (ppg->parsed()) {
        return cli::run_guarded(ppg_out, [&](cli::OutputDir& out) { cli::process_ppg(ppg_opt, out, std::cerr); });
    }
    if (ana_sess->parsed()) {
        if (!ana_config.empty()) ana_opt.config = ana_config;
        return cli::run_guarded(ana_out,
                                [&](cli::OutputDir& out) { cli::analyze_session(ana_opt, out, std::cerr); });
    }
    if (spiders->parsed()) {
        return cli::run_guarded(clu_out, [&](cli::OutputDir& out) {
            if (k_text != "auto") {
                const auto k = io::parse_int(k_text);
                if (!k || *k < 1) throw edpcgrl::ConfigError("--k must be 'auto' or a positive integer");
                clu_opt.k = static_cast<int>(*k);
            }
            cli::cluster_spiders(clu_opt, out, std::cerr);
        });
    }
    return cli::kExitUsage;
}
