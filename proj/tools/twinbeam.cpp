// Command-line front end: simulate, replay, sweep, table1.

#include "twinbeam/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace twinbeam;

int main(int argc, char** argv) {
    CLI::App app{"Twin-beam photon-number-difference channel simulator"};
    app.require_subcommand(1);

    std::string config;
    std::uint64_t seed = 0;
    std::string dump;
    std::string out_dir = ".";
    std::size_t bins = 100;
    unsigned threads = 1;

    auto* sim = app.add_subcommand("simulate", "Run a seeded session and write report.json / report.txt");
    sim->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    auto* sim_seed = sim->add_option("--seed", seed, "Override the configured seed");
    sim->add_option("--dump-samples", dump, "Directory for per-condition sample files");
    sim->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sim->add_option("--bins", bins, "Histogram bins")->capture_default_str();
    sim->add_option("--threads", threads, "Worker lanes (output does not depend on it)")->capture_default_str();

    std::vector<std::string> files;
    double threshold = 0.0;
    auto* rep = app.add_subcommand("replay", "Analyze recorded sample files");
    rep->add_option("files", files, "Sample files (one ensemble)")->required()->check(CLI::ExistingFile);
    auto* rep_threshold = rep->add_option("--threshold", threshold, "Postselection threshold N0");
    rep->add_option("--config", config, "Take the threshold from this config")->check(CLI::ExistingFile);
    rep->add_option("--out", out_dir, "Output directory")->capture_default_str();
    rep->add_option("--bins", bins, "Histogram bins")->capture_default_str();

    std::string n0_grid = "0:100:10";
    std::string n_grid = "200";
    double sigma = 0.0;
    auto* swp = app.add_subcommand("sweep", "Analytic efficiency/BER over an (N0, N) grid");
    swp->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    swp->add_option("--n0", n0_grid, "Thresholds: start:stop:step or a,b,c")->capture_default_str();
    swp->add_option("--n", n_grid, "Mean differences: start:stop:step or a,b,c")->capture_default_str();
    auto* swp_sigma = swp->add_option("--sigma", sigma, "Override the configured correct-basis sigma");
    swp->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::size_t samples = 100000;
    auto* tab = app.add_subcommand("table1", "Per-condition mean and sigma for both sources and bases");
    tab->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    auto* tab_seed = tab->add_option("--seed", seed, "Override the configured seed");
    tab->add_option("--samples", samples, "Draws per condition")->capture_default_str();
    tab->add_option("--out", out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    return run_command(
        [&] {
            if (*sim) {
                SimulateOptions o{config, std::nullopt, std::nullopt, bins, threads};
                if (*sim_seed)
                    o.seed = seed;
                if (!dump.empty())
                    o.dump_samples = dump;
                const Report r = simulate(o);
                write_report(r, out_dir, "report");
                std::cout << r.summary;
            } else if (*rep) {
                ReplayOptions o;
                o.files.assign(files.begin(), files.end());
                if (*rep_threshold)
                    o.threshold = threshold;
                if (!config.empty())
                    o.config = config;
                o.bins = bins;
                const Report r = replay(o);
                write_report(r, out_dir, "report");
                std::cout << r.summary;
            } else if (*swp) {
                SweepOptions o{config, n0_grid, n_grid, std::nullopt};
                if (*swp_sigma)
                    o.sigma = sigma;
                const Report r = sweep_report(o);
                write_report(r, out_dir, "sweep");
                std::cout << r.summary;
            } else if (*tab) {
                Table1Options o{config, std::nullopt, samples};
                if (*tab_seed)
                    o.seed = seed;
                const Report r = table1_report(o);
                write_report(r, out_dir, "table1");
                std::cout << r.summary;
            }
        },
        std::cerr);
}
