#pragma once

#include "twinbeam/io.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace twinbeam {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitData = 3,
    kExitInsufficient = 4,
};

/// A structured report plus its plain-text rendering.
struct Report {
    nlohmann::json data;
    std::string summary;
};

struct SimulateOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> dump_samples; ///< directory
    std::size_t bins = 100;
    unsigned threads = 1;
};

struct ReplayOptions {
    std::vector<std::filesystem::path> files;
    std::optional<double> threshold;
    std::optional<std::filesystem::path> config; ///< supplies the threshold when none is given
    std::size_t bins = 100;
};

struct SweepOptions {
    std::filesystem::path config;
    std::string thresholds;  ///< "start:stop:step" or "a,b,c"
    std::string mean_diffs;  ///< same syntax
    std::optional<double> sigma; ///< defaults to the configured correct-basis sigma
};

struct Table1Options {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::size_t samples = 100000;
};

/// Names of the files written by --dump-samples inside its directory.
std::string dump_file_name(bool basis_match, int key);

/// Parses "start:stop:step" (inclusive) or a comma list. Throws ConfigError.
std::vector<double> parse_grid(const std::string& spec, const std::string& field);

Report simulate(const SimulateOptions& opts);
Report replay(const ReplayOptions& opts);
Report sweep_report(const SweepOptions& opts);
Report table1_report(const Table1Options& opts);

/// Writes <stem>.json and <stem>.txt into `out_dir`, creating it if needed.
void write_report(const Report& report, const std::filesystem::path& out_dir, const std::string& stem);

/// Runs `body`, printing any error to `err` and mapping it to an exit code.
int run_command(const std::function<void()>& body, std::ostream& err);

} // namespace twinbeam
