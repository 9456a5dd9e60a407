#include "twinbeam/commands.hpp"

#include "twinbeam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace twinbeam {

using nlohmann::json;

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

RunConfig resolve_config(const std::filesystem::path& path, const std::optional<std::uint64_t>& seed) {
    RunConfig cfg = load_config(path);
    if (seed)
        cfg.seed = *seed;
    cfg.validate();
    return cfg;
}

void check_bins(std::size_t bins) {
    if (bins < 2)
        throw ConfigError("--bins", "must be at least 2");
}

void append_ensemble_summary(std::ostringstream& os, const json& e) {
    const auto& c = e["counts"];
    const auto& emp = e["empirical"];
    const auto& fit = e["fit"];
    os << "samples            " << c["samples"].get<std::size_t>() << "\n"
       << "conclusive         " << c["conclusive"].get<std::size_t>() << "\n"
       << "inconclusive       " << c["inconclusive"].get<std::size_t>() << "\n"
       << "errors             " << c["errors"].get<std::size_t>() << "\n"
       << "ber_empirical      " << fmt("%.5f", emp["ber"].get<double>()) << "  [95% "
       << fmt("%.5f", emp["ber_wilson95"][0].get<double>()) << ", "
       << fmt("%.5f", emp["ber_wilson95"][1].get<double>()) << "]\n"
       << "postselection_rate " << fmt("%.5f", emp["postselection_rate"].get<double>()) << "\n"
       << "fit mean_hat       " << fmt("%.3f", fit["mean_hat"].get<double>()) << "\n"
       << "fit sigma_hat      " << fmt("%.3f", fit["sigma_hat"].get<double>()) << "\n"
       << "fit scale          " << fmt("%.6g", fit["scale_coefficient"].get<double>()) << "\n"
       << "ber_from_fit       " << fmt("%.5f", fit["ber"].get<double>()) << "\n"
       << "histogram          " << e["histogram"]["bins"].get<std::size_t>() << " bins, width "
       << fmt("%.3f", e["histogram"]["bin_width"].get<double>()) << "\n";
}

} // namespace

std::string dump_file_name(bool basis_match, int key) {
    return std::string(basis_match ? "match" : "mismatch") + "_key" + std::to_string(key) + ".csv";
}

std::vector<double> parse_grid(const std::string& spec, const std::string& field) {
    auto parse_number = [&](const std::string& text) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw ConfigError(field, "invalid number '" + text + "'");
        }
        if (used != text.size() || !std::isfinite(v))
            throw ConfigError(field, "invalid number '" + text + "'");
        return v;
    };

    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string part; std::getline(ss, part, ':');)
            parts.push_back(part);
        if (parts.size() != 3)
            throw ConfigError(field, "range must be start:stop:step");
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double step = parse_number(parts[2]);
        if (!(step > 0.0))
            throw ConfigError(field, "range step must be positive");
        const double lo = std::min(start, stop);
        const double hi = std::max(start, stop);
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(lo + static_cast<double>(i) * step);
    } else {
        std::stringstream ss(spec);
        for (std::string part; std::getline(ss, part, ',');) {
            if (!part.empty())
                out.push_back(parse_number(part));
        }
    }
    if (out.empty())
        throw ConfigError(field, "grid is empty");
    return out;
}

Report simulate(const SimulateOptions& opts) {
    check_bins(opts.bins);
    const RunConfig cfg = resolve_config(opts.config, opts.seed);
    const auto& s = cfg.session;

    RandomStream rng(cfg.seed);
    const SessionTranscript transcript = run_session(cfg.session_length, s, rng, opts.threads);
    const SiftedKey key = sift(transcript.pulses, transcript.measurements);

    LabeledSamples sifted;
    sifted.indices = key.positions;
    sifted.keys = key.alice_bits;
    sifted.samples.reserve(key.positions.size());
    for (const auto pos : key.positions)
        sifted.samples.push_back(transcript.measurements[pos].n_sample);

    const GaussianModel model{s.encoding.mean_diff(s.source), effective_sigma(s.source, true, s.detection)};

    Report report;
    report.data = json{
        {"command", "simulate"},
        {"config", to_json(cfg)},
        {"pulses", cfg.session_length},
        {"analytic",
         {{"mean_diff", model.mean_diff},
          {"sigma", model.sigma},
          {"sigma_shot_noise", effective_sigma(s.source, false, s.detection)},
          {"postselection_efficiency", postselection_efficiency(s.policy, model)},
          {"ber", ber(s.policy, model)}}},
        {"ensemble", summarize_samples(sifted, s.policy, opts.bins)},
    };

    if (opts.dump_samples) {
        std::filesystem::create_directories(*opts.dump_samples);
        std::map<std::pair<bool, int>, SampleFile> files;
        for (const bool match : {true, false})
            for (const int bit : {0, 1})
                files[{match, bit}].header = SampleHeader{1, s.source.kind, match, bit};
        for (std::size_t i = 0; i < transcript.pulses.size(); ++i) {
            const auto& p = transcript.pulses[i];
            const auto& m = transcript.measurements[i];
            files[{p.alice_basis == m.bob_basis, p.alice_bit}].rows.push_back({i, m.n_sample});
        }
        for (const auto& [label, file] : files)
            write_sample_file(*opts.dump_samples / dump_file_name(label.first, label.second), file);
    }

    const auto& a = report.data["analytic"];
    std::ostringstream os;
    os << "twinbeam simulate\n"
       << "seed               " << cfg.seed << "\n"
       << "source             " << to_string(s.source.kind) << " (" << fmt("%.2f", s.source.correlation_db)
       << " dB)\n"
       << "attack             " << to_string(s.attack.kind) << "\n"
       << "pulses             " << cfg.session_length << "\n"
       << "threshold N0       " << fmt("%g", s.policy.threshold) << "\n"
       << "mean_diff N        " << fmt("%g", model.mean_diff) << "\n"
       << "sigma              " << fmt("%.3f", model.sigma) << "\n"
       << "ber_analytic       " << fmt("%.5f", a["ber"].get<double>()) << "\n"
       << "efficiency         " << fmt("%.5f", a["postselection_efficiency"].get<double>()) << "\n";
    append_ensemble_summary(os, report.data["ensemble"]);
    report.summary = os.str();
    return report;
}

Report replay(const ReplayOptions& opts) {
    check_bins(opts.bins);
    if (opts.files.empty())
        throw ConfigError("files", "no sample files given");

    DecisionPolicy policy;
    if (opts.threshold)
        policy.threshold = *opts.threshold;
    else if (opts.config)
        policy = load_config(*opts.config).session.policy;
    else
        throw ConfigError("--threshold", "replay needs --threshold or --config");
    try {
        policy.validate();
    } catch (const DomainError& e) {
        throw ConfigError("--threshold", e.what());
    }

    struct Tagged {
        std::size_t index;
        double n;
        int key;
    };
    std::vector<Tagged> rows;
    json labels = json::array();
    std::optional<SampleHeader> first;
    for (const auto& path : opts.files) {
        const SampleFile file = read_sample_file(path);
        if (!first)
            first = file.header;
        else if (file.header.basis_match != first->basis_match || file.header.source != first->source)
            throw DataError(1, path.string() + ": source/basis labels differ from " + opts.files.front().string());
        labels.push_back({{"file", path.filename().string()},
                          {"source", to_string(file.header.source)},
                          {"basis", file.header.basis_match ? "match" : "mismatch"},
                          {"key", file.header.key},
                          {"rows", file.rows.size()}});
        for (const auto& r : file.rows)
            rows.push_back({r.index, r.n_sample, file.header.key});
    }
    std::sort(rows.begin(), rows.end(), [](const Tagged& a, const Tagged& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].index == rows[i - 1].index)
            throw DataError(0, "index " + std::to_string(rows[i].index) + " appears in more than one file");

    LabeledSamples data;
    for (const auto& r : rows) {
        data.indices.push_back(r.index);
        data.samples.push_back(r.n);
        data.keys.push_back(r.key);
    }
    if (data.samples.empty())
        throw InsufficientDataError("sample files contain no rows");

    Report report;
    report.data = json{
        {"command", "replay"},
        {"threshold", policy.threshold},
        {"bins", opts.bins},
        {"files", labels},
        {"ensemble", summarize_samples(data, policy, opts.bins)},
    };
    std::ostringstream os;
    os << "twinbeam replay\n"
       << "files              " << opts.files.size() << "\n"
       << "source             " << to_string(first->source) << "\n"
       << "basis              " << (first->basis_match ? "match" : "mismatch") << "\n"
       << "threshold N0       " << fmt("%g", policy.threshold) << "\n";
    append_ensemble_summary(os, report.data["ensemble"]);
    report.summary = os.str();
    return report;
}

Report sweep_report(const SweepOptions& opts) {
    const RunConfig cfg = resolve_config(opts.config, std::nullopt);
    const auto thresholds = parse_grid(opts.thresholds, "--n0");
    const auto mean_diffs = parse_grid(opts.mean_diffs, "--n");
    for (const double n0 : thresholds)
        if (n0 < 0.0)
            throw ConfigError("--n0", "thresholds must be non-negative");
    for (const double n : mean_diffs)
        if (n < 0.0)
            throw ConfigError("--n", "mean differences must be non-negative");

    const double sigma = opts.sigma ? *opts.sigma : effective_sigma(cfg.session.source, true, cfg.session.detection);
    if (!std::isfinite(sigma) || !(sigma > 0.0))
        throw ConfigError("--sigma", "must be positive");

    const SweepTable table = sweep(thresholds, mean_diffs, sigma);

    Report report;
    report.data = json{
        {"command", "sweep"},
        {"config", to_json(cfg)},
        {"sigma", sigma},
        {"rows", to_json(table)},
    };
    std::ostringstream os;
    os << "# sigma = " << fmt("%.6g", sigma) << "\n"
       << "#       N0        N   efficiency        ber  pareto\n";
    char line[128];
    for (const auto& r : table.rows) {
        std::snprintf(line, sizeof line, "%10.3f %8.3f %12.6f %10.6f  %s\n", r.threshold, r.mean_diff, r.efficiency,
                      r.ber, r.pareto ? "*" : "");
        os << line;
    }
    report.summary = os.str();
    return report;
}

Report table1_report(const Table1Options& opts) {
    const RunConfig cfg = resolve_config(opts.config, opts.seed);
    const auto& s = cfg.session;
    SourceModel twin = s.source;
    if (twin.kind == SourceKind::Coherent)
        twin = SourceModel{SourceKind::TwinBeam, s.source.mean_photons_per_mode, -5.5};

    const auto rows = reproduce_table1(twin, s.encoding, s.detection, cfg.seed, opts.samples);

    Report report;
    report.data = json{
        {"command", "table1"},
        {"config", to_json(cfg)},
        {"twin_correlation_db", twin.correlation_db},
        {"rows", to_json(rows)},
    };
    std::ostringstream os;
    os << "# source      basis     key       mean      sigma\n";
    char line[128];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-12s %-9s %3d %10.2f %10.2f\n", std::string(to_string(r.source)).c_str(),
                      r.basis_match ? "match" : "mismatch", r.key, r.mean, r.sigma);
        os << line;
    }
    report.summary = os.str();
    return report;
}

void write_report(const Report& report, const std::filesystem::path& out_dir, const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir / (stem + ".json"));
        if (!out)
            throw DataError(0, "cannot write " + (out_dir / (stem + ".json")).string());
        out << report.data.dump(2) << '\n';
    }
    std::ofstream out(out_dir / (stem + ".txt"));
    if (!out)
        throw DataError(0, "cannot write " + (out_dir / (stem + ".txt")).string());
    out << report.summary;
}

int run_command(const std::function<void()>& body, std::ostream& err) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InsufficientDataError& e) {
        err << "insufficient data: " << e.what() << '\n';
        return kExitInsufficient;
    } catch (const DegeneratePolicyError& e) {
        err << "insufficient data: " << e.what() << '\n';
        return kExitInsufficient;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "fatal: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace twinbeam
