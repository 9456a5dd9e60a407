#include "twinbeam/io.hpp"

#include "twinbeam/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace twinbeam {

using nlohmann::json;

namespace {

// Typed access to one JSON object with key-path diagnostics.
class Section {
  public:
    Section(const json& doc, std::string path, std::initializer_list<std::string_view> allowed)
        : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object())
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        for (const auto& item : doc_.items()) {
            bool known = false;
            for (const auto key : allowed)
                known = known || item.key() == key;
            if (!known)
                throw ConfigError(field(item.key()), "unknown key");
        }
    }

    bool has(const std::string& key) const { return doc_.contains(key); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key, double fallback) const {
        if (!has(key))
            return fallback;
        const auto& v = doc_.at(key);
        if (!v.is_number())
            throw ConfigError(field(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
            throw ConfigError(field(key), "must be finite");
        return d;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
        if (!has(key))
            return fallback;
        const auto& v = doc_.at(key);
        if (!v.is_number_unsigned())
            throw ConfigError(field(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        if (!has(key))
            return fallback;
        const auto& v = doc_.at(key);
        if (!v.is_string())
            throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }

    Section child(const std::string& key, std::initializer_list<std::string_view> allowed) const {
        static const json empty = json::object();
        return Section(has(key) ? doc_.at(key) : empty, field(key), allowed);
    }

  private:
    const json& doc_;
    std::string path_;
};

// Runs a component validator and rethrows as a config error on `field`.
template <class F>
void check(const std::string& field, F&& validate) {
    try {
        validate();
    } catch (const DomainError& e) {
        throw ConfigError(field, e.what());
    }
}

} // namespace

void RunConfig::validate() const {
    if (session_length < 1)
        throw ConfigError("session_length", "must be at least 1");
    check("source", [&] { session.source.validate(); });
    check("encoding", [&] { session.encoding.validate(); });
    check("detection", [&] { session.detection.validate(); });
    check("policy", [&] { session.policy.validate(); });
    check("attack", [&] { session.attack.validate(); });
    check("timing", [&] { session.timing.validate(); });
}

RunConfig parse_config(const json& doc) {
    const Section root(doc, "",
                       {"seed", "session_length", "calibration_factor", "source", "encoding", "detection",
                        "policy", "attack", "timing"});
    RunConfig cfg;
    cfg.seed = root.unsigned_integer("seed", cfg.seed);
    cfg.session_length = root.unsigned_integer("session_length", cfg.session_length);
    if (cfg.session_length < 1)
        throw ConfigError("session_length", "must be at least 1");

    auto& s = cfg.session;
    s.detection.calibration_factor = root.number("calibration_factor", 1.0);
    if (!(s.detection.calibration_factor > 0.0))
        throw ConfigError("calibration_factor", "must be positive");

    const Section source = root.child("source", {"kind", "mean_photons_per_mode", "correlation_db"});
    const std::string kind = source.text("kind", "twin_beam");
    if (kind == "twin_beam")
        s.source.kind = SourceKind::TwinBeam;
    else if (kind == "coherent")
        s.source.kind = SourceKind::Coherent;
    else
        throw ConfigError(source.field("kind"), "expected twin_beam or coherent, got '" + kind + "'");
    s.source.mean_photons_per_mode = source.number("mean_photons_per_mode", 4.0e4);
    s.source.correlation_db =
        source.number("correlation_db", s.source.kind == SourceKind::Coherent ? 0.0 : -5.5);
    check(source.field("mean_photons_per_mode"), [&] {
        if (!(s.source.mean_photons_per_mode > 0.0))
            throw DomainError("must be positive");
    });
    check(source.field("correlation_db"), [&] { s.source.validate(); });

    const Section enc = root.child("encoding", {"attenuation_fraction"});
    s.encoding.attenuation_fraction = enc.number("attenuation_fraction", 0.005);
    check(enc.field("attenuation_fraction"), [&] { s.encoding.validate(); });

    const Section det = root.child("detection", {"quantum_efficiency"});
    s.detection.quantum_efficiency = det.number("quantum_efficiency", 1.0);
    check(det.field("quantum_efficiency"), [&] { s.detection.validate(); });

    const Section policy = root.child("policy", {"threshold"});
    s.policy.threshold = policy.number("threshold", 20.0);
    check(policy.field("threshold"), [&] { s.policy.validate(); });

    const Section attack = root.child("attack", {"kind", "tap_fraction"});
    const std::string attack_kind = attack.text("kind", "none");
    if (attack_kind == "none")
        s.attack.kind = AttackKind::None;
    else if (attack_kind == "intercept_resend")
        s.attack.kind = AttackKind::InterceptResend;
    else if (attack_kind == "beam_splitter_tap")
        s.attack.kind = AttackKind::BeamSplitterTap;
    else
        throw ConfigError(attack.field("kind"), "unknown attack '" + attack_kind + "'");
    if (attack.has("tap_fraction"))
        s.attack.tap_fraction = attack.number("tap_fraction", 0.0);
    check(attack.field("tap_fraction"), [&] { s.attack.validate(); });

    const Section timing = root.child("timing", {"mode", "interval_duration"});
    const std::string mode = timing.text("mode", "pulse");
    if (mode == "pulse")
        s.timing.mode = TimingMode::Pulse;
    else if (mode == "continuous_intervals")
        s.timing.mode = TimingMode::ContinuousIntervals;
    else
        throw ConfigError(timing.field("mode"), "expected pulse or continuous_intervals, got '" + mode + "'");
    if (timing.has("interval_duration"))
        s.timing.interval_duration = timing.number("interval_duration", 0.0);
    check(timing.field("interval_duration"), [&] { s.timing.validate(); });

    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& config) {
    const auto& s = config.session;
    json attack = {{"kind", to_string(s.attack.kind)}};
    if (s.attack.tap_fraction)
        attack["tap_fraction"] = *s.attack.tap_fraction;
    json timing = {{"mode", s.timing.mode == TimingMode::Pulse ? "pulse" : "continuous_intervals"}};
    if (s.timing.interval_duration)
        timing["interval_duration"] = *s.timing.interval_duration;
    return json{
        {"seed", config.seed},
        {"session_length", config.session_length},
        {"calibration_factor", s.detection.calibration_factor},
        {"source",
         {{"kind", to_string(s.source.kind)},
          {"mean_photons_per_mode", s.source.mean_photons_per_mode},
          {"correlation_db", s.source.correlation_db}}},
        {"encoding", {{"attenuation_fraction", s.encoding.attenuation_fraction}}},
        {"detection", {{"quantum_efficiency", s.detection.quantum_efficiency}}},
        {"policy", {{"threshold", s.policy.threshold}}},
        {"attack", attack},
        {"timing", timing},
    };
}

// ---------------------------------------------------------------------------
// Sample files

namespace {

constexpr std::string_view kSampleMagic = "# twinbeam-samples v";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

std::string format_sample_header(const SampleHeader& header) {
    std::ostringstream os;
    os << kSampleMagic << header.version << "; source=" << to_string(header.source)
       << "; basis=" << (header.basis_match ? "match" : "mismatch") << "; key=" << header.key;
    return os.str();
}

SampleHeader parse_sample_header(const std::string& raw) {
    const std::string_view line = trim(raw);
    if (!line.starts_with(kSampleMagic))
        throw DataError(1, "missing '# twinbeam-samples v<N>' header");

    SampleHeader h;
    std::string_view rest = line.substr(kSampleMagic.size());
    const auto semi = rest.find(';');
    const std::string_view version = trim(rest.substr(0, semi));
    if (version != "1")
        throw DataError(1, "unsupported sample file version '" + std::string(version) + "'");
    if (semi == std::string_view::npos)
        throw DataError(1, "header lacks condition labels");
    rest = rest.substr(semi + 1);

    bool has_source = false, has_basis = false, has_key = false;
    while (!rest.empty()) {
        const auto next = rest.find(';');
        const std::string_view item = trim(rest.substr(0, next));
        rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next + 1);
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw DataError(1, "malformed header label '" + std::string(item) + "'");
        const std::string_view key = trim(item.substr(0, eq));
        const std::string_view value = trim(item.substr(eq + 1));
        if (key == "source") {
            if (value == "twin_beam")
                h.source = SourceKind::TwinBeam;
            else if (value == "coherent")
                h.source = SourceKind::Coherent;
            else
                throw DataError(1, "unknown source '" + std::string(value) + "'");
            has_source = true;
        } else if (key == "basis") {
            if (value != "match" && value != "mismatch")
                throw DataError(1, "basis must be match or mismatch");
            h.basis_match = value == "match";
            has_basis = true;
        } else if (key == "key") {
            if (value != "0" && value != "1")
                throw DataError(1, "key must be 0 or 1");
            h.key = value == "1" ? 1 : 0;
            has_key = true;
        } else {
            throw DataError(1, "unknown header label '" + std::string(key) + "'");
        }
    }
    if (!has_source || !has_basis || !has_key)
        throw DataError(1, "header must label source, basis and key");
    return h;
}

SampleFile read_sample_file(std::istream& in) {
    SampleFile file;
    std::string line;
    if (!std::getline(in, line))
        throw DataError(1, "empty sample file");
    file.header = parse_sample_header(line);

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = trim(line);
        if (row.empty())
            continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos)
            throw DataError(lineno, "expected 'index,n_sample'");
        const std::string_view idx_text = trim(row.substr(0, comma));
        const std::string_view val_text = trim(row.substr(comma + 1));

        SampleRow r;
        const auto [iptr, iec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), r.index);
        if (iec != std::errc{} || iptr != idx_text.data() + idx_text.size())
            throw DataError(lineno, "invalid index '" + std::string(idx_text) + "'");
        const auto [vptr, vec] = std::from_chars(val_text.data(), val_text.data() + val_text.size(), r.n_sample);
        if (vec != std::errc{} || vptr != val_text.data() + val_text.size() || !std::isfinite(r.n_sample))
            throw DataError(lineno, "invalid n_sample '" + std::string(val_text) + "'");
        if (!file.rows.empty() && r.index <= file.rows.back().index)
            throw DataError(lineno, "indices must be strictly increasing");
        file.rows.push_back(r);
    }
    return file;
}

SampleFile read_sample_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError(0, "cannot open " + path.string());
    return read_sample_file(in);
}

void write_sample_file(std::ostream& out, const SampleFile& file) {
    out << format_sample_header(file.header) << '\n';
    char buf[64];
    for (const auto& row : file.rows) {
        std::snprintf(buf, sizeof buf, "%.17g", row.n_sample);
        out << row.index << ',' << buf << '\n';
    }
}

void write_sample_file(const std::filesystem::path& path, const SampleFile& file) {
    std::ofstream out(path);
    if (!out)
        throw DataError(0, "cannot write " + path.string());
    write_sample_file(out, file);
}

// ---------------------------------------------------------------------------
// Report sections

json to_json(const Histogram& hist) {
    return json{
        {"bins", hist.bins()},
        {"bin_width", hist.bin_width},
        {"lo", hist.bin_edges.front()},
        {"hi", hist.bin_edges.back()},
        {"total_samples", hist.total_samples},
        {"underflow", hist.underflow},
        {"overflow", hist.overflow},
        {"edges", hist.bin_edges},
        {"counts", hist.counts},
        {"frequencies", hist.frequencies()},
    };
}

json summarize_samples(const LabeledSamples& data, const DecisionPolicy& policy, std::size_t bins) {
    SiftedKey key;
    key.positions = data.indices;
    key.alice_bits = data.keys;
    key.bob_decisions.reserve(data.samples.size());
    for (const double n : data.samples) {
        key.bob_decisions.push_back(decide(n, policy));
        if (key.bob_decisions.back() == Decision::Inconclusive)
            ++key.inconclusive_count;
    }
    const BerEstimate est = estimate_ber(key);
    const FitResult fit = fit_gaussian_mixture(data.samples, bins);
    const GaussianModel fitted{fit.mean_hat, fit.sigma_hat};

    return json{
        {"counts",
         {{"samples", est.sifted},
          {"conclusive", est.conclusive},
          {"inconclusive", key.inconclusive_count},
          {"errors", est.errors}}},
        {"empirical",
         {{"ber", est.ber},
          {"postselection_rate", est.postselection_rate},
          {"ber_wilson95", {est.wilson_interval.first, est.wilson_interval.second}}}},
        {"fit",
         {{"mean_hat", fit.mean_hat},
          {"sigma_hat", fit.sigma_hat},
          {"scale_coefficient", fit.scale_coefficient},
          {"residual", fit.residual},
          {"postselection_efficiency", postselection_efficiency(policy, fitted)},
          {"ber", ber(policy, fitted)}}},
        {"histogram", to_json(build_histogram(data.samples, bins))},
    };
}

json to_json(const SweepTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"threshold", r.threshold},
                        {"mean_diff", r.mean_diff},
                        {"sigma", r.sigma},
                        {"postselection_efficiency", r.efficiency},
                        {"ber", r.ber},
                        {"pareto", r.pareto}});
    }
    return rows;
}

json to_json(const std::vector<Table1Row>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"source", to_string(r.source)},
                       {"basis", r.basis_match ? "match" : "mismatch"},
                       {"key", r.key},
                       {"mean", r.mean},
                       {"sigma", r.sigma},
                       {"samples", r.samples}});
    }
    return out;
}

} // namespace twinbeam
