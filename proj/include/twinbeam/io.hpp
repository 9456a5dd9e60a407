#pragma once

#include "twinbeam/analysis.hpp"
#include "twinbeam/channel.hpp"
#include "twinbeam/protocol.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace twinbeam {

/// Fully resolved simulation run. Field names are documented in
/// docs/formats.md in the repository root.
struct RunConfig {
    std::uint64_t seed = 20040101;
    std::size_t session_length = 100000;
    SessionConfig session;

    void validate() const;
};

/// Parses a config document. Missing optional fields take defaults;
/// unknown keys and invalid values throw ConfigError naming the key path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

struct SampleHeader {
    int version = 1;
    SourceKind source = SourceKind::TwinBeam;
    bool basis_match = true;
    int key = 1;
};

struct SampleRow {
    std::size_t index = 0;
    double n_sample = 0.0;
};

struct SampleFile {
    SampleHeader header;
    std::vector<SampleRow> rows;
};

/// `# twinbeam-samples v1; source=<kind>; basis=<match|mismatch>; key=<0|1>`
std::string format_sample_header(const SampleHeader& header);
SampleHeader parse_sample_header(const std::string& line);

/// Throws DataError with the 1-based line number on malformed input.
SampleFile read_sample_file(std::istream& in);
SampleFile read_sample_file(const std::filesystem::path& path);
void write_sample_file(std::ostream& out, const SampleFile& file);
void write_sample_file(const std::filesystem::path& path, const SampleFile& file);

/// Samples of one sifted ensemble in index order, each tagged with
/// Alice's bit.
struct LabeledSamples {
    std::vector<std::size_t> indices;
    std::vector<double> samples;
    std::vector<int> keys;
};

/// Decision counts, empirical BER, mixture fit and histogram of an
/// ensemble. Shared by simulation and replay reports so that a replay of
/// dumped samples yields identical sections.
nlohmann::json summarize_samples(const LabeledSamples& data, const DecisionPolicy& policy, std::size_t bins);

nlohmann::json to_json(const Histogram& hist);
nlohmann::json to_json(const SweepTable& table);
nlohmann::json to_json(const std::vector<Table1Row>& rows);

} // namespace twinbeam
