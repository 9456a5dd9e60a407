#include "temp_dir.hpp"

#include "twinbeam/commands.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/io.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace twinbeam;
using nlohmann::json;

namespace {

const std::filesystem::path kConfigs = TWINBEAM_CONFIG_DIR;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

std::string config_error_field(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("config parsing") {
    SUBCASE("reference defaults") {
        const auto cfg = load_config(kConfigs / "twin_beam.json");
        CHECK(cfg.seed == 20040101);
        CHECK(cfg.session_length == 100000);
        CHECK(cfg.session.source.kind == SourceKind::TwinBeam);
        CHECK(cfg.session.source.correlation_db == -5.5);
        CHECK(cfg.session.encoding.mean_diff(cfg.session.source) == doctest::Approx(200.0));
        CHECK(cfg.session.detection.calibration_factor == doctest::Approx(270.0 / std::sqrt(8e4)));
        CHECK(cfg.session.policy.threshold == 20.0);
    }
    SUBCASE("empty document takes defaults with unit calibration") {
        const auto cfg = parse_config(json::object());
        CHECK(cfg.session.detection.calibration_factor == 1.0);
        CHECK(cfg.session.attack.kind == AttackKind::None);
    }
    SUBCASE("coherent defaults to 0 dB") {
        const auto cfg = parse_config(json{{"source", {{"kind", "coherent"}}}});
        CHECK(cfg.session.source.correlation_db == 0.0);
    }
    SUBCASE("round trip through to_json") {
        json doc = json::parse(slurp(kConfigs / "twin_beam.json"));
        doc["attack"] = {{"kind", "beam_splitter_tap"}, {"tap_fraction", 0.25}};
        doc["timing"] = {{"mode", "continuous_intervals"}, {"interval_duration", 1e-5}};
        const auto cfg = parse_config(doc);
        CHECK(to_json(parse_config(to_json(cfg))) == to_json(cfg));
        CHECK(*cfg.session.attack.tap_fraction == 0.25);
    }
    SUBCASE("diagnostics name the offending field") {
        CHECK(config_error_field({{"source", {{"kind", "laser"}}}}) == "source.kind");
        CHECK(config_error_field({{"source", {{"kind", "coherent"}, {"correlation_db", -3}}}}) ==
              "source.correlation_db");
        CHECK(config_error_field({{"encoding", {{"attenuation_fraction", 0.5}}}}) == "encoding.attenuation_fraction");
        CHECK(config_error_field({{"detection", {{"quantum_efficiency", 0}}}}) == "detection.quantum_efficiency");
        CHECK(config_error_field({{"policy", {{"threshold", -1}}}}) == "policy.threshold");
        CHECK(config_error_field({{"policy", {{"threshold", "20"}}}}) == "policy.threshold");
        CHECK(config_error_field({{"attack", {{"kind", "beam_splitter_tap"}}}}) == "attack.tap_fraction");
        CHECK(config_error_field({{"timing", {{"mode", "continuous_intervals"}}}}) == "timing.interval_duration");
        CHECK(config_error_field({{"session_length", 0}}) == "session_length");
        CHECK(config_error_field({{"seed", -4}}) == "seed");
        CHECK(config_error_field({{"calibration_factor", 0}}) == "calibration_factor");
        CHECK(config_error_field({{"sourse", json::object()}}) == "sourse");
    }
}

TEST_CASE("sample header") {
    const SampleHeader h{1, SourceKind::Coherent, false, 0};
    CHECK(format_sample_header(h) == "# twinbeam-samples v1; source=coherent; basis=mismatch; key=0");
    const auto back = parse_sample_header(format_sample_header(h));
    CHECK(back.source == SourceKind::Coherent);
    CHECK(!back.basis_match);
    CHECK(back.key == 0);
    CHECK_THROWS_AS(parse_sample_header("# twinbeam-samples v2; source=coherent; basis=match; key=0"), DataError);
    CHECK_THROWS_AS(parse_sample_header("index,n_sample"), DataError);
    CHECK_THROWS_AS(parse_sample_header("# twinbeam-samples v1; source=coherent; key=0"), DataError);
    CHECK_THROWS_AS(parse_sample_header("# twinbeam-samples v1; source=coherent; basis=match; key=2"), DataError);
}

TEST_CASE("sample file round trip is exact") {
    SampleFile f;
    f.header = {1, SourceKind::TwinBeam, true, 1};
    RandomStream rng(3);
    for (std::size_t i = 0; i < 500; ++i)
        f.rows.push_back({3 * i + 1, 200.0 + 145.0 * rng.normal()});
    std::stringstream ss;
    write_sample_file(ss, f);
    const auto back = read_sample_file(ss);
    REQUIRE(back.rows.size() == f.rows.size());
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
        CHECK(back.rows[i].index == f.rows[i].index);
        CHECK(back.rows[i].n_sample == f.rows[i].n_sample);
    }
}

TEST_CASE("sample file errors name the row") {
    auto row_of = [](const std::string& text) -> std::size_t {
        std::stringstream ss(text);
        try {
            read_sample_file(ss);
        } catch (const DataError& e) {
            return e.row();
        }
        return 999;
    };
    const std::string header = "# twinbeam-samples v1; source=twin_beam; basis=match; key=1\n";
    CHECK(row_of(header + "0,1.5\n1,abc\n") == 3);
    CHECK(row_of(header + "0,1.5\n2,3\n2,4\n") == 4);
    CHECK(row_of(header + "0 1.5\n") == 2);
    CHECK(row_of(header + "-1,1.5\n") == 2);
    CHECK(row_of("") == 1);
    CHECK(row_of(header + "0,1.5\n\n1,2.5\n") == 999);
}

TEST_CASE("grid parsing") {
    CHECK(parse_grid("0:100:10", "g").size() == 11);
    CHECK(parse_grid("100:0:10", "g").front() == 0.0);
    CHECK(parse_grid("20,200", "g") == std::vector<double>{20.0, 200.0});
    CHECK_THROWS_AS(parse_grid("", "g"), ConfigError);
    CHECK_THROWS_AS(parse_grid("0:10", "g"), ConfigError);
    CHECK_THROWS_AS(parse_grid("0:10:0", "g"), ConfigError);
    CHECK_THROWS_AS(parse_grid("a,b", "g"), ConfigError);
}

TEST_CASE("simulate report") {
    testing::TempDir tmp;
    auto doc = json::parse(slurp(kConfigs / "twin_beam.json"));
    doc["session_length"] = 20000;
    const auto cfg_path = write_text(tmp.path() / "cfg.json", doc.dump());

    const Report r = simulate({cfg_path, std::nullopt, std::nullopt, 100, 2});
    const auto& d = r.data;
    CHECK(d["command"] == "simulate");
    CHECK(d["config"]["seed"] == 20040101);
    CHECK(d["config"]["session_length"] == 20000);
    CHECK(d["analytic"]["ber"].get<double>() ==
          doctest::Approx(ber({20.0}, {200.0, 270.0 * std::sqrt(variance_ratio_from_db(-5.5))})));
    CHECK(std::abs(d["analytic"]["ber"].get<double>() - 0.067) < 0.003);
    CHECK(std::abs(d["ensemble"]["empirical"]["ber"].get<double>() - 0.067) < 0.015);
    CHECK(d["ensemble"]["histogram"]["counts"].size() == 100);
    CHECK(d["ensemble"]["histogram"]["edges"].size() == 101);
    CHECK(r.summary.find("ber_empirical") != std::string::npos);

    SUBCASE("seed override changes the sample but not the schema") {
        const Report r2 = simulate({cfg_path, 7u, std::nullopt, 100, 1});
        CHECK(r2.data["config"]["seed"] == 7);
        CHECK(r2.data["ensemble"] != d["ensemble"]);
    }
}

TEST_CASE("command exit codes") {
    testing::TempDir tmp;
    std::ostringstream err;
    auto code = [&](auto&& body) { return run_command(body, err); };

    const auto bad_cfg = write_text(tmp.path() / "bad.json", R"({"policy": {"threshold": -3}})");
    CHECK(code([&] { simulate({bad_cfg}); }) == kExitConfig);
    CHECK(err.str().find("policy.threshold") != std::string::npos);

    const auto not_json = write_text(tmp.path() / "x.json", "{ nope");
    CHECK(code([&] { simulate({not_json}); }) == kExitConfig);

    const auto bad_samples =
        write_text(tmp.path() / "s.csv", "# twinbeam-samples v1; source=twin_beam; basis=match; key=1\n0,1\nz\n");
    CHECK(code([&] { replay({{bad_samples}, 20.0}); }) == kExitData);
    CHECK(err.str().find("row 3") != std::string::npos);

    const auto one_row =
        write_text(tmp.path() / "one.csv", "# twinbeam-samples v1; source=twin_beam; basis=match; key=1\n0,250\n");
    CHECK(code([&] { replay({{one_row}, 20.0}); }) == kExitInsufficient);

    CHECK(code([&] { replay({{one_row}}); }) == kExitConfig);
    CHECK(code([&] { sweep_report({kConfigs / "twin_beam.json", "", "200"}); }) == kExitConfig);
}

TEST_CASE("sweep and table1 reports") {
    SUBCASE("sweep grid") {
        const Report r = sweep_report({kConfigs / "twin_beam.json", "100:0:10", "200", 145.0});
        const auto& rows = r.data["rows"];
        REQUIRE(rows.size() == 11);
        CHECK(rows[0]["threshold"] == 0.0);
        CHECK(rows[0]["postselection_efficiency"].get<double>() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(rows[2]["ber"].get<double>() - 0.067) <= 1e-3);
        for (std::size_t i = 1; i < rows.size(); ++i)
            CHECK(rows[i]["threshold"].get<double>() > rows[i - 1]["threshold"].get<double>());
    }
    SUBCASE("coherent sweep") {
        const Report r = sweep_report({kConfigs / "coherent.json", "20", "200"});
        CHECK(std::abs(r.data["rows"][0]["ber"].get<double>() - 0.217) <= 1e-3);
    }
    SUBCASE("table1") {
        const Report r = table1_report({kConfigs / "coherent.json", std::nullopt, 20000});
        const auto& rows = r.data["rows"];
        REQUIRE(rows.size() == 8);
        for (const auto& row : rows) {
            const double mean = row["mean"].get<double>();
            const double nearest = std::abs(mean) < 100 ? 0.0 : (mean > 0 ? 200.0 : -200.0);
            CHECK(std::abs(mean - nearest) < 10.0);
        }
        CHECK(std::abs(rows[2]["sigma"].get<double>() - rows[6]["sigma"].get<double>()) < 10.0);
    }
}

}
