// test_runner.cpp — scenario parsing, builtins, runs, emission and round trips

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "catch_amalgamated.hpp"

#include "cpbqed/runner.hpp"

using namespace cpbqed;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("cpbqed_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// Small, fast scenario exercising every observable.
Scenario small_scenario() {
    Scenario s;
    s.name = "small";
    s.model.gamma = 0.02;
    s.qubit = QubitStateSpec::mixed_with_excited_weight(0.8);
    s.field = FieldStateSpec::coherent_with_mean(1.5);
    s.t_max = 12.0;
    s.samples = 25;
    s.observables = {Observable::inversion, Observable::tangle, Observable::mutual_information,
                     Observable::concurrence, Observable::wigner};
    s.cases = {{"a", 0.0, {}, {}}, {"b", {}, QubitStateSpec::pure(1.0), FieldStateSpec::fock(1)}};
    s.wigner_times = {0.0, 3.5};
    s.wigner_grid = WignerGridRequest{4.0, 21};
    return s;
}

const char* kMinimal = R"({
  "format_version": 1,
  "name": "minimal",
  "qubit": {"kind": "mixed", "theta": 0.0},
  "field": {"kind": "fock", "n": 0},
  "times": {"t_max": 5.0, "samples": 11},
  "observables": ["inversion"]
})";

} // namespace

TEST_CASE("scenario parsing", "[runner]") {
    const Scenario s = parse_scenario_text(kMinimal);
    CHECK(s.name == "minimal");
    CHECK(s.samples == 11);
    CHECK(s.t_max == 5.0);
    CHECK(s.model.omega == 1.0);
    CHECK(s.field.kind == FieldStateSpec::Kind::fock);
    CHECK(s.time_at(10) == 5.0);

    auto j = nlohmann::json::parse(kMinimal);
    j["observables"] = nlohmann::json::array();
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);

    j = nlohmann::json::parse(kMinimal);
    j["model"] = {{"omgea", 1.0}};
    CHECK_THROWS_WITH(parse_scenario(j), ContainsSubstring("omgea"));

    j = nlohmann::json::parse(kMinimal);
    j["format_version"] = 2;
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);

    j = nlohmann::json::parse(kMinimal);
    j["times"]["samples"] = 1;
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);

    j = nlohmann::json::parse(kMinimal);
    j["model"] = {{"photon_order", 5}};
    CHECK_THROWS_AS(parse_scenario(j), UnsupportedOrder);

    j = nlohmann::json::parse(kMinimal);
    j["field"] = {{"kind", "thermal"}, {"mean_photons", 2.0}};
    j["observables"] = {"tangle"};
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);

    j = nlohmann::json::parse(kMinimal);
    j["model"] = {{"device", {{"charging_energy", 1.0}, {"gate_charge", 1.0}, {"josephson", 0.3}}}};
    CHECK_THAT(parse_scenario(j).model.mixing_angle, WithinAbs(pi / 4, 1e-15));

    CHECK_THROWS_AS(parse_scenario_text("{ not json"), ValidationError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ValidationError);
    CHECK_THROWS_AS(load_scenario("/root"), IoError);
}

TEST_CASE("scenario JSON round trip", "[runner]") {
    for (const auto& name : builtin_names()) {
        const Scenario s = builtin_scenario(name);
        const Scenario back = parse_scenario(scenario_to_json(s));
        CHECK(scenario_to_json(back) == scenario_to_json(s));
    }
    const Scenario s = small_scenario();
    CHECK(scenario_to_json(parse_scenario(scenario_to_json(s))) == scenario_to_json(s));
}

TEST_CASE("builtin scenarios carry the figure parameters", "[runner]") {
    for (const char* n : {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig5"})
        CHECK(is_builtin(n));
    CHECK_THROWS_AS(builtin_scenario("fig9"), ValidationError);

    const Scenario a = builtin_scenario("fig2a");
    CHECK(a.model.flux_amplitude == 0.1);
    CHECK(a.model.mixing_angle == pi / 2);
    CHECK(a.model.josephson_energy == 1.0);
    CHECK(a.model.photon_order == 1);
    CHECK(a.model.gamma == 0.0);
    CHECK(a.qubit.theta == 0.0);
    CHECK_THAT(a.field.mean_photons(), WithinAbs(25.0, 1e-12));
    CHECK(a.wants(Observable::inversion));
    CHECK(a.wants(Observable::tangle));
    CHECK(a.t_max == 50.0);
    CHECK(a.samples == 2000);
    CHECK(builtin_scenario("fig2b").qubit.theta == pi / 3);
    CHECK(builtin_scenario("fig2c").model.gamma == 0.001);

    const Scenario f3 = builtin_scenario("fig3a");
    CHECK_THAT(f3.qubit.excited_weight(), WithinAbs(0.9, 1e-12));
    CHECK_THAT(f3.field.mean_photons(), WithinAbs(30.0, 1e-12));
    const auto cases = f3.resolved_cases();
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].model.gamma == 0.0);
    CHECK(cases[1].model.gamma == 0.1);
    CHECK_THAT(builtin_scenario("fig3b").field.mean_photons(), WithinAbs(0.5, 1e-12));
    CHECK(builtin_scenario("fig4b").wants(Observable::concurrence));

    const Scenario f5 = builtin_scenario("fig5");
    const auto c5 = f5.resolved_cases();
    REQUIRE(c5.size() == 2);
    CHECK(c5[0].qubit.theta == pi / 2);
    CHECK(c5[1].qubit.theta == 0.0);
    CHECK(c5[0].field.alpha == cplx{2.1, 0.0});
    CHECK(f5.wigner_times == std::vector<double>{0.0});
}

TEST_CASE("run produces series, grids and invariant summaries", "[runner]") {
    const Scenario s = small_scenario();
    const RunResult r = run_scenario(s);
    REQUIRE(r.cases.size() == 2);
    for (const auto& c : r.cases) {
        CHECK(c.series.size() == 4);
        for (const auto& ts : c.series) CHECK(ts.values.size() == 25);
        CHECK(c.wigner.size() == 2);
        CHECK(c.invariants.samples_checked == 27);
        CHECK(c.invariants.ok());
        CHECK(c.kraus_K_max.has_value());
        CHECK(c.max_mutual_information.has_value());
        CHECK(*c.max_mutual_information <= 2.0 * std::log(2.0) + 1e-9);
    }
    CHECK(*r.find_case("a").kraus_K_max == 0);
    CHECK(r.cases[0].find(Observable::inversion)->values.front() == Catch::Approx(0.6));
    CHECK_FALSE(r.trace_failure());

    // Thread count does not change anything.
    const RunResult r3 = run_scenario(s, {3});
    CHECK(result_json(r3) == result_json(r));
}

TEST_CASE("truncation failures carry scenario context", "[runner]") {
    Scenario s = parse_scenario_text(kMinimal);
    s.field = FieldStateSpec::coherent_with_mean(25.0);
    s.dim = 30;
    CHECK_THROWS_WITH(run_scenario(s), ContainsSubstring("minimal"));
    CHECK_THROWS_AS(run_scenario(s), TruncationError);
}

TEST_CASE("csv emission and determinism", "[runner]") {
    const auto dir = scratch("csv");
    const Scenario s = small_scenario();
    const auto files1 = emit(run_scenario(s), (dir / "one" / "r").string(), OutputFormat::csv);
    const auto files2 = emit(run_scenario(s), (dir / "two" / "r").string(), OutputFormat::csv);
    REQUIRE(files1.size() == 2 * 4 + 2 * 2 + 1);
    REQUIRE(files1.size() == files2.size());
    for (std::size_t i = 0; i < files1.size(); ++i) CHECK(slurp(files1[i]) == slurp(files2[i]));

    const std::string inv = slurp((dir / "one" / "r.a.inversion.csv").string());
    CHECK(inv.rfind("lambda_t,inversion\n0,", 0) == 0);
    const std::string wig = slurp((dir / "one" / "r.b.wigner.t3.5.csv").string());
    CHECK(wig.rfind("x,p,w\n-4,-4,", 0) == 0);

    const auto manifest = nlohmann::json::parse(slurp((dir / "one" / "r.manifest.json").string()));
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["cases"][0]["fock_dim"].get<std::size_t>() == default_basis(s.field).dim());
    CHECK(manifest["cases"][0]["series_order"] == 3);
    CHECK(manifest["cases"][1]["invariants"]["samples_checked"] == 27);
    CHECK(manifest["scenario"]["name"] == "small");
    CHECK(manifest["cases"][0].contains("concurrence"));
}

TEST_CASE("csv values round trip exactly", "[runner]") {
    const auto dir = scratch("csv_round");
    const RunResult r = run_scenario(small_scenario());
    emit(r, (dir / "r").string(), OutputFormat::csv);
    std::ifstream in(dir / "r.a.mutual_information.csv");
    std::string line;
    std::getline(in, line);
    const auto& ts = *r.cases[0].find(Observable::mutual_information);
    for (std::size_t i = 0; std::getline(in, line); ++i) {
        const auto comma = line.find(',');
        CHECK(std::stod(line.substr(0, comma)) == ts.times[i]);
        CHECK(std::stod(line.substr(comma + 1)) == ts.values[i]);
    }
}

TEST_CASE("json emission round trips exactly", "[runner]") {
    const auto dir = scratch("json");
    const RunResult r = run_scenario(small_scenario());
    const auto files = emit(r, (dir / "r").string(), OutputFormat::json);
    REQUIRE(files.size() == 1);
    const auto j = nlohmann::json::parse(slurp(files[0]));
    for (std::size_t c = 0; c < r.cases.size(); ++c) {
        for (const auto& ts : r.cases[c].series) {
            CHECK(j["cases"][c]["series"][ts.label]["lambda_t"].get<std::vector<double>>() == ts.times);
            CHECK(j["cases"][c]["series"][ts.label]["values"].get<std::vector<double>>() == ts.values);
        }
        for (std::size_t k = 0; k < r.cases[c].wigner.size(); ++k) {
            const auto rows = j["cases"][c]["wigner"][k]["values"].get<std::vector<std::vector<double>>>();
            const auto& g = r.cases[c].wigner[k].grid;
            bool same = true;
            for (Index a = 0; a < g.values.rows(); ++a)
                for (Index b = 0; b < g.values.cols(); ++b) same = same && rows[a][b] == g.values(a, b);
            CHECK(same);
        }
        CHECK(j["cases"][c]["invariants"]["max_trace_defect"].get<double>() ==
              r.cases[c].invariants.max_trace_defect);
    }
}

TEST_CASE("fig5 builtin yields two Wigner grids", "[runner]") {
    const RunResult r = run_scenario(builtin_scenario("fig5"));
    REQUIRE(r.cases.size() == 2);
    for (const auto& c : r.cases) {
        REQUIRE(c.wigner.size() == 1);
        CHECK(c.wigner[0].grid.normalization_defect <= 1e-3);
        CHECK(c.wigner[0].negativity < 1e-10);
    }
}

TEST_CASE("format_double is shortest round-trip", "[runner]") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5e-17) == "-2.5e-17");
    const double x = 1.0 / 3.0;
    CHECK(std::stod(format_double(x)) == x);
}
