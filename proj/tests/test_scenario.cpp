#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mapenergy/scenario.hpp"

using namespace mapenergy;

namespace {

Json base_scenario() {
    Json j;
    j["version"] = 1;
    j["name"] = "unit";
    j["mode"] = "verify";
    j["domain"] = "torus2";
    j["target"] = "poincare2";
    j["map"] = "torus_to_disk:amplitude=0.3";
    j["resolution"] = {12, 12};
    j["levels"] = 2;
    return j;
}

std::filesystem::path write_temp(const Json& j, const std::string& stem) {
    const auto path = std::filesystem::temp_directory_path() / (stem + ".json");
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("scenario parsing accepts the documented schema") {
    const Scenario sc = parse_scenario(base_scenario());
    CHECK(sc.name == "unit");
    CHECK(sc.mode == "verify");
    CHECK(sc.resolution == std::vector<int>{12, 12});
    CHECK(sc.levels == 2);
    CHECK(sc.seed == 1);
}

TEST_CASE("unknown keys are rejected at every level") {
    {
        Json j = base_scenario();
        j["tolerance"] = 1e-6;  // typo for "tolerances"
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
    {
        Json j = base_scenario();
        j["tolerances"] = {{"slack", 1e-9}, {"slak", 1e-9}};
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
    {
        Json j = base_scenario();
        j["mode"] = "flow";
        j["flow"] = {{"mode", "harmonic"}, {"grid", 16}, {"dtt", 0.1}};
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
    {
        Json j = base_scenario();
        j["sweep"] = {{"param", "amplitude"}, {"value", Json::array({0.1})}};
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
}

TEST_CASE("schema validation") {
    {
        Json j = base_scenario();
        j["version"] = 2;
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
    {
        Json j = base_scenario();
        j.erase("version");
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
    {
        Json j = base_scenario();
        j["mode"] = "meditate";
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
    {
        Json j = base_scenario();
        j["resolution"] = 1;
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
    {
        Json j = base_scenario();
        j["tolerances"] = {{"slack", -1.0}};
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
    {
        Json j = base_scenario();
        j["mode"] = "flow";  // flow mode without a flow block
        CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    }
}

TEST_CASE("run_scenario writes artifacts and returns verdict-based exit codes") {
    const auto out = std::filesystem::temp_directory_path() / "mapenergy_test_out";
    std::filesystem::remove_all(out);
    RunOverrides ov;
    ov.out_dir = out.string();

    Json j = base_scenario();
    j["name"] = "unit_verify";
    CHECK(run_scenario(parse_scenario(j), ov) == 0);
    CHECK(std::filesystem::exists(out / "unit_verify" / "report.json"));
    CHECK(std::filesystem::exists(out / "unit_verify" / "report.csv"));

    // positively curved target: precondition failure
    Json jp = base_scenario();
    jp["name"] = "unit_precondition";
    jp["target"] = "sphere2:r=1";
    jp["map"] = "torus_to_disk:amplitude=0.3,cx=1.5,cy=3.0";
    CHECK(run_scenario(parse_scenario(jp), ov) == kExitPrecondition);

    // unreadable file and bad config map to exit 4
    CHECK(run_scenario_file("/nonexistent/scenario.json", ov) == kExitConfig);
    Json jbad = base_scenario();
    jbad["mapp"] = "x";
    CHECK(run_scenario_file(write_temp(jbad, "mapenergy_bad_key"), ov) == kExitConfig);
}

TEST_CASE("sweeps produce one row per value and reject empty value lists") {
    const auto out = std::filesystem::temp_directory_path() / "mapenergy_test_out";
    RunOverrides ov;
    ov.out_dir = out.string();

    Json j = base_scenario();
    j["name"] = "unit_sweep";
    j["mode"] = "sweep";
    j["levels"] = 2;
    j["sweep"] = {{"param", "amplitude"}, {"values", Json::array({0.1, 0.2, 0.3})}};
    CHECK(run_scenario(parse_scenario(j), ov) == 0);
    const std::string csv = slurp(out / "unit_sweep" / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
    CHECK(csv.rfind("amplitude,E1,E2,margin,residual,verdict\n", 0) == 0);
    CHECK(std::filesystem::exists(out / "unit_sweep" / "sweep.svg"));

    Json je = base_scenario();
    je["name"] = "unit_sweep_empty";
    je["mode"] = "sweep";
    je["sweep"] = {{"param", "amplitude"}, {"values", Json::array()}};
    CHECK(run_scenario_file(write_temp(je, "mapenergy_empty_sweep"), ov) == kExitConfig);
}

TEST_CASE("repeated runs are byte-identical") {
    const auto out1 = std::filesystem::temp_directory_path() / "mapenergy_det1";
    const auto out2 = std::filesystem::temp_directory_path() / "mapenergy_det2";
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);

    Json j = base_scenario();
    j["name"] = "unit_det";
    j["map"] = "random_trig:seed=3,amplitude=0.3";
    j["target"] = "euclid3";
    j["seed"] = 42;
    const Scenario sc = parse_scenario(j);

    RunOverrides ov1, ov2;
    ov1.out_dir = out1.string();
    ov2.out_dir = out2.string();
    CHECK(run_scenario(sc, ov1) == 0);
    CHECK(run_scenario(sc, ov2) == 0);
    CHECK(slurp(out1 / "unit_det" / "report.json") == slurp(out2 / "unit_det" / "report.json"));
    CHECK(slurp(out1 / "unit_det" / "report.csv") == slurp(out2 / "unit_det" / "report.csv"));
    CHECK(!slurp(out1 / "unit_det" / "report.json").empty());
}

TEST_CASE("MAPENERGY_OUT provides the default output directory") {
    const auto out = std::filesystem::temp_directory_path() / "mapenergy_env_out";
    std::filesystem::remove_all(out);
    setenv("MAPENERGY_OUT", out.c_str(), 1);
    Json j = base_scenario();
    j["name"] = "unit_env";
    j["resolution"] = {8, 8};
    j["levels"] = 1;
    CHECK(run_scenario(parse_scenario(j), RunOverrides{}) == 0);
    unsetenv("MAPENERGY_OUT");
    CHECK(std::filesystem::exists(out / "unit_env" / "report.json"));
}
