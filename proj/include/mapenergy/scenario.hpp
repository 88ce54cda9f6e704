#pragma once

#include <optional>

#include "mapenergy/report_io.hpp"

namespace mapenergy {

struct FlowSpec {
    FlowMode mode = FlowMode::Harmonic;
    int grid0 = 64, grid1 = 64;
    int fd_order = 2;
    int pinned_rows = -1;  // -1: grid default
    FlowConfig cfg;
};

struct SweepSpec {
    std::string param;
    std::vector<double> values;
};

/// One verification / flow / sweep job. Parsed from versioned JSON; unknown
/// keys are rejected.
struct Scenario {
    int version = 1;
    std::string name;
    std::string mode;  // verify | flow | sweep | projective
    std::string domain_spec, target_spec, map_spec;
    std::vector<int> resolution;  // empty: per-domain default
    int levels = 3;
    std::uint64_t seed = 1;
    ReportOptions opts;
    double projective_tolerance = 1e-6;
    std::string theta = "zero";  // projective mode: "zero" | "recover" | "constant:t1=..,t2=.."
    std::optional<FlowSpec> flow;
    std::optional<SweepSpec> sweep;
};

Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOverrides {
    std::string out_dir;  // highest precedence; then MAPENERGY_OUT; then ./out
    int resolution = 0;   // 0: keep scenario value
    int levels = 0;
    std::optional<std::uint64_t> seed;
    std::string sweep_param;
    std::vector<double> sweep_values;
    bool quiet = false;  // suppress the one-line verdict (used by test harnesses)
};

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitViolation = 3;
constexpr int kExitConfig = 4;

/// Runs a parsed scenario, writes artifacts under <out>/<scenario name>/ and
/// prints a one-line verdict. Returns the process exit code.
int run_scenario(const Scenario& sc, const RunOverrides& ov = {});
int run_scenario_file(const std::filesystem::path& path, const RunOverrides& ov = {});

} // namespace mapenergy
