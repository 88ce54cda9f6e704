#include <iostream>

#include <CLI11.hpp>

#include "mapenergy/scenario.hpp"

using namespace mapenergy;

namespace {

void add_common(CLI::App* cmd, std::string& path, RunOverrides& ov, std::uint64_t& seed,
                bool& seed_set) {
    cmd->add_option("scenario", path, "scenario JSON file")->required();
    cmd->add_option("--out", ov.out_dir, "output directory (overrides MAPENERGY_OUT)");
    cmd->add_option("--resolution", ov.resolution, "override grid resolution per axis");
    cmd->add_option("--levels", ov.levels, "override refinement levels");
    cmd->add_option("--seed", seed, "override random seed")->each([&](const std::string&) {
        seed_set = true;
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy and curvature verification for maps between Riemannian manifolds"};
    app.require_subcommand(1);

    std::string path;
    RunOverrides ov;
    std::uint64_t seed = 0;
    bool seed_set = false;

    CLI::App* verify = app.add_subcommand("verify", "run a verification or projective scenario");
    add_common(verify, path, ov, seed, seed_set);

    CLI::App* flow = app.add_subcommand("flow", "run a gradient-flow scenario");
    add_common(flow, path, ov, seed, seed_set);

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one map parameter over a value list");
    add_common(sweep, path, ov, seed, seed_set);
    sweep->add_option("--param", ov.sweep_param, "map parameter to sweep");
    sweep->add_option("--values", ov.sweep_values, "parameter values")->delimiter(',');

    CLI::App* catalog = app.add_subcommand("catalog", "list built-in manifolds and maps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (catalog->parsed()) {
        std::cout << "manifolds:\n"
                  << "  torus<n>            flat torus, coordinates in [0, 2pi)^n\n"
                  << "  sphere2:r=<float>   round 2-sphere of radius r (polar chart)\n"
                  << "  euclid<m>           Euclidean space R^m\n"
                  << "  poincare<m>         Poincare ball model of hyperbolic m-space\n"
                  << "  product(<a>,<b>)    Riemannian product of two catalog manifolds\n"
                  << "maps:\n";
        for (const std::string& name : map_catalog_names()) std::cout << "  " << name << "\n";
        return 0;
    }

    if (seed_set) ov.seed = seed;
    const int rc = run_scenario_file(path, ov);

    // run_scenario_file validates the scenario mode; the subcommand only needs
    // to match it for flow and sweep, which take extra options.
    (void)verify;
    (void)flow;
    (void)sweep;
    return rc;
}
