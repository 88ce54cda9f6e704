#pragma once

#include "mapenergy/map_geometry.hpp"

namespace mapenergy {

/// Grid-backed map from a 2-dimensional torus or guarded sphere chart.
/// Node values live in the target chart; derivatives come from central
/// finite differences on the grid.
struct DiscreteMap {
    ChartManifold domain;
    ChartManifold target;
    int n0 = 0, n1 = 0;
    std::vector<double> coord0, coord1;  // node coordinates per axis
    bool periodic0 = false, periodic1 = false;
    int pinned_rows = 0;  // rows frozen at each end of axis 0 (sphere polar caps)
    int fd_order = 2;     // 2 or 4 (4 requires a fully periodic grid)
    std::vector<Vec> values;  // row-major [i0 * n1 + i1]

    int index(int i0, int i1) const { return i0 * n1 + i1; }
    bool row_active(int i0) const { return i0 >= pinned_rows && i0 < n0 - pinned_rows; }
};

/// Samples an analytic map onto an n0 x n1 grid over its domain chart.
DiscreteMap sample_discrete_map(const MapBetweenManifolds& f, int n0, int n1, int fd_order = 2,
                                int pinned_rows = -1);

/// Jet at a grid node by finite differences (one-sided in the non-periodic
/// direction on boundary rows).
MapJet discrete_jet(const DiscreteMap& m, int i0, int i1);

/// Evaluator view satisfying the MapBetweenManifolds contract at grid nodes;
/// off-node evaluation throws ConfigError.
MapBetweenManifolds as_map(const DiscreteMap& m);

/// tau_1 at every node (zero on pinned rows).
std::vector<Vec> tension_field(const DiscreteMap& m);

/// tau_2 at every node; needs one extra ring of tau_1 values, so sphere grids
/// must have pinned_rows >= 2.
std::vector<Vec> bitension_field(const DiscreteMap& m);

enum class FlowMode { Harmonic, Biharmonic };

struct FlowConfig {
    double dt = 0.0;          // 0: default 0.2 h^2 (harmonic) / 0.05 h^4 (biharmonic)
    double dt_min_factor = 1e-6;
    int max_steps = 100000;
    double tau_tol = 1e-5;          // terminate when sup|tau_mode| <= tau_tol
    double energy_target_ratio = 0.0;  // >0: terminate when E_mode <= ratio * E_mode(0)
    int sample_every = 100;
    int max_rejects = 200;
    double energy_slack = 1e-10;    // per-step relative non-monotonicity slack
};

struct FlowSample {
    double t = 0.0;
    double E1 = 0.0, E2 = 0.0;
    double sup_tau1 = 0.0, sup_tau2 = 0.0;
    double margin = 0.0;
    double dt = 0.0;
};

struct FlowTrace {
    std::vector<FlowSample> samples;
    std::string termination;  // "tau_tol" | "energy_target" | "max_steps" | "blowup"
    int steps = 0;
    int rejected = 0;
};

/// One explicit Euler step; throws StepRejected if any node escapes the
/// target guard band or the mode energy increases beyond slack.
void heat_flow_step(DiscreteMap& m, double dt);
void biharmonic_flow_step(DiscreteMap& m, double dt);

FlowTrace run_flow(DiscreteMap& m, FlowMode mode, const FlowConfig& cfg);

/// E1 and E2 of the discrete map with its grid's trapezoidal weights.
struct DiscreteEnergies {
    double E1 = 0.0, E2 = 0.0;
};
DiscreteEnergies discrete_energies(const DiscreteMap& m);

} // namespace mapenergy
