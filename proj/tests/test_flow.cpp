#include <doctest.h>

#include <cmath>

#include "mapenergy/flow.hpp"

using namespace mapenergy;

namespace {

MapBetweenManifolds disk_map(const ChartManifold& T, const ChartManifold& H) {
    return make_catalog_map("torus_to_disk:amplitude=0.4", T, H);
}

} // namespace

TEST_CASE("grid tension converges to the analytic tension at order 2") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    const MapBetweenManifolds f = disk_map(T, H);
    double prev = 0.0;
    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        const DiscreteMap dm = sample_discrete_map(f, n, n);
        const std::vector<Vec> tau = tension_field(dm);
        double err = 0.0;
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1) {
                Vec p(2);
                p << dm.coord0[i0], dm.coord1[i1];
                err = std::max(err, (tau[dm.index(i0, i1)] - tension_at(f, p))
                                        .lpNorm<Eigen::Infinity>());
            }
        errs.push_back(err);
        if (prev > 0.0) CHECK(std::log2(prev / err) > 1.9);
        prev = err;
    }
    CHECK(errs.back() < 1e-3);
}

TEST_CASE("fourth-order stencils beat second-order ones on periodic grids") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    const MapBetweenManifolds f = disk_map(T, H);
    const Vec exact = tension_at(f, Vec(Vec::Zero(2)));
    double err2 = 0.0, err4 = 0.0;
    const int n = 32;
    const DiscreteMap d2 = sample_discrete_map(f, n, n, 2);
    const DiscreteMap d4 = sample_discrete_map(f, n, n, 4);
    const std::vector<Vec> t2 = tension_field(d2);
    const std::vector<Vec> t4 = tension_field(d4);
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1) {
            Vec p(2);
            p << d2.coord0[i0], d2.coord1[i1];
            const Vec ref = tension_at(f, p);
            err2 = std::max(err2, (t2[d2.index(i0, i1)] - ref).norm());
            err4 = std::max(err4, (t4[d4.index(i0, i1)] - ref).norm());
        }
    CHECK(err4 < 0.05 * err2);
    (void)exact;
}

TEST_CASE("discrete jets at nodes and the map view") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    const MapBetweenManifolds f = disk_map(T, H);
    const DiscreteMap dm = sample_discrete_map(f, 16, 16);
    const MapBetweenManifolds view = as_map(dm);
    Vec p(2);
    p << dm.coord0[3], dm.coord1[5];
    const MapJet j = view.jet(p);
    CHECK((j.value - f.jet(p).value).norm() < 1e-14);
    CHECK((j.d1 - f.jet(p).d1).norm() < 0.05);

    Vec off(2);
    off << dm.coord0[3] + 0.01, dm.coord1[5];
    CHECK_THROWS_AS(view.jet(off), ConfigError);
}

TEST_CASE("sampling guards") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold S = make_manifold("sphere2:r=1");
    const ChartManifold H = make_manifold("poincare2");
    const ChartManifold E3 = make_manifold("euclid3");
    CHECK_THROWS_AS(
        sample_discrete_map(make_catalog_map("sphere_inclusion", S, E3), 16, 32, 4),
        ConfigError);  // fourth order needs full periodicity
    const DiscreteMap dm =
        sample_discrete_map(make_catalog_map("sphere_band:amplitude=0.3", S, H), 16, 32);
    CHECK(dm.pinned_rows == 1);
    CHECK(!dm.periodic0);
    CHECK(dm.periodic1);
    CHECK_THROWS_AS(bitension_field(dm), ConfigError);  // non-periodic grid
    (void)T;
}

TEST_CASE("heat flow decreases E1 and respects pinned rows") {
    const ChartManifold S = make_manifold("sphere2:r=1");
    const ChartManifold H = make_manifold("poincare2");
    DiscreteMap dm =
        sample_discrete_map(make_catalog_map("sphere_band:amplitude=0.3", S, H), 24, 48, 2, 1);
    const std::vector<Vec> before = dm.values;
    const double e0 = discrete_energies(dm).E1;
    const double h0 = dm.coord0[1] - dm.coord0[0];
    for (int s = 0; s < 20; ++s) heat_flow_step(dm, 0.2 * h0 * h0);
    const double e1 = discrete_energies(dm).E1;
    CHECK(e1 < e0);
    for (int i1 = 0; i1 < dm.n1; ++i1) {
        CHECK((dm.values[dm.index(0, i1)] - before[dm.index(0, i1)]).norm() == 0.0);
        CHECK((dm.values[dm.index(dm.n0 - 1, i1)] - before[dm.index(dm.n0 - 1, i1)]).norm() ==
              0.0);
    }
}

TEST_CASE("biharmonic flow decreases E2") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    DiscreteMap dm = sample_discrete_map(
        make_catalog_map("torus_wave:amplitude=0.02,kx=3,ky=2,cx=0.25,cy=0.1,vx=1,vy=0.6", T, H),
        24, 24);
    const double h = 2.0 * M_PI / 24;
    const double dt = 0.028 * h * h * h * h;
    const double e0 = discrete_energies(dm).E2;
    for (int s = 0; s < 20; ++s) biharmonic_flow_step(dm, dt);
    CHECK(discrete_energies(dm).E2 < e0);
}

TEST_CASE("run_flow terminates on the tension tolerance and samples the margin") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    DiscreteMap dm = sample_discrete_map(
        make_catalog_map("torus_wave:amplitude=0.01,kx=2,ky=1,cx=0.2,cy=0.1,vx=1,vy=0.5", T, H),
        16, 16);
    FlowConfig cfg;
    cfg.tau_tol = 1e-6;
    cfg.max_steps = 50000;
    cfg.sample_every = 50;
    FlowTrace tr = run_flow(dm, FlowMode::Harmonic, cfg);
    CHECK(tr.termination == "tau_tol");
    REQUIRE(!tr.samples.empty());
    // E1 is non-increasing along the accepted trajectory
    for (size_t i = 1; i < tr.samples.size(); ++i)
        CHECK(tr.samples[i].E1 <= tr.samples[i - 1].E1 * (1.0 + 1e-9));
    // flat domain: margin = E2 >= 0 up to the conservative Ricci shift
    for (const FlowSample& s : tr.samples) CHECK(s.margin >= -1e-9);
    const FlowSample& last = tr.samples.back();
    CHECK(last.sup_tau1 <= cfg.tau_tol);
    CHECK(last.E1 < tr.samples.front().E1);
}

TEST_CASE("flow step rejects configurations that escape the target chart") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    DiscreteMap dm = sample_discrete_map(make_catalog_map("torus_to_disk:amplitude=0.7", T, H),
                                         12, 12);
    CHECK_THROWS_AS(heat_flow_step(dm, 50.0), StepRejected);  // absurd step escapes the ball
}
