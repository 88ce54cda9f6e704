#include <doctest.h>

#include <cmath>

#include "mapenergy/energy.hpp"

using namespace mapenergy;

namespace {
const double kPi = M_PI;
}

TEST_CASE("sphere inclusion closed forms") {
    const ChartManifold S = make_manifold("sphere2:r=1");
    const ChartManifold E3 = make_manifold("euclid3");
    const MapBetweenManifolds inc = make_catalog_map("sphere_inclusion", S, E3);
    const EnergyReport r = energy_report(inc, {48, 96}, 2);
    CHECK(r.E1 == doctest::Approx(8.0 * kPi).epsilon(1e-6));
    CHECK(r.E2 == doctest::Approx(16.0 * kPi).epsilon(1e-6));
    CHECK(r.integral_Q == doctest::Approx(8.0 * kPi).epsilon(1e-6));
    CHECK(r.integral_sff == doctest::Approx(8.0 * kPi).epsilon(1e-6));
    CHECK(std::abs(r.bochner_residual) < 1e-9);
    CHECK(r.ric_min.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.npc_certified);  // Euclidean target
    CHECK(r.margin == doctest::Approx(8.0 * kPi).epsilon(1e-6));
    CHECK(verify_main_inequality(r) == Verdict::HOLDS);
}

TEST_CASE("flat identity map is the equality case") {
    const ChartManifold T = make_manifold("torus2");
    const MapBetweenManifolds id = make_catalog_map("identity", T, T);
    const EnergyReport r = energy_report(id, {16, 16}, 2);
    CHECK(r.E1 == doctest::Approx(2.0 * 4.0 * kPi * kPi).epsilon(1e-12));
    CHECK(r.E2 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(verify_main_inequality(r) == Verdict::EQUALITY);
    CHECK(r.equality.rigid);
    CHECK(r.equality.rank_constant);
    CHECK(r.equality.rank == 2);
    CHECK(std::abs(r.equality.term_sec) < 1e-12);
    CHECK(std::abs(r.equality.term_ric) < 1e-12);
    CHECK(std::abs(r.equality.term_sff) < 1e-12);
}

TEST_CASE("constant maps are the trivial equality case") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    const MapBetweenManifolds c = make_catalog_map("constant:c1=0.2,c2=-0.1", T, H);
    const EnergyReport r = energy_report(c, {12, 12}, 2);
    CHECK(r.E1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.E2 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(verify_main_inequality(r) == Verdict::EQUALITY);
    CHECK(r.equality.rank == 0);
}

TEST_CASE("linear torus maps: closed-form E1 and equality rigidity") {
    const ChartManifold T = make_manifold("torus2");
    const MapBetweenManifolds f = make_catalog_map("torus_linear:a=2,b=1,c=1,d=1", T, T);
    const EnergyReport r = energy_report(f, {16, 16}, 2);
    CHECK(r.E1 == doctest::Approx((4.0 + 1.0 + 1.0 + 1.0) * 4.0 * kPi * kPi).epsilon(1e-12));
    CHECK(verify_main_inequality(r) == Verdict::EQUALITY);  // totally geodesic, flat
    CHECK(r.equality.sup_sff < 1e-10);
}

TEST_CASE("positively curved targets fail the precondition") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold S = make_manifold("sphere2:r=1");
    const MapBetweenManifolds f =
        make_catalog_map("torus_to_disk:amplitude=0.3,cx=1.5,cy=3.0", T, S);
    const EnergyReport r = energy_report(f, {12, 12}, 2);
    CHECK(!r.npc_certified);
    CHECK(r.worst_sec > 0.0);
    CHECK(verify_main_inequality(r) == Verdict::PRECONDITION_FAILED);
}

TEST_CASE("Bochner residual vanishes spectrally on periodic problems") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    const MapBetweenManifolds f = make_catalog_map("torus_to_disk:amplitude=0.4", T, H);
    const EnergyReport r = energy_report(f, {16, 16}, 3);
    REQUIRE(r.residual_by_level.size() == 3);
    CHECK(std::abs(r.residual_by_level.back()) < 1e-10 * (1.0 + r.E2));
    CHECK(verify_main_inequality(r) == Verdict::HOLDS);
    CHECK(r.margin > 0.0);
    // hyperbolic target: the sectional term contributes with a positive sign
    CHECK(r.equality.term_sec >= 0.0);
    CHECK(r.equality.term_ric >= -1e-10);
    CHECK(r.equality.term_sff >= 0.0);
    const double sum = r.equality.term_sec + r.equality.term_ric + r.equality.term_sff;
    CHECK(sum == doctest::Approx(r.margin + r.bochner_residual).epsilon(1e-8));
}

TEST_CASE("energy scales with target dilation") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold E = make_manifold("euclid2");
    auto scaled = [&](double s) {
        return make_analytic_map(
            T, E,
            [s](const std::vector<Jet2>& p) {
                return std::vector<Jet2>{s * sin(p[0]), s * cos(p[1])};
            },
            "scaled");
    };
    const EnergyReport r1 = energy_report(scaled(1.0), {16, 16}, 1);
    const EnergyReport r2 = energy_report(scaled(2.0), {16, 16}, 1);
    CHECK(r2.E1 == doctest::Approx(4.0 * r1.E1).epsilon(1e-12));
    CHECK(r2.E2 == doctest::Approx(4.0 * r1.E2).epsilon(1e-12));
}

TEST_CASE("report bookkeeping") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold E = make_manifold("euclid3");
    const MapBetweenManifolds f = make_catalog_map("random_trig:seed=5,amplitude=0.3", T, E);
    const EnergyReport r = energy_report(f, {12, 12}, 2);
    CHECK(r.levels == 2);
    CHECK(r.resolution == std::vector<int>{12, 12});
    CHECK(r.equality_band > 0.0);
    CHECK(r.violation_band > 0.0);
    CHECK(r.E1 > 0.0);
    CHECK(r.E1_cert >= 0.0);
    CHECK(std::abs(r.bochner_residual - (r.integral_Q + r.integral_sff - r.E2)) < 1e-12);
}

TEST_CASE("theta recovery on a projective structure") {
    const ChartManifold T = make_manifold("torus2");
    const MapBetweenManifolds lin = make_catalog_map("torus_linear:a=1,b=1,c=0,d=1", T, T);
    const QuadratureGrid grid = build_grid(T, {8, 8});
    const ThetaFit fit = recover_theta(lin, grid);
    CHECK(fit.skipped == 0);
    CHECK(fit.residual < 1e-9);
    for (const Vec& th : fit.theta) CHECK(th.norm() < 1e-9);  // totally geodesic: theta = 0
}

TEST_CASE("projective check: degenerate theta = 0 cases and negative control") {
    const ChartManifold T = make_manifold("torus2");
    const OneFormField zero = [](const Vec&) { return Vec::Zero(2); };
    {
        const MapBetweenManifolds lin = make_catalog_map("torus_linear:a=1,b=1,c=0,d=1", T, T);
        const ProjectiveReport r = projective_check(lin, {12, 12}, 2, zero);
        CHECK(r.projective);
        CHECK(r.res_decomposition < 1e-8);
        CHECK(r.res_tension < 1e-8);
        CHECK(r.res_identity < 1e-8);
        CHECK(r.verdict == Verdict::EQUALITY);  // flat: E2 = 0 = 2 Ric_min E1
        CHECK(std::abs(r.margin2) < 1e-8);
    }
    {
        const ChartManifold E = make_manifold("euclid2");
        const MapBetweenManifolds trig = make_catalog_map("torus_trig:amplitude=0.3", T, E);
        const ProjectiveReport r = projective_check(trig, {12, 12}, 2, zero);
        CHECK(!r.projective);
        CHECK(r.res_decomposition > 1e-3);
        CHECK(r.verdict == Verdict::NOT_PROJECTIVE);
    }
}

TEST_CASE("projective factor-2 inequality is never violated on flat domains") {
    const ChartManifold T = make_manifold("torus2");
    const ChartManifold H = make_manifold("poincare2");
    const OneFormField zero = [](const Vec&) { return Vec::Zero(2); };
    for (const char* spec : {"constant:c1=0.1,c2=0.3", "torus_linear:a=1,b=0,c=0,d=1"}) {
        const MapBetweenManifolds f = make_catalog_map(
            spec, T, std::string(spec).rfind("torus_linear", 0) == 0 ? T : H);
        const ProjectiveReport r = projective_check(f, {12, 12}, 2, zero);
        CHECK(r.verdict != Verdict::VIOLATION);
        CHECK(r.verdict != Verdict::NOT_PROJECTIVE);
    }
}
