#include <doctest.h>

#include <cmath>

#include "mapenergy/quadrature.hpp"

using namespace mapenergy;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    std::vector<double> x, w;
    gauss_legendre(5, x, w);
    REQUIRE(x.size() == 5);
    for (int deg = 0; deg <= 9; ++deg) {
        double s = 0.0;
        for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
        const double exact = (deg % 2 == 0) ? 2.0 / (deg + 1) : 0.0;
        CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("catalog volumes") {
    {
        const QuadratureGrid grid = build_grid(make_manifold("torus2"), {16, 16});
        std::vector<double> one(grid.nodes.size(), 1.0);
        CHECK(integrate(grid, one) == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-12));
    }
    {
        // the guarded polar chart misses two caps of area pi * margin^2 each
        const QuadratureGrid grid = build_grid(make_manifold("sphere2:r=1"), {24, 48});
        std::vector<double> one(grid.nodes.size(), 1.0);
        CHECK(std::abs(integrate(grid, one) - 4.0 * M_PI) < 1e-5);
    }
    {
        const QuadratureGrid grid = build_grid(make_manifold("sphere2:r=2"), {24, 48});
        std::vector<double> one(grid.nodes.size(), 1.0);
        CHECK(std::abs(integrate(grid, one) - 16.0 * M_PI) < 4e-5);
    }
}

TEST_CASE("non-compact domains are rejected") {
    CHECK_THROWS_AS(build_grid(make_manifold("euclid2"), {8, 8}), NonCompactDomain);
    CHECK_THROWS_AS(build_grid(make_manifold("poincare2"), {8, 8}), NonCompactDomain);
    CHECK_THROWS_AS(build_grid(make_manifold("torus2"), {8}), ConfigError);
}

TEST_CASE("non-finite fields are flagged with the node index") {
    const QuadratureGrid grid = build_grid(make_manifold("torus2"), {4, 4});
    std::vector<double> field(grid.nodes.size(), 1.0);
    field[7] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(integrate(grid, field), NonFiniteField);
    try {
        integrate(grid, field);
    } catch (const NonFiniteField& e) {
        CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
}

TEST_CASE("integration is linear") {
    const QuadratureGrid grid = build_grid(make_manifold("torus2"), {12, 12});
    std::vector<double> a(grid.nodes.size()), b(grid.nodes.size()), c(grid.nodes.size());
    for (size_t i = 0; i < grid.nodes.size(); ++i) {
        a[i] = std::sin(grid.nodes[i](0));
        b[i] = std::cos(2.0 * grid.nodes[i](1));
        c[i] = 3.0 * a[i] - 2.0 * b[i];
    }
    CHECK(integrate(grid, c) ==
          doctest::Approx(3.0 * integrate(grid, a) - 2.0 * integrate(grid, b)).epsilon(1e-13));
}

TEST_CASE("refinement certificates on smooth fields") {
    {
        // spectral on the periodic torus: certificate collapses immediately
        const RefineResult r = refine_and_estimate(
            make_manifold("torus2"),
            [](const Vec& p) { return std::exp(std::sin(p(0))) * std::cos(p(1)) + 1.0; }, {16, 16},
            3);
        CHECK(r.values.size() == 3);
        CHECK(r.value == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-10));
        CHECK(r.certificate < 1e-10);
    }
    {
        const RefineResult r = refine_and_estimate(
            make_manifold("sphere2:r=1"), [](const Vec& p) { return std::cos(p(0)) * std::cos(p(0)); },
            {12, 24}, 2);
        CHECK(r.value == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-8));
    }
}

TEST_CASE("ricci_min on constant-curvature catalog manifolds") {
    {
        const RicciMinResult r = ricci_min(make_manifold("sphere2:r=1"), {16, 32});
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(r.certificate == doctest::Approx(0.0).epsilon(1e-10));
    }
    {
        const RicciMinResult r = ricci_min(make_manifold("sphere2:r=2"), {16, 32});
        CHECK(r.value == doctest::Approx(0.25).epsilon(1e-8));
    }
    {
        const RicciMinResult r = ricci_min(make_manifold("torus2"), {8, 8});
        CHECK(r.value == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(r.certificate == doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(ricci_min(make_manifold("euclid2"), {8, 8}), NonCompactDomain);
}
