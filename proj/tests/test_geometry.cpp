#include <doctest.h>

#include <cmath>
#include <random>

#include "mapenergy/manifold.hpp"

using namespace mapenergy;

namespace {

/// Random point inside the guarded chart (uniform per coordinate).
Vec random_interior_point(const ChartManifold& M, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (;;) {
        Vec p(M.dim);
        for (int i = 0; i < M.dim; ++i) {
            const Interval& iv = M.chart_box[i];
            const double pad = iv.periodic ? 0.0 : 10.0 * M.interior_margin;
            p(i) = iv.lo + pad + U(rng) * (iv.hi - iv.lo - 2.0 * pad);
        }
        if (M.ball_radius > 0.0) {
            const int len = M.ball_dim > 0 ? M.ball_dim : M.dim;
            if (p.segment(M.ball_offset, len).norm() > 0.8 * M.ball_radius) continue;
        }
        if (in_guarded_interior(M, p)) return p;
    }
}

Vec random_vec(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = U(rng);
    return v;
}

Tensor4 lower_riemann(const ChartManifold& M, const Vec& p) {
    const Tensor4 R = riemann_at(M, p);
    const Mat g = metric_at(M, p);
    const int n = M.dim;
    Tensor4 low(n, n, n, n);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) s += g(a, l) * R(l, i, j, k);
                    low(a, i, j, k) = s;
                }
    return low;
}

const std::vector<std::string> kCatalog = {"torus2",    "torus3",   "sphere2:r=1",
                                           "sphere2:r=1.7", "euclid3", "poincare2",
                                           "poincare3", "product(torus2,poincare2)"};

} // namespace

TEST_CASE("constant curvature anchors at random points") {
    std::mt19937_64 rng(42);
    struct Anchor {
        const char* spec;
        double sec;
    };
    for (const Anchor& a : {Anchor{"sphere2:r=1", 1.0}, Anchor{"poincare2", -1.0},
                            Anchor{"poincare3", -1.0}, Anchor{"torus2", 0.0},
                            Anchor{"euclid3", 0.0}, Anchor{"sphere2:r=2", 0.25}}) {
        const ChartManifold M = make_manifold(a.spec);
        for (int t = 0; t < 100; ++t) {
            const Vec p = random_interior_point(M, rng);
            const Vec u = random_vec(M.dim, rng);
            const Vec v = random_vec(M.dim, rng);
            CHECK(sectional_at(M, p, u, v) == doctest::Approx(a.sec).epsilon(1e-8));
        }
    }
}

TEST_CASE("closed-form and finite-difference Christoffel symbols agree") {
    std::mt19937_64 rng(7);
    for (const std::string& spec : kCatalog) {
        ChartManifold M = make_manifold(spec);
        if (!M.christoffel_closed) continue;
        ChartManifold numeric = M;
        numeric.metric_partials = nullptr;
        numeric.christoffel_closed = nullptr;
        numeric.riemann_closed = nullptr;
        for (int t = 0; t < 100; ++t) {
            const Vec p = random_interior_point(M, rng);
            const Tensor3 closed = M.christoffel_closed(p);
            const Tensor3 fd = christoffel_at(numeric, p);
            for (int k = 0; k < M.dim; ++k)
                for (int i = 0; i < M.dim; ++i)
                    for (int j = 0; j < M.dim; ++j)
                        CHECK(closed(k, i, j) == doctest::Approx(fd(k, i, j)).epsilon(1e-6));
        }
    }
}

TEST_CASE("Riemann symmetries and first Bianchi identity") {
    std::mt19937_64 rng(11);
    for (const std::string& spec : kCatalog) {
        const ChartManifold M = make_manifold(spec);
        const int n = M.dim;
        for (int t = 0; t < 25; ++t) {
            const Vec p = random_interior_point(M, rng);
            const Tensor4 R = riemann_at(M, p);
            const Tensor4 low = lower_riemann(M, p);
            for (int l = 0; l < n; ++l)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k) {
                            CHECK(R(l, i, j, k) + R(l, j, i, k) == doctest::Approx(0.0)
                                                                       .epsilon(1e-6));
                            CHECK(R(l, i, j, k) + R(l, j, k, i) + R(l, k, i, j) ==
                                  doctest::Approx(0.0).epsilon(1e-6));
                            CHECK(low(l, i, j, k) + low(k, i, j, l) ==
                                  doctest::Approx(0.0).epsilon(1e-6));
                            CHECK(low(l, i, j, k) == doctest::Approx(low(j, k, l, i))
                                                         .epsilon(1e-6));
                        }
        }
    }
}

TEST_CASE("Ricci of the round sphere and hyperbolic space") {
    std::mt19937_64 rng(3);
    {
        const ChartManifold S = make_manifold("sphere2:r=1");
        const Vec p = random_interior_point(S, rng);
        const Mat ric = ricci_at(S, p);
        const Mat g = metric_at(S, p);
        CHECK((ric - g).norm() < 1e-8 * g.norm());  // Ric = (n-1) K g with K = 1
        CHECK(ricci_quadratic_min_at(S, p) == doctest::Approx(1.0).epsilon(1e-8));
    }
    {
        const ChartManifold H = make_manifold("poincare3");
        const Vec p = random_interior_point(H, rng);
        const Mat ric = ricci_at(H, p);
        const Mat g = metric_at(H, p);
        CHECK((ric + 2.0 * g).norm() < 1e-6 * g.norm());  // Ric = -(n-1) g
        CHECK(ricci_quadratic_min_at(H, p) == doctest::Approx(-2.0).epsilon(1e-6));
    }
    {
        const ChartManifold T = make_manifold("torus3");
        const Vec p = random_interior_point(T, rng);
        CHECK(ricci_at(T, p).norm() < 1e-10);
    }
}

TEST_CASE("product manifold blocks and mixed planes") {
    std::mt19937_64 rng(5);
    const ChartManifold P = make_manifold("product(torus2,poincare2)");
    CHECK(P.dim == 4);
    const Vec p = random_interior_point(P, rng);
    const Mat g = metric_at(P, p);
    CHECK(g.topRightCorner(2, 2).norm() == 0.0);
    CHECK((g.topLeftCorner(2, 2) - Mat::Identity(2, 2)).norm() < 1e-12);

    Vec u = Vec::Zero(4), v = Vec::Zero(4);
    u(0) = 1.0;  // torus factor
    v(2) = 1.0;  // hyperbolic factor
    CHECK(sectional_at(P, p, u, v) == doctest::Approx(0.0).epsilon(1e-8));
    Vec w = Vec::Zero(4), z = Vec::Zero(4);
    w(2) = 1.0;
    z(3) = 1.0;
    CHECK(sectional_at(P, p, w, z) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("chart guards and wrapping") {
    const ChartManifold T = make_manifold("torus2");
    Vec p(2);
    p << 7.0, -1.0;
    const Vec w = wrap_point(T, p);
    CHECK(w(0) == doctest::Approx(7.0 - 2.0 * M_PI));
    CHECK(w(1) == doctest::Approx(2.0 * M_PI - 1.0));

    const ChartManifold S = make_manifold("sphere2:r=1");
    Vec pole(2);
    pole << 1e-5, 0.3;
    CHECK(!in_guarded_interior(S, pole));
    CHECK_THROWS_AS(metric_at(S, pole), OutOfChart);

    const ChartManifold H = make_manifold("poincare2");
    Vec edge(2);
    edge << 0.9999, 0.0;
    CHECK(!in_guarded_interior(H, edge));
}

TEST_CASE("degenerate inputs are rejected") {
    const ChartManifold T = make_manifold("torus2");
    Vec p(2);
    p << 1.0, 2.0;
    Vec u(2), v(2);
    u << 1.0, 2.0;
    v << 2.0, 4.0;  // collinear
    CHECK_THROWS_AS(sectional_at(T, p, u, v), DegeneratePlane);

    ChartManifold bad = T;
    bad.metric = [](const Vec&) {
        Mat g(2, 2);
        g << 1.0, 1.0, 1.0, 1.0;
        return g;
    };
    CHECK_THROWS_AS(metric_at(bad, p), DegenerateMetric);

    CHECK_THROWS_AS(make_manifold("klein_bottle"), UnknownManifold);
    CHECK_THROWS_AS(make_manifold("sphere3:r=1"), UnknownManifold);
}

TEST_CASE("catalog flags") {
    CHECK(make_manifold("torus2").compact);
    CHECK(make_manifold("sphere2:r=1").compact);
    CHECK(!make_manifold("euclid2").compact);
    CHECK(make_manifold("euclid2").hadamard);
    CHECK(make_manifold("poincare2").hadamard);
    CHECK(!make_manifold("sphere2:r=1").hadamard);
}
