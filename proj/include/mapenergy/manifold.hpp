#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mapenergy/errors.hpp"
#include "mapenergy/tensor.hpp"

namespace mapenergy {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool periodic = false;
};

/// Quadrature rule attached to a chart coordinate.
enum class CoordRule {
    PeriodicTrapezoid,  // uniform nodes, spectrally accurate for periodic integrands
    GaussCos,           // Gauss-Legendre in cos(coordinate); used for the sphere polar angle
    Gauss,              // plain Gauss-Legendre on [lo, hi]
};

/// Single-chart Riemannian manifold. Immutable after construction; all
/// providers are pure functions of the chart point, so values are safe to
/// share across threads.
struct ChartManifold {
    std::string name;
    int dim = 0;
    std::vector<Interval> chart_box;
    std::vector<CoordRule> quad_rules;
    double interior_margin = 0.0;
    double ball_radius = 0.0;  // >0: coordinate slice restricted to the guarded ball
    int ball_offset = 0;       // first coordinate of the ball-constrained slice
    int ball_dim = 0;          // slice length; 0 with ball_radius > 0 means all coordinates
    bool compact = false;
    bool hadamard = false;

    std::function<Mat(const Vec&)> metric;                    // required: g_ij
    std::function<Tensor3(const Vec&)> metric_partials;       // optional: (k,i,j) = d_k g_ij
    std::function<Tensor3(const Vec&)> christoffel_closed;    // optional: (k,i,j) = Gamma^k_ij
    std::function<Tensor4(const Vec&)> riemann_closed;        // optional: (l,i,j,k) = R^l_ijk
};

/// Wraps periodic coordinates into [lo, hi).
Vec wrap_point(const ChartManifold& M, Vec p);

/// True if the (wrapped) point respects the guard band of every coordinate
/// and the ball constraint, if any.
bool in_guarded_interior(const ChartManifold& M, const Vec& p);

/// Throws OutOfChart if p violates the guard band.
void require_in_chart(const ChartManifold& M, const Vec& p);

/// g(p); throws DegenerateMetric if not positive definite.
Mat metric_at(const ChartManifold& M, const Vec& p);

/// d_k g_ij at p; closed form when provided, central differences otherwise.
Tensor3 metric_partials_at(const ChartManifold& M, const Vec& p);

/// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
Tensor3 christoffel_at(const ChartManifold& M, const Vec& p);

/// R^l_ijk with R(X,Y)Z = nab_X nab_Y Z - nab_Y nab_X Z - nab_[X,Y] Z;
/// conventions fixed so the unit round sphere has sectional curvature +1.
Tensor4 riemann_at(const ChartManifold& M, const Vec& p);

/// Ric_jk = R^i_ijk.
Mat ricci_at(const ChartManifold& M, const Vec& p);

/// <R(u,v)v,u> / (|u|^2 |v|^2 - <u,v>^2); throws DegeneratePlane when the
/// g-Gram determinant of (u,v) is below tol.
double sectional_at(const ChartManifold& M, const Vec& p, const Vec& u, const Vec& v,
                    double tol = 1e-12);

/// Smallest eigenvalue of the pencil (Ric(p), g(p)) = min over unit X of Ric(X,X).
double ricci_quadratic_min_at(const ChartManifold& M, const Vec& p);

/// Catalog: "torus<n>", "sphere2:r=<float>", "euclid<m>", "poincare<m>",
/// "product(<a>,<b>)". Throws UnknownManifold.
ChartManifold make_manifold(const std::string& spec);

std::vector<std::string> manifold_catalog_names();

} // namespace mapenergy
