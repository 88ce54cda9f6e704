#include "mapenergy/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace mapenergy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs_coord(const Vec& p) {
    double m = 0.0;
    for (int i = 0; i < p.size(); ++i) m = std::max(m, std::abs(p(i)));
    return m;
}

} // namespace

Vec wrap_point(const ChartManifold& M, Vec p) {
    for (int i = 0; i < M.dim; ++i) {
        const Interval& iv = M.chart_box[i];
        if (!iv.periodic) continue;
        const double span = iv.hi - iv.lo;
        double x = std::fmod(p(i) - iv.lo, span);
        if (x < 0) x += span;
        p(i) = iv.lo + x;
    }
    return p;
}

bool in_guarded_interior(const ChartManifold& M, const Vec& p) {
    if (p.size() != M.dim) return false;
    for (int i = 0; i < M.dim; ++i) {
        const Interval& iv = M.chart_box[i];
        if (iv.periodic) continue;
        if (p(i) < iv.lo + M.interior_margin || p(i) > iv.hi - M.interior_margin)
            return false;
    }
    if (M.ball_radius > 0.0) {
        const int len = M.ball_dim > 0 ? M.ball_dim : M.dim;
        if (p.segment(M.ball_offset, len).norm() > M.ball_radius - M.interior_margin)
            return false;
    }
    return true;
}

void require_in_chart(const ChartManifold& M, const Vec& p) {
    if (!in_guarded_interior(M, p))
        throw OutOfChart("point outside guarded chart interior of " + M.name);
}

Mat metric_at(const ChartManifold& M, const Vec& p0) {
    const Vec p = wrap_point(M, p0);
    require_in_chart(M, p);
    Mat g = M.metric(p);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw DegenerateMetric("metric not positive definite on " + M.name);
    return g;
}

Tensor3 metric_partials_at(const ChartManifold& M, const Vec& p0) {
    const Vec p = wrap_point(M, p0);
    require_in_chart(M, p);
    if (M.metric_partials) return M.metric_partials(p);
    const int n = M.dim;
    const double h = 1e-5 * std::max(1.0, max_abs_coord(p));
    Tensor3 dg(n, n, n);
    for (int k = 0; k < n; ++k) {
        Vec pp = p, pm = p;
        pp(k) += h;
        pm(k) -= h;
        Mat gp = M.metric(pp), gm = M.metric(pm);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dg(k, i, j) = (gp(i, j) - gm(i, j)) / (2.0 * h);
    }
    return dg;
}

Tensor3 christoffel_at(const ChartManifold& M, const Vec& p0) {
    const Vec p = wrap_point(M, p0);
    require_in_chart(M, p);
    if (M.christoffel_closed) return M.christoffel_closed(p);
    const int n = M.dim;
    const Mat ginv = metric_at(M, p).inverse();
    const Tensor3 dg = metric_partials_at(M, p);
    Tensor3 G(n, n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                G(k, i, j) = 0.5 * s;
            }
    return G;
}

Tensor4 riemann_at(const ChartManifold& M, const Vec& p0) {
    const Vec p = wrap_point(M, p0);
    require_in_chart(M, p);
    if (M.riemann_closed) return M.riemann_closed(p);
    const int n = M.dim;
    // dG(i, l, j, k) = d_i Gamma^l_jk by central differences.
    const double h = 1e-4 * std::max(1.0, max_abs_coord(p));
    std::vector<Tensor3> dG(n);
    for (int i = 0; i < n; ++i) {
        Vec pp = p, pm = p;
        pp(i) += h;
        pm(i) -= h;
        const Tensor3 Gp = christoffel_at(M, wrap_point(M, pp));
        const Tensor3 Gm = christoffel_at(M, wrap_point(M, pm));
        Tensor3 d(n, n, n);
        for (int l = 0; l < n; ++l)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) d(l, j, k) = (Gp(l, j, k) - Gm(l, j, k)) / (2.0 * h);
        dG[i] = d;
    }
    const Tensor3 G = christoffel_at(M, p);
    Tensor4 R(n, n, n, n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = dG[i](l, j, k) - dG[j](l, i, k);
                    for (int m = 0; m < n; ++m)
                        s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
                    R(l, i, j, k) = s;
                }
    return R;
}

Mat ricci_at(const ChartManifold& M, const Vec& p) {
    const int n = M.dim;
    const Tensor4 R = riemann_at(M, p);
    Mat ric = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += R(i, i, j, k);
            ric(j, k) = s;
        }
    return ric;
}

double sectional_at(const ChartManifold& M, const Vec& p0, const Vec& u, const Vec& v,
                    double tol) {
    const Vec p = wrap_point(M, p0);
    const Mat g = metric_at(M, p);
    const double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
    const double gram = uu * vv - uv * uv;
    if (gram <= tol) throw DegeneratePlane("u,v span a degenerate plane");
    const int n = M.dim;
    const Tensor4 R = riemann_at(M, p);
    // <R(u,v)v, u> = g_lm R^m_ijk u^l u^i v^j v^k  (contract upper index with g u).
    double num = 0.0;
    const Vec gu = g * u;
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    num += gu(m) * R(m, i, j, k) * u(i) * v(j) * v(k);
    return num / gram;
}

double ricci_quadratic_min_at(const ChartManifold& M, const Vec& p) {
    const Mat ric = ricci_at(M, p);
    const Mat g = metric_at(M, p);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(ric, g, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace {

/// R^l_ijk = K (delta^l_i g_jk - delta^l_j g_ik) for constant curvature K.
Tensor4 constant_curvature_riemann(int n, double K, const Mat& g) {
    Tensor4 R(n, n, n, n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    R(l, i, j, k) = K * ((l == i ? g(j, k) : 0.0) - (l == j ? g(i, k) : 0.0));
    return R;
}

ChartManifold make_torus(int n) {
    ChartManifold M;
    M.name = "torus" + std::to_string(n);
    M.dim = n;
    M.chart_box.assign(n, Interval{0.0, kTwoPi, true});
    M.quad_rules.assign(n, CoordRule::PeriodicTrapezoid);
    M.compact = true;
    M.metric = [n](const Vec&) { return Mat::Identity(n, n); };
    M.metric_partials = [n](const Vec&) { return Tensor3(n, n, n); };
    M.christoffel_closed = [n](const Vec&) { return Tensor3(n, n, n); };
    M.riemann_closed = [n](const Vec&) { return Tensor4(n, n, n, n); };
    return M;
}

ChartManifold make_euclid(int m) {
    ChartManifold M;
    M.name = "euclid" + std::to_string(m);
    M.dim = m;
    M.chart_box.assign(m, Interval{-100.0, 100.0, false});
    M.quad_rules.assign(m, CoordRule::Gauss);
    M.compact = false;
    M.hadamard = true;
    M.metric = [m](const Vec&) { return Mat::Identity(m, m); };
    M.metric_partials = [m](const Vec&) { return Tensor3(m, m, m); };
    M.christoffel_closed = [m](const Vec&) { return Tensor3(m, m, m); };
    M.riemann_closed = [m](const Vec&) { return Tensor4(m, m, m, m); };
    return M;
}

ChartManifold make_sphere2(double r) {
    if (r <= 0.0) throw UnknownManifold("sphere radius must be positive");
    ChartManifold M;
    M.name = "sphere2:r=" + std::to_string(r);
    M.dim = 2;
    M.chart_box = {Interval{0.0, std::numbers::pi, false}, Interval{0.0, kTwoPi, true}};
    M.quad_rules = {CoordRule::GaussCos, CoordRule::PeriodicTrapezoid};
    M.interior_margin = 1e-3;  // polar guard band
    M.compact = true;
    const double r2 = r * r;
    M.metric = [r2](const Vec& p) {
        Mat g = Mat::Zero(2, 2);
        const double s = std::sin(p(0));
        g(0, 0) = r2;
        g(1, 1) = r2 * s * s;
        return g;
    };
    M.metric_partials = [r2](const Vec& p) {
        Tensor3 dg(2, 2, 2);
        dg(0, 1, 1) = 2.0 * r2 * std::sin(p(0)) * std::cos(p(0));
        return dg;
    };
    M.christoffel_closed = [](const Vec& p) {
        Tensor3 G(2, 2, 2);
        const double s = std::sin(p(0)), c = std::cos(p(0));
        G(0, 1, 1) = -s * c;       // Gamma^theta_phiphi
        G(1, 0, 1) = c / s;        // Gamma^phi_thetaphi
        G(1, 1, 0) = c / s;
        return G;
    };
    const double K = 1.0 / r2;
    auto metric = M.metric;
    M.riemann_closed = [K, metric](const Vec& p) {
        return constant_curvature_riemann(2, K, metric(p));
    };
    return M;
}

ChartManifold make_poincare(int m) {
    ChartManifold M;
    M.name = "poincare" + std::to_string(m);
    M.dim = m;
    M.chart_box.assign(m, Interval{-1.0, 1.0, false});
    M.quad_rules.assign(m, CoordRule::Gauss);
    M.interior_margin = 1e-3;
    M.ball_radius = 1.0;
    M.compact = false;
    M.hadamard = true;
    M.metric = [m](const Vec& p) {
        const double f = 2.0 / (1.0 - p.squaredNorm());
        return Mat::Identity(m, m) * (f * f);
    };
    M.metric_partials = [m](const Vec& p) {
        // g_ij = e^{2 psi} delta_ij with psi = log(2/(1-|u|^2)).
        const double w = 1.0 - p.squaredNorm();
        const double f2 = 4.0 / (w * w);
        Tensor3 dg(m, m, m);
        for (int k = 0; k < m; ++k) {
            const double dpsik = 2.0 * p(k) / w;
            for (int i = 0; i < m; ++i) dg(k, i, i) = 2.0 * dpsik * f2;
        }
        return dg;
    };
    M.christoffel_closed = [m](const Vec& p) {
        const double w = 1.0 - p.squaredNorm();
        Tensor3 G(m, m, m);
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double s = 0.0;
                    if (k == i) s += 2.0 * p(j) / w;
                    if (k == j) s += 2.0 * p(i) / w;
                    if (i == j) s -= 2.0 * p(k) / w;
                    G(k, i, j) = s;
                }
        return G;
    };
    auto metric = M.metric;
    M.riemann_closed = [m, metric](const Vec& p) {
        return constant_curvature_riemann(m, -1.0, metric(p));
    };
    return M;
}

ChartManifold make_product(const ChartManifold& A, const ChartManifold& B) {
    ChartManifold M;
    M.name = "product(" + A.name + "," + B.name + ")";
    const int na = A.dim, nb = B.dim, n = na + nb;
    M.dim = n;
    M.chart_box = A.chart_box;
    M.chart_box.insert(M.chart_box.end(), B.chart_box.begin(), B.chart_box.end());
    M.quad_rules = A.quad_rules;
    M.quad_rules.insert(M.quad_rules.end(), B.quad_rules.begin(), B.quad_rules.end());
    M.interior_margin = std::max(A.interior_margin, B.interior_margin);
    M.compact = A.compact && B.compact;
    M.hadamard = A.hadamard && B.hadamard;
    if (A.ball_radius > 0.0 && B.ball_radius > 0.0)
        throw UnknownManifold("products of two ball-constrained charts are not supported");
    if (A.ball_radius > 0.0) {
        M.ball_radius = A.ball_radius;
        M.ball_offset = A.ball_offset;
        M.ball_dim = A.ball_dim > 0 ? A.ball_dim : na;
    } else if (B.ball_radius > 0.0) {
        M.ball_radius = B.ball_radius;
        M.ball_offset = na + B.ball_offset;
        M.ball_dim = B.ball_dim > 0 ? B.ball_dim : nb;
    }
    auto split = [na, nb](const Vec& p) {
        return std::pair<Vec, Vec>{p.head(na), p.tail(nb)};
    };
    M.metric = [=](const Vec& p) {
        auto [pa, pb] = split(p);
        Mat g = Mat::Zero(n, n);
        g.topLeftCorner(na, na) = A.metric(pa);
        g.bottomRightCorner(nb, nb) = B.metric(pb);
        return g;
    };
    if (A.metric_partials && B.metric_partials) {
        M.metric_partials = [=](const Vec& p) {
            auto [pa, pb] = split(p);
            const Tensor3 da = A.metric_partials(pa), db = B.metric_partials(pb);
            Tensor3 dg(n, n, n);
            for (int k = 0; k < na; ++k)
                for (int i = 0; i < na; ++i)
                    for (int j = 0; j < na; ++j) dg(k, i, j) = da(k, i, j);
            for (int k = 0; k < nb; ++k)
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) dg(na + k, na + i, na + j) = db(k, i, j);
            return dg;
        };
    }
    if (A.christoffel_closed && B.christoffel_closed) {
        M.christoffel_closed = [=](const Vec& p) {
            auto [pa, pb] = split(p);
            const Tensor3 Ga = A.christoffel_closed(pa), Gb = B.christoffel_closed(pb);
            Tensor3 G(n, n, n);
            for (int k = 0; k < na; ++k)
                for (int i = 0; i < na; ++i)
                    for (int j = 0; j < na; ++j) G(k, i, j) = Ga(k, i, j);
            for (int k = 0; k < nb; ++k)
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) G(na + k, na + i, na + j) = Gb(k, i, j);
            return G;
        };
    }
    if (A.riemann_closed && B.riemann_closed) {
        M.riemann_closed = [=](const Vec& p) {
            auto [pa, pb] = split(p);
            const Tensor4 Ra = A.riemann_closed(pa), Rb = B.riemann_closed(pb);
            Tensor4 R(n, n, n, n);
            for (int l = 0; l < na; ++l)
                for (int i = 0; i < na; ++i)
                    for (int j = 0; j < na; ++j)
                        for (int k = 0; k < na; ++k) R(l, i, j, k) = Ra(l, i, j, k);
            for (int l = 0; l < nb; ++l)
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j)
                        for (int k = 0; k < nb; ++k)
                            R(na + l, na + i, na + j, na + k) = Rb(l, i, j, k);
            return R;
        };
    }
    return M;
}

int parse_dim_suffix(const std::string& spec, const std::string& prefix) {
    const std::string tail = spec.substr(prefix.size());
    try {
        size_t pos = 0;
        const int d = std::stoi(tail, &pos);
        if (pos != tail.size() || d < 1 || d > 6)
            throw UnknownManifold("bad dimension in manifold spec: " + spec);
        return d;
    } catch (const std::invalid_argument&) {
        throw UnknownManifold("bad dimension in manifold spec: " + spec);
    }
}

} // namespace

ChartManifold make_manifold(const std::string& spec) {
    if (spec.rfind("product(", 0) == 0) {
        if (spec.back() != ')') throw UnknownManifold("unbalanced product spec: " + spec);
        const std::string inner = spec.substr(8, spec.size() - 9);
        // split at the top-level comma
        int depth = 0;
        size_t cut = std::string::npos;
        for (size_t i = 0; i < inner.size(); ++i) {
            if (inner[i] == '(') ++depth;
            else if (inner[i] == ')') --depth;
            else if (inner[i] == ',' && depth == 0) { cut = i; break; }
        }
        if (cut == std::string::npos) throw UnknownManifold("product needs two factors: " + spec);
        return make_product(make_manifold(inner.substr(0, cut)),
                            make_manifold(inner.substr(cut + 1)));
    }
    if (spec.rfind("torus", 0) == 0) return make_torus(parse_dim_suffix(spec, "torus"));
    if (spec.rfind("euclid", 0) == 0) return make_euclid(parse_dim_suffix(spec, "euclid"));
    if (spec.rfind("poincare", 0) == 0) return make_poincare(parse_dim_suffix(spec, "poincare"));
    if (spec.rfind("sphere2", 0) == 0) {
        double r = 1.0;
        if (spec.size() > 7) {
            if (spec.rfind("sphere2:r=", 0) != 0)
                throw UnknownManifold("sphere spec must be sphere2:r=<float>: " + spec);
            try {
                size_t pos = 0;
                r = std::stod(spec.substr(10), &pos);
                if (pos != spec.size() - 10) throw UnknownManifold("bad radius: " + spec);
            } catch (const std::invalid_argument&) {
                throw UnknownManifold("bad radius: " + spec);
            }
        }
        return make_sphere2(r);
    }
    throw UnknownManifold("unknown manifold spec: " + spec);
}

std::vector<std::string> manifold_catalog_names() {
    return {"torus<n>", "sphere2:r=<float>", "euclid<m>", "poincare<m>", "product(<a>,<b>)"};
}

} // namespace mapenergy
