#include "mapenergy/map_geometry.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

namespace mapenergy {

namespace {

Vec checked_target_point(const ChartManifold& target, const Vec& value) {
    const Vec fv = wrap_point(target, value);
    if (!in_guarded_interior(target, fv))
        throw TargetChartEscape("map value escapes the guarded target chart of " + target.name);
    return fv;
}

} // namespace

Mat orthonormal_frame(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw DegenerateMetric("Cholesky of metric failed");
    const int n = static_cast<int>(g.rows());
    return llt.matrixL().solve(Mat::Identity(n, n)).transpose();
}

Mat pullback_metric_at(const MapBetweenManifolds& f, const Vec& p0) {
    const Vec p = wrap_point(f.domain, p0);
    require_in_chart(f.domain, p);
    const MapJet j = f.jet(p);
    const Vec fv = checked_target_point(f.target, j.value);
    const Mat gbar = metric_at(f.target, fv);
    return j.d1.transpose() * gbar * j.d1;
}

PullbackSpectrum pullback_spectrum_at(const MapBetweenManifolds& f, const Vec& p,
                                      double rank_tolerance) {
    return point_geometry_at(f, p, rank_tolerance).spectrum;
}

PointGeometry point_geometry_at(const MapBetweenManifolds& f, const Vec& p0,
                                double rank_tolerance) {
    const Vec p = wrap_point(f.domain, p0);
    require_in_chart(f.domain, p);
    const int n = f.domain.dim, m = f.target.dim;

    const MapJet j = f.jet(p);
    PointGeometry pg;
    pg.point = p;
    pg.fvalue = checked_target_point(f.target, j.value);

    const Mat g = metric_at(f.domain, p);
    const Mat ginv = g.inverse();
    const Mat gbar = metric_at(f.target, pg.fvalue);

    pg.pullback = j.d1.transpose() * gbar * j.d1;
    pg.energy_density = (ginv * pg.pullback).trace();

    // Symmetric-definite generalized eigenproblem g* v = lambda g v.
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(pg.pullback, g);
    PullbackSpectrum& sp = pg.spectrum;
    sp.rank_tolerance = rank_tolerance;
    sp.eigenvalues = Vec(n);
    sp.frame = Mat(n, n);
    for (int i = 0; i < n; ++i) {  // descending
        sp.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
        sp.frame.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    const double rank_cut = rank_tolerance * std::max(sp.eigenvalues(0), 1.0);
    sp.rank = 0;
    for (int i = 0; i < n; ++i)
        if (sp.eigenvalues(i) > rank_cut) ++sp.rank;

    const Tensor3 G = christoffel_at(f.domain, p);
    const Tensor3 Gbar = christoffel_at(f.target, pg.fvalue);

    pg.sff = Tensor3(m, n, n);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double s = j.d2(a, i, k);
                for (int l = 0; l < n; ++l) s -= G(l, i, k) * j.d1(a, l);
                for (int b = 0; b < m; ++b)
                    for (int c = 0; c < m; ++c) s += Gbar(a, b, c) * j.d1(b, i) * j.d1(c, k);
                pg.sff(a, i, k) = s;
            }

    pg.tension = Vec::Zero(m);
    for (int a = 0; a < m; ++a) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) s += ginv(i, k) * pg.sff(a, i, k);
        pg.tension(a) = s;
    }
    pg.tension_norm2 = pg.tension.dot(gbar * pg.tension);

    pg.sff_norm2 = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (gbar(a, b) == 0.0) continue;
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int i2 = 0; i2 < n; ++i2)
                    for (int k = 0; k < n; ++k)
                        for (int k2 = 0; k2 < n; ++k2)
                            s += ginv(i, i2) * ginv(k, k2) * pg.sff(a, i, k) * pg.sff(b, i2, k2);
            pg.sff_norm2 += gbar(a, b) * s;
        }

    const Mat ric = ricci_at(f.domain, p);
    pg.q_ric_part = 0.0;
    for (int i = 0; i < n; ++i)
        pg.q_ric_part += sp.eigenvalues(i) * sp.frame.col(i).dot(ric * sp.frame.col(i));

    // Weighted sectional sum over nondegenerate eigenpairs; degenerate pairs
    // carry vanishing weight and are skipped.
    pg.q_sec_part = 0.0;
    for (int i = 0; i < sp.rank; ++i)
        for (int k = i + 1; k < sp.rank; ++k) {
            const Vec ui = j.d1 * sp.frame.col(i);
            const Vec uk = j.d1 * sp.frame.col(k);
            const double w = sp.eigenvalues(i) * sp.eigenvalues(k);
            pg.q_sec_part += 2.0 * w * sectional_at(f.target, pg.fvalue, ui, uk);
        }
    pg.q_scalar = pg.q_ric_part - pg.q_sec_part;
    return pg;
}

double energy_density_at(const MapBetweenManifolds& f, const Vec& p) {
    return point_geometry_at(f, p).energy_density;
}

Tensor3 second_fundamental_form_at(const MapBetweenManifolds& f, const Vec& p) {
    return point_geometry_at(f, p).sff;
}

Vec tension_at(const MapBetweenManifolds& f, const Vec& p) {
    return point_geometry_at(f, p).tension;
}

double q_scalar_at(const MapBetweenManifolds& f, const Vec& p, double rank_tolerance) {
    return point_geometry_at(f, p, rank_tolerance).q_scalar;
}

namespace {

Vec stencil_point(const ChartManifold& M, const Vec& p, int coord, double delta) {
    Vec q = p;
    q(coord) += delta;
    q = wrap_point(M, q);
    if (!in_guarded_interior(M, q))
        throw StencilOutOfChart("stencil point leaves the guarded chart of " + M.name);
    return q;
}

} // namespace

Mat pullback_connection_derivative(const MapBetweenManifolds& f, const Vec& p0,
                                   const std::function<Vec(const Vec&)>& sigma, double h) {
    const Vec p = wrap_point(f.domain, p0);
    const int n = f.domain.dim, m = f.target.dim;
    const MapJet j = f.jet(p);
    const Vec fv = checked_target_point(f.target, j.value);
    const Tensor3 Gbar = christoffel_at(f.target, fv);
    const Vec s0 = sigma(p);

    Mat out(m, n);
    for (int i = 0; i < n; ++i) {
        const Vec sp = sigma(stencil_point(f.domain, p, i, +h));
        const Vec sm = sigma(stencil_point(f.domain, p, i, -h));
        for (int a = 0; a < m; ++a) {
            double v = (sp(a) - sm(a)) / (2.0 * h);
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c) v += Gbar(a, b, c) * j.d1(b, i) * s0(c);
            out(a, i) = v;
        }
    }
    return out;
}

Vec bitension_at(const MapBetweenManifolds& f, const Vec& p0, double h) {
    const Vec p = wrap_point(f.domain, p0);
    require_in_chart(f.domain, p);
    const int n = f.domain.dim, m = f.target.dim;

    // Memoized tau_1 field; the nested stencils revisit points.
    std::map<std::vector<double>, Vec> cache;
    auto tau = [&](const Vec& q) -> Vec {
        std::vector<double> key(q.data(), q.data() + q.size());
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        Vec t = tension_at(f, q);
        cache.emplace(std::move(key), t);
        return t;
    };

    const Mat T0 = pullback_connection_derivative(f, p, tau, h);

    const MapJet j = f.jet(p);
    const Vec fv = checked_target_point(f.target, j.value);
    const Mat g = metric_at(f.domain, p);
    const Mat ginv = g.inverse();
    const Tensor3 G = christoffel_at(f.domain, p);
    const Tensor3 Gbar = christoffel_at(f.target, fv);

    Vec rough = Vec::Zero(m);
    for (int i = 0; i < n; ++i) {
        const Mat Tp = pullback_connection_derivative(f, stencil_point(f.domain, p, i, +h), tau, h);
        const Mat Tm = pullback_connection_derivative(f, stencil_point(f.domain, p, i, -h), tau, h);
        for (int k = 0; k < n; ++k) {
            for (int a = 0; a < m; ++a) {
                // (nabla_i nabla_k tau)^a
                double v = (Tp(a, k) - Tm(a, k)) / (2.0 * h);
                for (int b = 0; b < m; ++b)
                    for (int c = 0; c < m; ++c) v += Gbar(a, b, c) * j.d1(b, i) * T0(c, k);
                for (int l = 0; l < n; ++l) v -= G(l, i, k) * T0(a, l);
                rough(a) += ginv(i, k) * v;
            }
        }
    }

    // Curvature term: sum_i Rbar(df u_i, tau) df u_i over a g-orthonormal frame.
    const Vec tau0 = tau(p);
    const Tensor4 Rbar = riemann_at(f.target, fv);
    const Mat frame = orthonormal_frame(g);
    Vec curv = Vec::Zero(m);
    for (int i = 0; i < n; ++i) {
        const Vec X = j.d1 * frame.col(i);
        for (int a = 0; a < m; ++a) {
            double s = 0.0;
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    for (int d = 0; d < m; ++d)
                        s += Rbar(a, b, c, d) * X(b) * tau0(c) * X(d);
            curv(a) += s;
        }
    }
    return rough - curv;
}

RankProfile rank_profile(const MapBetweenManifolds& f, const QuadratureGrid& grid,
                         double rank_tolerance) {
    RankProfile rp;
    rp.ranks.reserve(grid.nodes.size());
    std::map<int, int> counts;
    for (const Vec& p : grid.nodes) {
        const int k = point_geometry_at(f, p, rank_tolerance).spectrum.rank;
        rp.ranks.push_back(k);
        ++counts[k];
    }
    int mode = -1, best = -1;
    for (const auto& [k, c] : counts)
        if (c > best) { best = c; mode = k; }
    rp.constant = counts.size() == 1;
    rp.rank = rp.constant ? mode : -1;
    if (!rp.constant) {
        for (size_t i = 0; i < rp.ranks.size() && rp.witnesses.size() < 8; ++i)
            if (rp.ranks[i] != mode) rp.witnesses.push_back(grid.nodes[i]);
        rp.rank = mode;
    }
    return rp;
}

double totally_geodesic_defect(const MapBetweenManifolds& f, const QuadratureGrid& grid) {
    double sup = 0.0;
    for (const Vec& p : grid.nodes)
        sup = std::max(sup, std::sqrt(std::max(0.0, point_geometry_at(f, p).sff_norm2)));
    return sup;
}

} // namespace mapenergy
