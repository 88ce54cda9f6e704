#include "mapenergy/energy.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

namespace mapenergy {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::HOLDS: return "HOLDS";
        case Verdict::EQUALITY: return "EQUALITY";
        case Verdict::VIOLATION: return "VIOLATION";
        case Verdict::PRECONDITION_FAILED: return "PRECONDITION_FAILED";
        case Verdict::NOT_PROJECTIVE: return "NOT_PROJECTIVE";
    }
    return "?";
}

namespace {

/// <S,T> for (m,n,n) tensors in the metric induced by gbar (target index)
/// and g-inverse (domain indices).
double bundle_inner(const Tensor3& S, const Tensor3& T, const Mat& ginv, const Mat& gbar) {
    const int m = S.dim0(), n = S.dim1();
    double total = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (gbar(a, b) == 0.0) continue;
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int i2 = 0; i2 < n; ++i2) {
                    if (ginv(i, i2) == 0.0) continue;
                    for (int j = 0; j < n; ++j)
                        for (int j2 = 0; j2 < n; ++j2)
                            s += ginv(i, i2) * ginv(j, j2) * S(a, i, j) * T(b, i2, j2);
                }
            total += gbar(a, b) * s;
        }
    return total;
}

struct LevelIntegrals {
    double E1 = 0.0, E2 = 0.0, Q = 0.0, sff = 0.0, ric_part = 0.0, sec_part = 0.0;
};

LevelIntegrals integrate_level(const MapBetweenManifolds& f, const QuadratureGrid& grid,
                               const ReportOptions& opt) {
    const size_t N = grid.nodes.size();
    std::vector<double> e(N), t2(N), q(N), s2(N), rp(N), sp(N);
    for (size_t i = 0; i < N; ++i) {
        const PointGeometry pg = point_geometry_at(f, grid.nodes[i], opt.rank_tolerance);
        e[i] = pg.energy_density;
        t2[i] = pg.tension_norm2;
        q[i] = pg.q_scalar;
        s2[i] = pg.sff_norm2;
        rp[i] = pg.q_ric_part;
        sp[i] = pg.q_sec_part;
    }
    LevelIntegrals li;
    li.E1 = integrate(grid, e);
    li.E2 = integrate(grid, t2);
    li.Q = integrate(grid, q);
    li.sff = integrate(grid, s2);
    li.ric_part = integrate(grid, rp);
    li.sec_part = integrate(grid, sp);
    return li;
}

/// Worst sampled target sectional curvature over df-image planes at every
/// node plus seeded random planes at f(node).
double worst_target_sectional(const MapBetweenManifolds& f, const QuadratureGrid& grid,
                              const ReportOptions& opt) {
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int m = f.target.dim;
    double worst = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const Vec& p : grid.nodes) {
        const MapJet j = f.jet(wrap_point(f.domain, p));
        const Vec fv = wrap_point(f.target, j.value);
        const int n = f.domain.dim;
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k) {
                try {
                    worst = std::max(worst, sectional_at(f.target, fv, j.d1.col(i), j.d1.col(k)));
                    any = true;
                } catch (const DegeneratePlane&) {
                }
            }
        for (int r = 0; r < opt.npc_random_planes; ++r) {
            Vec u(m), v(m);
            for (int a = 0; a < m; ++a) {
                u(a) = U(rng);
                v(a) = U(rng);
            }
            try {
                worst = std::max(worst, sectional_at(f.target, fv, u, v));
                any = true;
            } catch (const DegeneratePlane&) {
            }
        }
    }
    return any ? worst : 0.0;
}

} // namespace

EnergyReport energy_report(const MapBetweenManifolds& f, const std::vector<int>& base_resolution,
                           int levels, const ReportOptions& opt) {
    if (!f.domain.compact) throw NonCompactDomain("energy_report requires a compact domain");
    if (levels < 1) throw ConfigError("levels must be >= 1");

    EnergyReport rep;
    rep.resolution = base_resolution;
    rep.levels = levels;

    std::vector<LevelIntegrals> li;
    std::vector<int> res = base_resolution;
    QuadratureGrid base_grid = build_grid(f.domain, base_resolution);
    for (int lvl = 0; lvl < levels; ++lvl) {
        QuadratureGrid grid = (lvl == 0) ? base_grid : build_grid(f.domain, res);
        grid.level = lvl;
        li.push_back(integrate_level(f, grid, opt));
        rep.residual_by_level.push_back(li.back().Q + li.back().sff - li.back().E2);
        for (int& r : res) r *= 2;
    }
    const LevelIntegrals& fine = li.back();
    rep.E1 = fine.E1;
    rep.E2 = fine.E2;
    rep.integral_Q = fine.Q;
    rep.integral_sff = fine.sff;
    rep.bochner_residual = rep.residual_by_level.back();

    rep.ric_min = [&] {
        const RicciMinResult r = ricci_min(f.domain, base_resolution);
        return Certified{r.value, r.certificate};
    }();
    // Conservative bound: an overestimated Ric_min could manufacture spurious
    // violations, so the certified minimum is lowered by its refinement delta.
    const double ric_min_used = rep.ric_min.value - rep.ric_min.certificate;
    rep.margin = rep.E2 - ric_min_used * rep.E1;

    if (levels >= 2) {
        const LevelIntegrals& prev = li[levels - 2];
        rep.E1_cert = std::abs(fine.E1 - prev.E1);
        rep.E2_cert = std::abs(fine.E2 - prev.E2);
        rep.residual_cert = std::abs(rep.residual_by_level[levels - 1] -
                                     rep.residual_by_level[levels - 2]);
        rep.margin_cert = std::abs((fine.E2 - ric_min_used * fine.E1) -
                                   (prev.E2 - ric_min_used * prev.E1));
        const double r_prev = std::abs(rep.residual_by_level[levels - 2]);
        const double r_last = std::abs(rep.residual_by_level[levels - 1]);
        if (r_prev > 0.0 && r_last > 0.0) rep.residual_order = std::log2(r_prev / r_last);
    }
    rep.equality_band = 2.0 * std::max(rep.margin_cert, rep.residual_cert) +
                        opt.slack * (1.0 + rep.E1);
    rep.violation_band = rep.margin_cert + rep.residual_cert + opt.slack * (1.0 + rep.E1);

    rep.worst_sec = worst_target_sectional(f, base_grid, opt);
    rep.npc_certified = rep.worst_sec <= opt.npc_tol;

    // Equality decomposition at the finest level (exact bookkeeping against
    // margin + residual by construction).
    rep.equality.term_sec = -fine.sec_part;
    rep.equality.term_ric = fine.ric_part - ric_min_used * fine.E1;
    rep.equality.term_sff = fine.sff;
    rep.equality.sup_sff = totally_geodesic_defect(f, base_grid);
    const RankProfile rp = rank_profile(f, base_grid, opt.rank_tolerance);
    rep.equality.rank_constant = rp.constant;
    rep.equality.rank = rp.rank;
    const double band = rep.equality_band;
    rep.equality.rigid = rep.equality.term_sec <= band && rep.equality.term_ric <= band &&
                         rep.equality.term_sff <= band;
    return rep;
}

Verdict verify_main_inequality(const EnergyReport& report) {
    if (!report.npc_certified) return Verdict::PRECONDITION_FAILED;
    if (report.margin < -report.violation_band) return Verdict::VIOLATION;
    if (std::abs(report.margin) <= report.equality_band) return Verdict::EQUALITY;
    return Verdict::HOLDS;
}

EqualityDiagnostics equality_diagnostics(const MapBetweenManifolds& f, const QuadratureGrid& grid,
                                         const EnergyReport& report, const ReportOptions& opt) {
    EqualityDiagnostics d = report.equality;
    d.sup_sff = totally_geodesic_defect(f, grid);
    const RankProfile rp = rank_profile(f, grid, opt.rank_tolerance);
    d.rank_constant = rp.constant;
    d.rank = rp.rank;
    return d;
}

Vec fit_theta_pointwise(const Mat& d1, const Tensor3& sff, const Mat& g, const Mat& gbar) {
    const int m = static_cast<int>(d1.rows()), n = static_cast<int>(d1.cols());
    const Mat ginv = g.inverse();
    auto basis_tensor = [&](int l) {
        Tensor3 A(m, n, n);
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    A(a, i, j) = (i == l ? d1(a, j) : 0.0) + (j == l ? d1(a, i) : 0.0);
        return A;
    };
    std::vector<Tensor3> basis;
    for (int l = 0; l < n; ++l) basis.push_back(basis_tensor(l));
    Mat N(n, n);
    Vec b(n);
    for (int l = 0; l < n; ++l) {
        b(l) = bundle_inner(basis[l], sff, ginv, gbar);
        for (int l2 = 0; l2 < n; ++l2) N(l, l2) = bundle_inner(basis[l], basis[l2], ginv, gbar);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(N, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-14 * std::max(1.0, es.eigenvalues().maxCoeff()))
        throw RankDeficient("theta unidentifiable: df vanishes (or nearly) at this node");
    return N.ldlt().solve(b);
}

ThetaFit recover_theta(const MapBetweenManifolds& f, const QuadratureGrid& grid,
                       double rank_tolerance) {
    ThetaFit fit;
    fit.theta.reserve(grid.nodes.size());
    for (const Vec& p : grid.nodes) {
        const PointGeometry pg = point_geometry_at(f, p, rank_tolerance);
        const Mat g = metric_at(f.domain, pg.point);
        const Mat gbar = metric_at(f.target, pg.fvalue);
        const MapJet j = f.jet(pg.point);
        try {
            const Vec th = fit_theta_pointwise(j.d1, pg.sff, g, gbar);
            fit.theta.push_back(th);
            // misfit of the fitted decomposition at this node
            const int m = f.target.dim, n = f.domain.dim;
            Tensor3 D = pg.sff;
            for (int a = 0; a < m; ++a)
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < n; ++k)
                        D(a, i, k) -= th(i) * j.d1(a, k) + th(k) * j.d1(a, i);
            fit.residual = std::max(
                fit.residual, std::sqrt(std::max(0.0, bundle_inner(D, D, g.inverse(), gbar))));
        } catch (const RankDeficient&) {
            fit.theta.push_back(Vec());
            ++fit.skipped;
        }
    }
    return fit;
}

ProjectiveReport projective_check(const MapBetweenManifolds& f,
                                  const std::vector<int>& base_resolution, int levels,
                                  const OneFormField& theta, const ReportOptions& opt,
                                  double projective_tolerance) {
    ProjectiveReport pr;
    pr.base = energy_report(f, base_resolution, levels, opt);

    // Pointwise residuals of (5.1) and of tau_1 = 2 df(theta^sharp) at the
    // base grid, plus the integral in (5.2) with refinement.
    const QuadratureGrid grid = build_grid(f.domain, base_resolution);
    const int m = f.target.dim, n = f.domain.dim;
    for (const Vec& p : grid.nodes) {
        const PointGeometry pg = point_geometry_at(f, p, opt.rank_tolerance);
        const MapJet j = f.jet(pg.point);
        const Mat g = metric_at(f.domain, pg.point);
        const Mat ginv = g.inverse();
        const Mat gbar = metric_at(f.target, pg.fvalue);
        const Vec th = theta(pg.point);
        Tensor3 D = pg.sff;
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    D(a, i, k) -= th(i) * j.d1(a, k) + th(k) * j.d1(a, i);
        pr.res_decomposition =
            std::max(pr.res_decomposition, std::sqrt(std::max(0.0, bundle_inner(D, D, ginv, gbar))));
        const Vec xi = ginv * th;
        const Vec dtau = pg.tension - 2.0 * (j.d1 * xi);
        pr.res_tension = std::max(pr.res_tension, std::sqrt(dtau.dot(gbar * dtau)));
    }

    const RefineResult rhs = refine_and_estimate(
        f.domain,
        [&](const Vec& p) {
            const PointGeometry pg = point_geometry_at(f, p, opt.rank_tolerance);
            const Mat ginv = metric_at(f.domain, pg.point).inverse();
            const Vec th = theta(pg.point);
            const double th2 = th.dot(ginv * th);
            return pg.q_scalar + 2.0 * th2 * pg.energy_density;
        },
        base_resolution, levels);
    pr.res_identity = std::abs(pr.base.E2 - 2.0 * rhs.value);

    pr.projective = pr.res_decomposition <= projective_tolerance;
    if (!pr.projective) {
        pr.verdict = Verdict::NOT_PROJECTIVE;
        return pr;
    }
    const double ric_min_used = pr.base.ric_min.value - pr.base.ric_min.certificate;
    pr.margin2 = pr.base.E2 - 2.0 * ric_min_used * pr.base.E1;
    pr.margin2_cert = pr.base.margin_cert;  // same refinement delta structure
    if (!pr.base.npc_certified) {
        pr.verdict = Verdict::PRECONDITION_FAILED;
    } else if (pr.margin2 < -(pr.base.violation_band)) {
        pr.verdict = Verdict::VIOLATION;
    } else if (std::abs(pr.margin2) <= pr.base.equality_band) {
        pr.verdict = Verdict::EQUALITY;
    } else {
        pr.verdict = Verdict::HOLDS;
    }
    return pr;
}

} // namespace mapenergy
