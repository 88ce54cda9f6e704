#include "mapenergy/flow.hpp"

#include <cmath>
#include <limits>

namespace mapenergy {

namespace {

int wrap_idx(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

const Vec& node_value(const DiscreteMap& m, int i0, int i1) {
    if (m.periodic0) i0 = wrap_idx(i0, m.n0);
    if (m.periodic1) i1 = wrap_idx(i1, m.n1);
    return m.values[m.index(i0, i1)];
}

Vec chart_point(const DiscreteMap& m, int i0, int i1) {
    Vec p(2);
    p << m.coord0[i0], m.coord1[i1];
    return p;
}

/// First derivative along axis `ax` at a node; one-sided second-order at
/// non-periodic boundaries.
Vec d1_axis(const DiscreteMap& m, int i0, int i1, int ax, double h) {
    const int n = (ax == 0) ? m.n0 : m.n1;
    const bool periodic = (ax == 0) ? m.periodic0 : m.periodic1;
    auto F = [&](int s) { return (ax == 0) ? node_value(m, i0 + s, i1) : node_value(m, i0, i1 + s); };
    const int i = (ax == 0) ? i0 : i1;
    if (m.fd_order == 4) return (F(-2) - 8.0 * F(-1) + 8.0 * F(1) - F(2)) / (12.0 * h);
    if (periodic || (i > 0 && i < n - 1)) return (F(1) - F(-1)) / (2.0 * h);
    if (i == 0) return (-3.0 * F(0) + 4.0 * F(1) - F(2)) / (2.0 * h);
    return (3.0 * F(0) - 4.0 * F(-1) + F(-2)) / (2.0 * h);
}

Vec d2_axis(const DiscreteMap& m, int i0, int i1, int ax, double h) {
    const int n = (ax == 0) ? m.n0 : m.n1;
    const bool periodic = (ax == 0) ? m.periodic0 : m.periodic1;
    auto F = [&](int s) { return (ax == 0) ? node_value(m, i0 + s, i1) : node_value(m, i0, i1 + s); };
    const int i = (ax == 0) ? i0 : i1;
    if (m.fd_order == 4)
        return (-F(-2) + 16.0 * F(-1) - 30.0 * F(0) + 16.0 * F(1) - F(2)) / (12.0 * h * h);
    if (periodic || (i > 0 && i < n - 1)) return (F(1) - 2.0 * F(0) + F(-1)) / (h * h);
    if (i == 0) return (2.0 * F(0) - 5.0 * F(1) + 4.0 * F(2) - F(3)) / (h * h);
    return (2.0 * F(0) - 5.0 * F(-1) + 4.0 * F(-2) - F(-3)) / (h * h);
}

Vec d1_cross(const DiscreteMap& m, int i0, int i1, double h0, double h1) {
    if (m.fd_order == 4) {
        static const int off[4] = {-2, -1, 1, 2};
        static const double c[4] = {1.0, -8.0, 8.0, -1.0};
        Vec s = Vec::Zero(m.target.dim);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                s += c[a] * c[b] * node_value(m, i0 + off[a], i1 + off[b]);
        return s / (144.0 * h0 * h1);
    }
    const bool interior0 = m.periodic0 || (i0 > 0 && i0 < m.n0 - 1);
    auto dphi = [&](int s0) {
        return (node_value(m, i0 + s0, i1 + 1) - node_value(m, i0 + s0, i1 - 1)) / (2.0 * h1);
    };
    if (interior0) return (dphi(1) - dphi(-1)) / (2.0 * h0);
    if (i0 == 0) return (-3.0 * dphi(0) + 4.0 * dphi(1) - dphi(2)) / (2.0 * h0);
    return (3.0 * dphi(0) - 4.0 * dphi(-1) + dphi(-2)) / (2.0 * h0);
}

struct NodeGeom {
    Mat ginv;
    Tensor3 gamma;
    Mat frame;      // g-orthonormal columns
    double wdens;   // quadrature weight * sqrt(det g)
};

struct DomainCache {
    std::vector<NodeGeom> nodes;
    double h0 = 0.0, h1 = 0.0;
    double stiffness = 0.0;  // max over active nodes of sum_i g^ii / h_i^2
};

DomainCache build_domain_cache(const DiscreteMap& m) {
    DomainCache dc;
    dc.h0 = m.coord0[1] - m.coord0[0];
    dc.h1 = m.coord1[1] - m.coord1[0];
    dc.nodes.resize(static_cast<size_t>(m.n0) * m.n1);
    for (int i0 = 0; i0 < m.n0; ++i0) {
        // trapezoid end weights on a non-periodic axis
        double w0 = dc.h0;
        if (!m.periodic0 && (i0 == 0 || i0 == m.n0 - 1)) w0 *= 0.5;
        for (int i1 = 0; i1 < m.n1; ++i1) {
            const Vec p = chart_point(m, i0, i1);
            NodeGeom& ng = dc.nodes[m.index(i0, i1)];
            const Mat g = m.domain.metric(p);
            ng.ginv = g.inverse();
            ng.gamma = m.domain.christoffel_closed ? m.domain.christoffel_closed(p)
                                                   : christoffel_at(m.domain, p);
            ng.frame = orthonormal_frame(g);
            double w1 = dc.h1;
            if (!m.periodic1 && (i1 == 0 || i1 == m.n1 - 1)) w1 *= 0.5;
            ng.wdens = w0 * w1 * std::sqrt(g.determinant());
            if (m.row_active(i0)) {
                const double s = ng.ginv(0, 0) / (dc.h0 * dc.h0) + ng.ginv(1, 1) / (dc.h1 * dc.h1);
                dc.stiffness = std::max(dc.stiffness, s);
            }
        }
    }
    return dc;
}

/// One sweep over the grid: tau_1, energy densities and sup norms.
struct FieldPass {
    std::vector<Vec> tau;
    std::vector<Mat> d1;
    std::vector<Tensor3> gbar_gamma;
    std::vector<double> tau_norm2;
    std::vector<double> e_density;
    double E1 = 0.0, E2 = 0.0, sup_tau1 = 0.0;
};

void run_field_pass(const DiscreteMap& m, const DomainCache& dc, FieldPass& fp) {
    const int mdim = m.target.dim;
    const size_t N = dc.nodes.size();
    fp.tau.resize(N);
    fp.d1.resize(N);
    fp.gbar_gamma.resize(N);
    fp.tau_norm2.assign(N, 0.0);
    fp.e_density.assign(N, 0.0);
    fp.E1 = fp.E2 = fp.sup_tau1 = 0.0;
    for (int i0 = 0; i0 < m.n0; ++i0)
        for (int i1 = 0; i1 < m.n1; ++i1) {
            const int id = m.index(i0, i1);
            const NodeGeom& ng = dc.nodes[id];
            const Vec& fv = m.values[id];
            Mat d1(mdim, 2);
            d1.col(0) = d1_axis(m, i0, i1, 0, dc.h0);
            d1.col(1) = d1_axis(m, i0, i1, 1, dc.h1);
            fp.d1[id] = d1;
            const Mat gbar = m.target.metric(fv);
            const Mat gs = d1.transpose() * gbar * d1;
            fp.e_density[id] = (ng.ginv * gs).trace();
            fp.E1 += ng.wdens * fp.e_density[id];
            if (!m.row_active(i0)) {
                fp.tau[id] = Vec::Zero(mdim);
                continue;
            }
            fp.gbar_gamma[id] = m.target.christoffel_closed ? m.target.christoffel_closed(fv)
                                                            : christoffel_at(m.target, fv);
            const Tensor3& Gbar = fp.gbar_gamma[id];
            Mat d2(mdim, 3);  // columns: d2_00, d2_11, d2_01
            d2.col(0) = d2_axis(m, i0, i1, 0, dc.h0);
            d2.col(1) = d2_axis(m, i0, i1, 1, dc.h1);
            d2.col(2) = d1_cross(m, i0, i1, dc.h0, dc.h1);
            Vec tau = Vec::Zero(mdim);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double gij = ng.ginv(i, j);
                    if (gij == 0.0) continue;
                    for (int a = 0; a < mdim; ++a) {
                        double s = (i == j) ? d2(a, i) : d2(a, 2);
                        for (int k = 0; k < 2; ++k) s -= ng.gamma(k, i, j) * d1(a, k);
                        for (int b = 0; b < mdim; ++b)
                            for (int c = 0; c < mdim; ++c)
                                s += Gbar(a, b, c) * d1(b, i) * d1(c, j);
                        tau(a) += gij * s;
                    }
                }
            fp.tau[id] = tau;
            fp.tau_norm2[id] = tau.dot(gbar * tau);
            fp.E2 += ng.wdens * fp.tau_norm2[id];
            fp.sup_tau1 = std::max(fp.sup_tau1, std::sqrt(fp.tau_norm2[id]));
        }
}

/// tau_2 on a fully periodic grid, given the tau_1 field from run_field_pass.
struct BitensionPass {
    std::vector<Mat> nabla_tau;  // (a, j) = (nabla^f_j tau)^a
    std::vector<Vec> tau2;
    double sup_tau2 = 0.0;
};

void run_bitension_pass(const DiscreteMap& m, const DomainCache& dc, const FieldPass& fp,
                        BitensionPass& bp) {
    if (!m.periodic0 || !m.periodic1)
        throw ConfigError("bitension on grid-backed maps requires a fully periodic grid");
    const int mdim = m.target.dim;
    const size_t N = dc.nodes.size();
    bp.nabla_tau.resize(N);
    bp.tau2.resize(N);
    bp.sup_tau2 = 0.0;

    auto tau_at = [&](int i0, int i1) -> const Vec& {
        return fp.tau[m.index(wrap_idx(i0, m.n0), wrap_idx(i1, m.n1))];
    };
    for (int i0 = 0; i0 < m.n0; ++i0)
        for (int i1 = 0; i1 < m.n1; ++i1) {
            const int id = m.index(i0, i1);
            const Tensor3& Gbar = fp.gbar_gamma[id];
            const Mat& d1 = fp.d1[id];
            const Vec& t0 = fp.tau[id];
            Mat T(mdim, 2);
            const Vec dt0 = (tau_at(i0 + 1, i1) - tau_at(i0 - 1, i1)) / (2.0 * dc.h0);
            const Vec dt1 = (tau_at(i0, i1 + 1) - tau_at(i0, i1 - 1)) / (2.0 * dc.h1);
            for (int a = 0; a < mdim; ++a)
                for (int j = 0; j < 2; ++j) {
                    double v = (j == 0) ? dt0(a) : dt1(a);
                    for (int b = 0; b < mdim; ++b)
                        for (int c = 0; c < mdim; ++c) v += Gbar(a, b, c) * d1(b, j) * t0(c);
                    T(a, j) = v;
                }
            bp.nabla_tau[id] = T;
        }

    auto nt_at = [&](int i0, int i1) -> const Mat& {
        return bp.nabla_tau[m.index(wrap_idx(i0, m.n0), wrap_idx(i1, m.n1))];
    };
    for (int i0 = 0; i0 < m.n0; ++i0)
        for (int i1 = 0; i1 < m.n1; ++i1) {
            const int id = m.index(i0, i1);
            const NodeGeom& ng = dc.nodes[id];
            const Tensor3& Gbar = fp.gbar_gamma[id];
            const Mat& d1 = fp.d1[id];
            const Mat& T0 = bp.nabla_tau[id];
            Vec rough = Vec::Zero(mdim);
            const Mat dT0 = (nt_at(i0 + 1, i1) - nt_at(i0 - 1, i1)) / (2.0 * dc.h0);
            const Mat dT1 = (nt_at(i0, i1 + 1) - nt_at(i0, i1 - 1)) / (2.0 * dc.h1);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double gij = ng.ginv(i, j);
                    if (gij == 0.0) continue;
                    for (int a = 0; a < mdim; ++a) {
                        double v = (i == 0) ? dT0(a, j) : dT1(a, j);
                        for (int b = 0; b < mdim; ++b)
                            for (int c = 0; c < mdim; ++c)
                                v += Gbar(a, b, c) * d1(b, i) * T0(c, j);
                        for (int k = 0; k < 2; ++k) v -= ng.gamma(k, i, j) * T0(a, k);
                        rough(a) += gij * v;
                    }
                }
            const Vec& fv = m.values[id];
            const Tensor4 Rbar = m.target.riemann_closed ? m.target.riemann_closed(fv)
                                                         : riemann_at(m.target, fv);
            const Vec& tau0 = fp.tau[id];
            Vec curv = Vec::Zero(mdim);
            for (int i = 0; i < 2; ++i) {
                const Vec X = d1 * ng.frame.col(i);
                for (int a = 0; a < mdim; ++a) {
                    double s = 0.0;
                    for (int b = 0; b < mdim; ++b)
                        for (int c = 0; c < mdim; ++c)
                            for (int d = 0; d < mdim; ++d)
                                s += Rbar(a, b, c, d) * X(b) * tau0(c) * X(d);
                    curv(a) += s;
                }
            }
            bp.tau2[id] = rough - curv;
            const Mat gbar = m.target.metric(fv);
            bp.sup_tau2 = std::max(bp.sup_tau2,
                                   std::sqrt(bp.tau2[id].dot(gbar * bp.tau2[id])));
        }
}

} // namespace

DiscreteMap sample_discrete_map(const MapBetweenManifolds& f, int n0, int n1, int fd_order,
                                int pinned_rows) {
    if (f.domain.dim != 2) throw ConfigError("grid-backed maps require a 2-dim domain");
    if (fd_order != 2 && fd_order != 4) throw ConfigError("fd_order must be 2 or 4");
    DiscreteMap m;
    m.domain = f.domain;
    m.target = f.target;
    m.n0 = n0;
    m.n1 = n1;
    m.fd_order = fd_order;
    m.periodic0 = f.domain.chart_box[0].periodic;
    m.periodic1 = f.domain.chart_box[1].periodic;
    if (!m.periodic1) throw ConfigError("second domain coordinate must be periodic");
    if (fd_order == 4 && !m.periodic0)
        throw ConfigError("fd_order 4 requires a fully periodic grid");
    m.pinned_rows = (pinned_rows >= 0) ? pinned_rows : (m.periodic0 ? 0 : 1);
    for (int i = 0; i < n0; ++i) {
        const Interval& iv = f.domain.chart_box[0];
        if (m.periodic0) {
            m.coord0.push_back(iv.lo + i * (iv.hi - iv.lo) / n0);
        } else {
            const double lo = iv.lo + f.domain.interior_margin;
            const double hi = iv.hi - f.domain.interior_margin;
            m.coord0.push_back(lo + i * (hi - lo) / (n0 - 1));
        }
    }
    for (int i = 0; i < n1; ++i) {
        const Interval& iv = f.domain.chart_box[1];
        m.coord1.push_back(iv.lo + i * (iv.hi - iv.lo) / n1);
    }
    m.values.reserve(static_cast<size_t>(n0) * n1);
    for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n1; ++i1) {
            const MapJet j = f.jet(chart_point(m, i0, i1));
            const Vec fv = wrap_point(f.target, j.value);
            if (!in_guarded_interior(f.target, fv))
                throw TargetChartEscape("sampled map value escapes the target guard band");
            m.values.push_back(fv);
        }
    return m;
}

MapJet discrete_jet(const DiscreteMap& m, int i0, int i1) {
    const double h0 = m.coord0[1] - m.coord0[0];
    const double h1 = m.coord1[1] - m.coord1[0];
    MapJet j;
    j.value = m.values[m.index(i0, i1)];
    const int mdim = m.target.dim;
    j.d1 = Mat(mdim, 2);
    j.d1.col(0) = d1_axis(m, i0, i1, 0, h0);
    j.d1.col(1) = d1_axis(m, i0, i1, 1, h1);
    j.d2 = Tensor3(mdim, 2, 2);
    const Vec d00 = d2_axis(m, i0, i1, 0, h0);
    const Vec d11 = d2_axis(m, i0, i1, 1, h1);
    const Vec d01 = d1_cross(m, i0, i1, h0, h1);
    for (int a = 0; a < mdim; ++a) {
        j.d2(a, 0, 0) = d00(a);
        j.d2(a, 1, 1) = d11(a);
        j.d2(a, 0, 1) = d01(a);
        j.d2(a, 1, 0) = d01(a);
    }
    return j;
}

MapBetweenManifolds as_map(const DiscreteMap& m) {
    MapBetweenManifolds f;
    f.name = "grid-backed";
    f.domain = m.domain;
    f.target = m.target;
    const DiscreteMap snapshot = m;  // read-only snapshot for sweeps
    f.jet = [snapshot](const Vec& p0) {
        const Vec p = wrap_point(snapshot.domain, p0);
        const double h0 = snapshot.coord0[1] - snapshot.coord0[0];
        const double h1 = snapshot.coord1[1] - snapshot.coord1[0];
        const double x0 = (p(0) - snapshot.coord0[0]) / h0;
        const double x1 = (p(1) - snapshot.coord1[0]) / h1;
        const int i0 = static_cast<int>(std::lround(x0));
        const int i1 = static_cast<int>(std::lround(x1));
        if (std::abs(x0 - i0) > 1e-9 || std::abs(x1 - i1) > 1e-9 || i0 < 0 || i0 >= snapshot.n0 ||
            i1 < 0 || i1 >= snapshot.n1)
            throw ConfigError("grid-backed maps evaluate at grid nodes only");
        return discrete_jet(snapshot, i0, i1);
    };
    return f;
}

std::vector<Vec> tension_field(const DiscreteMap& m) {
    const DomainCache dc = build_domain_cache(m);
    FieldPass fp;
    run_field_pass(m, dc, fp);
    return fp.tau;
}

std::vector<Vec> bitension_field(const DiscreteMap& m) {
    const DomainCache dc = build_domain_cache(m);
    FieldPass fp;
    run_field_pass(m, dc, fp);
    BitensionPass bp;
    run_bitension_pass(m, dc, fp, bp);
    return bp.tau2;
}

DiscreteEnergies discrete_energies(const DiscreteMap& m) {
    const DomainCache dc = build_domain_cache(m);
    FieldPass fp;
    run_field_pass(m, dc, fp);
    return DiscreteEnergies{fp.E1, fp.E2};
}

namespace {

/// Applies the update and enforces the target guard band.
void apply_update(DiscreteMap& m, const std::vector<Vec>& dir, double dt, double sign) {
    std::vector<Vec> backup = m.values;
    for (int i0 = 0; i0 < m.n0; ++i0) {
        if (!m.row_active(i0)) continue;
        for (int i1 = 0; i1 < m.n1; ++i1) {
            const int id = m.index(i0, i1);
            Vec v = m.values[id] + sign * dt * dir[id];
            v = wrap_point(m.target, v);
            if (!in_guarded_interior(m.target, v)) {
                m.values = std::move(backup);
                throw StepRejected("flow update escapes the target guard band");
            }
            m.values[id] = v;
        }
    }
}

} // namespace

void heat_flow_step(DiscreteMap& m, double dt) {
    if (dt <= 0.0) throw ConfigError("dt must be positive");
    apply_update(m, tension_field(m), dt, +1.0);
}

void biharmonic_flow_step(DiscreteMap& m, double dt) {
    if (dt <= 0.0) throw ConfigError("dt must be positive");
    apply_update(m, bitension_field(m), dt, -1.0);
}

FlowTrace run_flow(DiscreteMap& m, FlowMode mode, const FlowConfig& cfg) {
    const DomainCache dc = build_domain_cache(m);
    const RicciMinResult rm = ricci_min(m.domain, {16, 32});
    const double ric_min_used = rm.value - rm.certificate;

    double dt0 = cfg.dt;
    if (dt0 <= 0.0)
        dt0 = (mode == FlowMode::Harmonic) ? 0.4 / dc.stiffness
                                           : 0.2 / (dc.stiffness * dc.stiffness);
    double dt = dt0;
    const double dt_min = dt0 * cfg.dt_min_factor;

    FlowTrace trace;
    FieldPass fp;
    BitensionPass bp;
    double t = 0.0;
    double E_prev = std::numeric_limits<double>::infinity();
    double E_initial = -1.0;
    std::vector<Vec> backup;
    double dt_last = dt;
    int rejects_in_row = 0;
    int last_reject_step = -1000000;

    auto sample = [&](double sup2) {
        trace.samples.push_back(FlowSample{t, fp.E1, fp.E2, fp.sup_tau1, sup2,
                                           fp.E2 - ric_min_used * fp.E1, dt});
    };

    for (int step = 0;; ++step) {
        run_field_pass(m, dc, fp);
        const bool bi = (mode == FlowMode::Biharmonic);
        if (bi) run_bitension_pass(m, dc, fp, bp);
        const double E_mode = bi ? fp.E2 : fp.E1;
        const double sup_mode = bi ? bp.sup_tau2 : fp.sup_tau1;

        // Monotonicity gate: an energy increase rejects the previous step.
        if (E_mode > E_prev * (1.0 + cfg.energy_slack) && !backup.empty()) {
            m.values = backup;
            t -= dt_last;  // roll back the rejected step
            --trace.steps;
            dt = 0.5 * dt_last;
            ++trace.rejected;
            ++rejects_in_row;
            last_reject_step = step;
            if (dt < dt_min) {
                trace.termination = "blowup";
                break;
            }
            if (rejects_in_row > cfg.max_rejects) {
                trace.termination = "blowup";
                break;
            }
            continue;
        }
        rejects_in_row = 0;
        E_prev = E_mode;
        if (E_initial < 0.0) E_initial = E_mode;

        const bool want_sample = (step % cfg.sample_every == 0);
        double sup2 = bi ? bp.sup_tau2 : 0.0;
        if (want_sample && !bi && m.periodic0) {
            BitensionPass tmp;
            run_bitension_pass(m, dc, fp, tmp);
            sup2 = tmp.sup_tau2;
        }
        if (sup_mode <= cfg.tau_tol) {
            sample(sup2);
            trace.termination = "tau_tol";
            break;
        }
        if (cfg.energy_target_ratio > 0.0 && E_mode <= cfg.energy_target_ratio * E_initial) {
            sample(sup2);
            trace.termination = "energy_target";
            break;
        }
        if (step >= cfg.max_steps) {
            sample(sup2);
            trace.termination = "max_steps";
            break;
        }
        if (want_sample) sample(sup2);

        backup = m.values;
        dt_last = dt;
        try {
            apply_update(m, bi ? bp.tau2 : fp.tau, dt, bi ? -1.0 : +1.0);
        } catch (const StepRejected&) {
            dt *= 0.5;
            ++trace.rejected;
            ++rejects_in_row;
            last_reject_step = step;
            if (dt < dt_min || rejects_in_row > cfg.max_rejects) {
                trace.termination = "blowup";
                break;
            }
            continue;
        }
        t += dt;
        ++trace.steps;
        if (step - last_reject_step > 200 && dt < dt0) dt = std::min(dt * 1.5, dt0);
    }
    return trace;
}

} // namespace mapenergy
