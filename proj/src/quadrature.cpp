#include "mapenergy/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace mapenergy {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess, Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

QuadratureGrid build_grid(const ChartManifold& M, const std::vector<int>& resolution) {
    if (!M.compact) throw NonCompactDomain("build_grid requires a compact manifold: " + M.name);
    if (static_cast<int>(resolution.size()) != M.dim)
        throw ConfigError("resolution size does not match manifold dimension");

    std::vector<std::vector<double>> xs(M.dim), ws(M.dim);
    for (int c = 0; c < M.dim; ++c) {
        const int N = resolution[c];
        if (N < 2) throw ConfigError("resolution must be >= 2 per coordinate");
        const Interval& iv = M.chart_box[c];
        switch (M.quad_rules[c]) {
            case CoordRule::PeriodicTrapezoid: {
                const double dx = (iv.hi - iv.lo) / N;
                for (int q = 0; q < N; ++q) {
                    xs[c].push_back(iv.lo + q * dx);
                    ws[c].push_back(dx);
                }
                break;
            }
            case CoordRule::GaussCos: {
                // Nodes at acos of Gauss points: integrates F(theta) sin(theta) dtheta
                // exactly for smooth F; never touches the poles.
                std::vector<double> gx, gw;
                gauss_legendre(N, gx, gw);
                for (int q = 0; q < N; ++q) {
                    const double theta = std::acos(gx[N - 1 - q]);
                    xs[c].push_back(theta);
                    ws[c].push_back(gw[N - 1 - q] / std::sin(theta));
                }
                break;
            }
            case CoordRule::Gauss: {
                std::vector<double> gx, gw;
                gauss_legendre(N, gx, gw);
                const double mid = 0.5 * (iv.lo + iv.hi), half = 0.5 * (iv.hi - iv.lo);
                for (int q = 0; q < N; ++q) {
                    xs[c].push_back(mid + half * gx[q]);
                    ws[c].push_back(half * gw[q]);
                }
                break;
            }
        }
    }

    QuadratureGrid grid;
    grid.manifold = M;
    grid.resolution = resolution;
    size_t total = 1;
    for (int c = 0; c < M.dim; ++c) total *= resolution[c];
    grid.nodes.reserve(total);
    grid.weights.reserve(total);
    grid.volume_density.reserve(total);

    std::vector<int> idx(M.dim, 0);
    Vec p(M.dim);
    for (size_t t = 0; t < total; ++t) {
        double w = 1.0;
        for (int c = 0; c < M.dim; ++c) {
            p(c) = xs[c][idx[c]];
            w *= ws[c][idx[c]];
        }
        if (!in_guarded_interior(M, p))
            throw OutOfChart("quadrature node violates guard band of " + M.name);
        grid.nodes.push_back(p);
        grid.weights.push_back(w);
        grid.volume_density.push_back(std::sqrt(M.metric(p).determinant()));
        for (int c = M.dim - 1; c >= 0; --c) {
            if (++idx[c] < resolution[c]) break;
            idx[c] = 0;
        }
    }
    return grid;
}

double integrate(const QuadratureGrid& grid, std::span<const double> field) {
    if (field.size() != grid.nodes.size())
        throw ConfigError("field size does not match grid node count");
    std::vector<double> terms(field.size());
    for (size_t i = 0; i < field.size(); ++i) {
        if (!std::isfinite(field[i]))
            throw NonFiniteField("non-finite field value at node " + std::to_string(i));
        terms[i] = field[i] * grid.weights[i] * grid.volume_density[i];
    }
    return pairwise_sum(terms);
}

RefineResult refine_and_estimate(const ChartManifold& M,
                                 const std::function<double(const Vec&)>& field,
                                 const std::vector<int>& base_resolution, int levels) {
    RefineResult out;
    std::vector<int> res = base_resolution;
    for (int lvl = 0; lvl < levels; ++lvl) {
        QuadratureGrid g = build_grid(M, res);
        g.level = lvl;
        std::vector<double> values(g.nodes.size());
        for (size_t i = 0; i < g.nodes.size(); ++i) values[i] = field(g.nodes[i]);
        out.values.push_back(integrate(g, values));
        for (int& r : res) r *= 2;
    }
    out.value = out.values.back();
    const int L = static_cast<int>(out.values.size());
    out.certificate = (L >= 2) ? std::abs(out.values[L - 1] - out.values[L - 2]) : 0.0;
    if (L >= 3) {
        const double e1 = std::abs(out.values[L - 2] - out.values[L - 1]);
        const double e0 = std::abs(out.values[L - 3] - out.values[L - 1]);
        if (e1 > 0.0 && e0 > 0.0) out.observed_order = std::log2(e0 / e1);
    }
    return out;
}

RicciMinResult ricci_min(const ChartManifold& M, const std::vector<int>& resolution) {
    if (!M.compact) throw NonCompactDomain("ricci_min requires a compact manifold: " + M.name);
    auto grid_min = [&M](const std::vector<int>& res) {
        const QuadratureGrid g = build_grid(M, res);
        double m = std::numeric_limits<double>::infinity();
        for (const Vec& p : g.nodes) m = std::min(m, ricci_quadratic_min_at(M, p));
        return m;
    };
    const double coarse = grid_min(resolution);
    std::vector<int> res2 = resolution;
    for (int& r : res2) r *= 2;
    const double fine = grid_min(res2);
    return RicciMinResult{std::min(coarse, fine), std::abs(fine - coarse)};
}

} // namespace mapenergy
