#include "mapenergy/map.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace mapenergy {

MapBetweenManifolds make_analytic_map(const ChartManifold& domain, const ChartManifold& target,
                                      AnalyticFn f, std::string name) {
    MapBetweenManifolds m;
    m.name = std::move(name);
    m.domain = domain;
    m.target = target;
    const int n = domain.dim;
    const ChartManifold tgt = target;
    m.jet = [f = std::move(f), n, tgt](const Vec& p) {
        std::vector<Jet2> out = f(seed_point(p));
        const int mdim = static_cast<int>(out.size());
        MapJet j;
        j.value = Vec(mdim);
        j.d1 = Mat(mdim, n);
        j.d2 = Tensor3(mdim, n, n);
        for (int a = 0; a < mdim; ++a) {
            j.value(a) = out[a].v;
            for (int i = 0; i < n; ++i) {
                j.d1(a, i) = out[a].g(i);
                for (int k = 0; k < n; ++k) j.d2(a, i, k) = out[a].h(i, k);
            }
        }
        j.value = wrap_point(tgt, j.value);
        return j;
    };
    return m;
}

MapSpec parse_map_spec(const std::string& spec) {
    MapSpec s;
    const auto colon = spec.find(':');
    s.name = spec.substr(0, colon);
    if (colon == std::string::npos) return s;
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw UnknownMap("map parameter must be key=value: " + item);
        try {
            size_t pos = 0;
            const double v = std::stod(item.substr(eq + 1), &pos);
            if (pos != item.size() - eq - 1) throw std::invalid_argument("");
            s.params[item.substr(0, eq)] = v;
        } catch (const std::invalid_argument&) {
            throw UnknownMap("bad numeric value in map spec: " + item);
        }
    }
    return s;
}

std::string format_map_spec(const MapSpec& spec) {
    std::string out = spec.name;
    char sep = ':';
    for (const auto& [k, v] : spec.params) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%c%s=%.17g", sep, k.c_str(), v);
        out += buf;
        sep = ',';
    }
    return out;
}

namespace {

double param(const MapSpec& s, const std::string& key, double dflt) {
    auto it = s.params.find(key);
    return it == s.params.end() ? dflt : it->second;
}

void require_dims(const MapSpec& s, const ChartManifold& domain, int n,
                  const ChartManifold& target, int mlo, int mhi) {
    if (domain.dim != n)
        throw UnknownMap("map " + s.name + " expects a " + std::to_string(n) + "-dim domain");
    if (target.dim < mlo || target.dim > mhi)
        throw UnknownMap("map " + s.name + " is incompatible with target " + target.name);
}

/// Ambient coordinates of the sphere chart point (theta, phi), scaled to the
/// sphere's radius.
std::vector<Jet2> sphere_ambient(const std::vector<Jet2>& p, double r) {
    const Jet2 st = sin(p[0]), ct = cos(p[0]), cp = cos(p[1]), sp = sin(p[1]);
    return {r * st * cp, r * st * sp, r * ct};
}

} // namespace

MapBetweenManifolds make_catalog_map(const std::string& specstr, const ChartManifold& domain,
                                     const ChartManifold& target) {
    const MapSpec s = parse_map_spec(specstr);
    const int n = domain.dim, m = target.dim;

    if (s.name == "identity") {
        if (domain.name != target.name)
            throw UnknownMap("identity requires matching domain and target");
        return make_analytic_map(domain, target,
                                 [](const std::vector<Jet2>& p) { return p; }, specstr);
    }
    if (s.name == "constant") {
        Vec c(m);
        for (int a = 0; a < m; ++a) c(a) = param(s, "c" + std::to_string(a + 1), 0.0);
        if (!in_guarded_interior(target, wrap_point(target, c)))
            throw TargetChartEscape("constant map value outside target chart");
        return make_analytic_map(domain, target,
                                 [c, n](const std::vector<Jet2>&) {
                                     std::vector<Jet2> out;
                                     for (int a = 0; a < c.size(); ++a)
                                         out.push_back(Jet2::constant(n, c(a)));
                                     return out;
                                 },
                                 specstr);
    }
    if (s.name == "sphere_inclusion") {
        require_dims(s, domain, 2, target, 3, 3);
        // radius read off the domain metric so sphere2:r=<r> composes correctly
        Vec probe(2);
        probe << 1.0, 0.0;
        const double r = std::sqrt(domain.metric(probe)(0, 0));
        return make_analytic_map(domain, target,
                                 [r](const std::vector<Jet2>& p) { return sphere_ambient(p, r); },
                                 specstr);
    }
    if (s.name == "torus_linear") {
        require_dims(s, domain, 2, target, 2, 2);
        const double a = param(s, "a", 1.0), b = param(s, "b", 0.0);
        const double c = param(s, "c", 0.0), d = param(s, "d", 1.0);
        for (double x : {a, b, c, d})
            if (x != std::round(x))
                throw UnknownMap("torus_linear coefficients must be integers");
        return make_analytic_map(domain, target,
                                 [=](const std::vector<Jet2>& p) {
                                     return std::vector<Jet2>{a * p[0] + b * p[1],
                                                              c * p[0] + d * p[1]};
                                 },
                                 specstr);
    }
    if (s.name == "torus_to_disk") {
        require_dims(s, domain, 2, target, 2, 2);
        const double amp = param(s, "amplitude", 0.3);
        const double cx = param(s, "cx", 0.0), cy = param(s, "cy", 0.0);
        return make_analytic_map(domain, target,
                                 [=](const std::vector<Jet2>& p) {
                                     return std::vector<Jet2>{cx + amp * cos(p[0]),
                                                              cy + amp * sin(p[1])};
                                 },
                                 specstr);
    }
    if (s.name == "torus_trig") {
        require_dims(s, domain, 2, target, 2, 3);
        const double amp = param(s, "amplitude", 0.3);
        return make_analytic_map(domain, target,
                                 [amp, m](const std::vector<Jet2>& p) {
                                     const Jet2 &x = p[0], &y = p[1];
                                     std::vector<Jet2> out;
                                     out.push_back(amp * (sin(x) + 0.5 * cos(x + 2.0 * y)));
                                     out.push_back(amp * (cos(y) - 0.4 * sin(2.0 * x - y)));
                                     if (m == 3) out.push_back(amp * 0.7 * sin(x + y));
                                     return out;
                                 },
                                 specstr);
    }
    if (s.name == "torus_wave") {
        require_dims(s, domain, 2, target, 2, 2);
        const double amp = param(s, "amplitude", 0.02);
        const double kx = param(s, "kx", 3.0), ky = param(s, "ky", 2.0);
        const double cx = param(s, "cx", 0.0), cy = param(s, "cy", 0.0);
        const double vx = param(s, "vx", 0.7), vy = param(s, "vy", -0.5);
        if (kx != std::round(kx) || ky != std::round(ky))
            throw UnknownMap("torus_wave wavenumbers must be integers");
        return make_analytic_map(domain, target,
                                 [=](const std::vector<Jet2>& p) {
                                     const Jet2 w = sin(kx * p[0] + ky * p[1]);
                                     return std::vector<Jet2>{cx + amp * vx * w,
                                                              cy + amp * vy * w};
                                 },
                                 specstr);
    }
    if (s.name == "sphere_to_disk") {
        require_dims(s, domain, 2, target, 2, 2);
        const double amp = param(s, "amplitude", 0.3);
        return make_analytic_map(domain, target,
                                 [amp](const std::vector<Jet2>& p) {
                                     auto X = sphere_ambient(p, 1.0);
                                     return std::vector<Jet2>{amp * X[0], amp * X[1]};
                                 },
                                 specstr);
    }
    if (s.name == "sphere_quadratic") {
        require_dims(s, domain, 2, target, 2, 3);
        const double amp = param(s, "amplitude", 0.3);
        return make_analytic_map(domain, target,
                                 [amp, m](const std::vector<Jet2>& p) {
                                     auto X = sphere_ambient(p, 1.0);
                                     std::vector<Jet2> out;
                                     out.push_back(amp * X[0] * X[1]);
                                     out.push_back(amp * X[1] * X[2]);
                                     if (m == 3) out.push_back(amp * (X[0] * X[0] - X[2] * X[2]));
                                     return out;
                                 },
                                 specstr);
    }
    if (s.name == "sphere_cap") {
        require_dims(s, domain, 2, target, 2, 2);
        const double amp = param(s, "amplitude", 0.3);
        const double smin = std::sin(domain.interior_margin);
        return make_analytic_map(domain, target,
                                 [amp, smin, n](const std::vector<Jet2>& p) {
                                     return std::vector<Jet2>{amp * (sin(p[0]) - smin),
                                                              Jet2::constant(n, 0.0)};
                                 },
                                 specstr);
    }
    if (s.name == "sphere_band") {
        // Axisymmetric, odd about the equator, zero on both guard rings; its
        // gradient-flow decay avoids the slow quasi-constant mode of the
        // punctured sphere.
        require_dims(s, domain, 2, target, 2, 2);
        const double amp = param(s, "amplitude", 0.3);
        const double tmin = domain.interior_margin;
        const double scale = 2.0 * M_PI / (M_PI - 2.0 * tmin);
        return make_analytic_map(domain, target,
                                 [amp, tmin, scale, n](const std::vector<Jet2>& p) {
                                     return std::vector<Jet2>{amp * sin(scale * (p[0] - tmin)),
                                                              Jet2::constant(n, 0.0)};
                                 },
                                 specstr);
    }
    if (s.name == "random_trig") {
        require_dims(s, domain, 2, target, 2, 3);
        return make_random_trig_torus_map(
            static_cast<std::uint64_t>(param(s, "seed", 1.0)), param(s, "amplitude", 0.3),
            domain, target);
    }
    if (s.name == "random_sphere") {
        require_dims(s, domain, 2, target, 2, 3);
        return make_random_sphere_ambient_map(
            static_cast<std::uint64_t>(param(s, "seed", 1.0)), param(s, "amplitude", 0.3),
            domain, target);
    }
    throw UnknownMap("unknown map spec: " + specstr);
}

std::vector<std::string> map_catalog_names() {
    return {"identity",
            "constant:c1=..,c2=..",
            "sphere_inclusion",
            "torus_linear:a=..,b=..,c=..,d=..",
            "torus_to_disk:amplitude=..,cx=..,cy=..",
            "torus_trig:amplitude=..",
            "torus_wave:amplitude=..,kx=..,ky=..,cx=..,cy=..,vx=..,vy=..",
            "sphere_to_disk:amplitude=..",
            "sphere_quadratic:amplitude=..",
            "sphere_cap:amplitude=..",
            "sphere_band:amplitude=..",
            "random_trig:seed=..,amplitude=..",
            "random_sphere:seed=..,amplitude=.."};
}

MapBetweenManifolds make_random_trig_torus_map(std::uint64_t seed, double amplitude,
                                               const ChartManifold& domain,
                                               const ChartManifold& target) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int m = target.dim;
    struct Mode {
        int kx, ky;
        double ca, sa;
    };
    std::vector<std::vector<Mode>> comps(m);
    for (int a = 0; a < m; ++a) {
        double total = 0.0;
        for (int kx = 0; kx <= 2; ++kx)
            for (int ky = (kx == 0 ? 1 : -2); ky <= 2; ++ky) {
                Mode md{kx, ky, U(rng), U(rng)};
                comps[a].push_back(md);
                total += std::abs(md.ca) + std::abs(md.sa);
            }
        for (Mode& md : comps[a]) {
            md.ca *= amplitude / total;
            md.sa *= amplitude / total;
        }
    }
    const int n = domain.dim;
    return make_analytic_map(
        domain, target,
        [comps, n](const std::vector<Jet2>& p) {
            std::vector<Jet2> out;
            for (const auto& modes : comps) {
                Jet2 f = Jet2::constant(n, 0.0);
                for (const Mode& md : modes) {
                    const Jet2 arg = static_cast<double>(md.kx) * p[0] +
                                     static_cast<double>(md.ky) * p[1];
                    f = f + md.ca * cos(arg) + md.sa * sin(arg);
                }
                out.push_back(f);
            }
            return out;
        },
        "random_trig:seed=" + std::to_string(seed));
}

MapBetweenManifolds make_random_sphere_ambient_map(std::uint64_t seed, double amplitude,
                                                   const ChartManifold& domain,
                                                   const ChartManifold& target) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int m = target.dim;
    // coefficients of 1st/2nd degree ambient monomials X, Y, Z, XY, YZ, XZ, X^2-Y^2
    std::vector<std::array<double, 7>> coef(m);
    for (int a = 0; a < m; ++a) {
        double total = 0.0;
        for (double& c : coef[a]) {
            c = U(rng);
            total += 2.0 * std::abs(c);  // |X^2-Y^2| <= 2 bound, others <= 1
        }
        for (double& c : coef[a]) c *= amplitude / total;
    }
    return make_analytic_map(
        domain, target,
        [coef](const std::vector<Jet2>& p) {
            auto A = sphere_ambient(p, 1.0);
            const Jet2 &X = A[0], &Y = A[1], &Z = A[2];
            std::vector<Jet2> out;
            for (const auto& c : coef)
                out.push_back(c[0] * X + c[1] * Y + c[2] * Z + c[3] * X * Y + c[4] * Y * Z +
                              c[5] * X * Z + c[6] * (X * X - Y * Y));
            return out;
        },
        "random_sphere:seed=" + std::to_string(seed));
}

} // namespace mapenergy
