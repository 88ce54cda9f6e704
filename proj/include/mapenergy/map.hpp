#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "mapenergy/jet.hpp"
#include "mapenergy/manifold.hpp"

namespace mapenergy {

/// Second-order jet of a map at a chart point: value f(p) (size m), first
/// partials d1(a,i) = d_i f^a, second partials d2(a,i,j) = d_i d_j f^a.
struct MapJet {
    Vec value;
    Mat d1;
    Tensor3 d2;
};

/// Smooth map between chart-presented manifolds. The evaluator is a pure
/// function of the (wrapped) domain point; instances are immutable and safe
/// to share across threads.
struct MapBetweenManifolds {
    std::string name;
    ChartManifold domain;
    ChartManifold target;
    std::function<MapJet(const Vec&)> jet;
};

using AnalyticFn = std::function<std::vector<Jet2>(const std::vector<Jet2>&)>;

/// Wraps a closed-form map; derivatives via forward-mode second-order duals.
MapBetweenManifolds make_analytic_map(const ChartManifold& domain, const ChartManifold& target,
                                      AnalyticFn f, std::string name);

/// Parsed map spec: "name" or "name:key=val,key=val".
struct MapSpec {
    std::string name;
    std::map<std::string, double> params;
};
MapSpec parse_map_spec(const std::string& spec);
std::string format_map_spec(const MapSpec& spec);

/// Built-in analytic map catalog; throws UnknownMap for unrecognized names or
/// incompatible domain/target.
MapBetweenManifolds make_catalog_map(const std::string& spec, const ChartManifold& domain,
                                     const ChartManifold& target);

std::vector<std::string> map_catalog_names();

/// Randomized bounded-amplitude trigonometric-polynomial map from torus2; the
/// sup-norm of each component is bounded by `amplitude`.
MapBetweenManifolds make_random_trig_torus_map(std::uint64_t seed, double amplitude,
                                               const ChartManifold& domain,
                                               const ChartManifold& target);

/// Randomized map from sphere2 built from polynomials in the ambient
/// coordinates (smooth across the poles); component sup-norm <= amplitude.
MapBetweenManifolds make_random_sphere_ambient_map(std::uint64_t seed, double amplitude,
                                                   const ChartManifold& domain,
                                                   const ChartManifold& target);

} // namespace mapenergy
