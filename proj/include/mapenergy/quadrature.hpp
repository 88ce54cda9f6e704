#pragma once

#include <functional>
#include <vector>

#include "mapenergy/manifold.hpp"

namespace mapenergy {

struct QuadratureGrid {
    ChartManifold manifold;
    std::vector<int> resolution;        // per-coordinate sample counts
    std::vector<Vec> nodes;
    std::vector<double> weights;        // strictly positive
    std::vector<double> volume_density; // sqrt(det g) at nodes
    int level = 0;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Tensor-product grid on a compact manifold; throws NonCompactDomain.
QuadratureGrid build_grid(const ChartManifold& M, const std::vector<int>& resolution);

/// sum(field * weight * volume_density); throws NonFiniteField (message carries
/// the offending node index).
double integrate(const QuadratureGrid& grid, std::span<const double> field);

struct RefineResult {
    double value = 0.0;
    double certificate = 0.0;   // |last - previous|
    double observed_order = 0.0;
    std::vector<double> values; // one per level
};

/// Integrates a pointwise field at `levels` successive resolutions (x2 each).
RefineResult refine_and_estimate(const ChartManifold& M,
                                 const std::function<double(const Vec&)>& field,
                                 const std::vector<int>& base_resolution, int levels);

struct RicciMinResult {
    double value = 0.0;
    double certificate = 0.0;  // refinement delta between two grid levels
};

/// Global minimum over grid samples of the smallest generalized eigenvalue of
/// (Ric, g); requires a compact manifold.
RicciMinResult ricci_min(const ChartManifold& M, const std::vector<int>& resolution);

} // namespace mapenergy
