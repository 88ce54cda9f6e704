#pragma once

#include "mapenergy/map.hpp"
#include "mapenergy/quadrature.hpp"

namespace mapenergy {

struct PullbackSpectrum {
    Vec eigenvalues;        // descending, lambda_1 >= ... >= lambda_n >= 0
    Mat frame;              // columns e_i, g-orthonormal, diagonalize g*
    int rank = 0;
    double rank_tolerance = 0.0;
};

/// Everything derivable from one jet evaluation at a point.
struct PointGeometry {
    Vec point;
    Vec fvalue;
    Mat pullback;           // g*
    PullbackSpectrum spectrum;
    Tensor3 sff;            // (a,i,j) = (nabla df)^a_ij
    Vec tension;            // tau_1 components in the target chart
    double energy_density = 0.0;  // trace_g g* = |df|^2
    double q_ric_part = 0.0;      // sum_i lambda_i Ric(e_i, e_i)
    double q_sec_part = 0.0;      // sum_{i!=j} lambda_i lambda_j sec(df e_i, df e_j)
    double q_scalar = 0.0;        // q_ric_part - q_sec_part
    double sff_norm2 = 0.0;       // |nabla df|^2 (gbar on the target index, g-traces on domain)
    double tension_norm2 = 0.0;   // |tau_1|^2 in gbar
};

constexpr double kDefaultRankTolerance = 1e-8;

/// g-orthonormal basis (columns) from the Cholesky factor of g.
Mat orthonormal_frame(const Mat& g);

Mat pullback_metric_at(const MapBetweenManifolds& f, const Vec& p);
PullbackSpectrum pullback_spectrum_at(const MapBetweenManifolds& f, const Vec& p,
                                      double rank_tolerance = kDefaultRankTolerance);

PointGeometry point_geometry_at(const MapBetweenManifolds& f, const Vec& p,
                                double rank_tolerance = kDefaultRankTolerance);

double energy_density_at(const MapBetweenManifolds& f, const Vec& p);
Tensor3 second_fundamental_form_at(const MapBetweenManifolds& f, const Vec& p);
Vec tension_at(const MapBetweenManifolds& f, const Vec& p);
double q_scalar_at(const MapBetweenManifolds& f, const Vec& p,
                   double rank_tolerance = kDefaultRankTolerance);

/// Pullback-connection derivative of a section sigma of f^{-1}(T Mbar)
/// sampled on a symmetric stencil of half-width h around p. Returns an m x n
/// matrix whose column j is (nabla^f_j sigma)(p).
Mat pullback_connection_derivative(const MapBetweenManifolds& f, const Vec& p,
                                   const std::function<Vec(const Vec&)>& sigma, double h);

/// tau_2 = Delta_f tau_1 - sum_i Rbar(df e_i, tau_1) df e_i over a
/// g-orthonormal frame; the rough Laplacian is evaluated by nested stencils
/// of half-width h on the tau_1 field.
Vec bitension_at(const MapBetweenManifolds& f, const Vec& p, double h);

struct RankProfile {
    std::vector<int> ranks;    // one per grid node
    bool constant = false;
    int rank = -1;             // valid when constant
    std::vector<Vec> witnesses;  // nodes where the rank deviates from the mode
};
RankProfile rank_profile(const MapBetweenManifolds& f, const QuadratureGrid& grid,
                         double rank_tolerance = kDefaultRankTolerance);

/// sup over grid nodes of |nabla df| (target-metric Hilbert-Schmidt norm).
double totally_geodesic_defect(const MapBetweenManifolds& f, const QuadratureGrid& grid);

} // namespace mapenergy
