#pragma once

#include <cstdint>

#include "mapenergy/map_geometry.hpp"

namespace mapenergy {

struct Certified {
    double value = 0.0;
    double certificate = 0.0;
};

enum class Verdict { HOLDS, EQUALITY, VIOLATION, PRECONDITION_FAILED, NOT_PROJECTIVE };
std::string to_string(Verdict v);

struct EqualityDiagnostics {
    double term_sec = 0.0;  // int of -sum_{i!=j} lambda_i lambda_j sec
    double term_ric = 0.0;  // int of (sum_i lambda_i Ric(e_i,e_i) - Ric_min |df|^2)
    double term_sff = 0.0;  // int of |nabla df|^2
    double sup_sff = 0.0;   // totally-geodesic defect
    bool rank_constant = false;
    int rank = -1;
    bool rigid = false;
};

struct ReportOptions {
    double rank_tolerance = kDefaultRankTolerance;
    double slack = 1e-9;
    std::uint64_t seed = 1;
    int npc_random_planes = 8;
    double npc_tol = 1e-9;
};

struct EnergyReport {
    double E1 = 0.0;
    double E2 = 0.0;
    double integral_Q = 0.0;
    double integral_sff = 0.0;
    double bochner_residual = 0.0;  // integral_Q + integral_sff - E2
    Certified ric_min;
    double margin = 0.0;            // E2 - (ric_min.value - ric_min.certificate) * E1
    bool npc_certified = false;
    double worst_sec = 0.0;
    EqualityDiagnostics equality;

    double E1_cert = 0.0, E2_cert = 0.0, residual_cert = 0.0, margin_cert = 0.0;
    double equality_band = 0.0, violation_band = 0.0;
    std::vector<double> residual_by_level;
    double residual_order = 0.0;
    std::vector<int> resolution;
    int levels = 1;
};

/// Full global report for a map on the compact domain, with refinement
/// certificates from `levels` successive grid doublings.
EnergyReport energy_report(const MapBetweenManifolds& f, const std::vector<int>& base_resolution,
                           int levels, const ReportOptions& opt = {});

Verdict verify_main_inequality(const EnergyReport& report);

EqualityDiagnostics equality_diagnostics(const MapBetweenManifolds& f, const QuadratureGrid& grid,
                                         const EnergyReport& report,
                                         const ReportOptions& opt = {});

using OneFormField = std::function<Vec(const Vec&)>;  // covariant components theta_i(p)

struct ProjectiveReport {
    double res_decomposition = 0.0;  // sup |nabla df - theta (x) df - df (x) theta|
    double res_tension = 0.0;        // sup |tau_1 - 2 df(theta^sharp)|
    double res_identity = 0.0;       // |E2 - 2 int (Q + 2 |theta|^2 |df|^2)|
    bool projective = false;
    double margin2 = 0.0;            // E2 - 2 Ric_min E1
    double margin2_cert = 0.0;
    Verdict verdict = Verdict::NOT_PROJECTIVE;
    EnergyReport base;
};

ProjectiveReport projective_check(const MapBetweenManifolds& f,
                                  const std::vector<int>& base_resolution, int levels,
                                  const OneFormField& theta, const ReportOptions& opt = {},
                                  double projective_tolerance = 1e-6);

/// Pointwise least-squares fit of theta in the decomposition
/// sff = theta (x) df + df (x) theta, in the bundle inner product induced by
/// g and gbar. Throws RankDeficient when df vanishes.
Vec fit_theta_pointwise(const Mat& d1, const Tensor3& sff, const Mat& g, const Mat& gbar);

struct ThetaFit {
    std::vector<Vec> theta;     // one per grid node; empty Vec where skipped
    double residual = 0.0;      // sup over fitted nodes of the bundle-norm misfit
    int skipped = 0;            // nodes with df = 0 (theta unidentifiable)
};

ThetaFit recover_theta(const MapBetweenManifolds& f, const QuadratureGrid& grid,
                       double rank_tolerance = kDefaultRankTolerance);

} // namespace mapenergy
