#pragma once

#include <map>
#include <string>

#include "ssoc/model.hpp"
#include "ssoc/numerics.hpp"
#include "ssoc/reconstruction.hpp"
#include "ssoc/solver.hpp"
#include "ssoc/transcription.hpp"

namespace ssoc {

/// Neighborhood of the reconstruction over which curvature and Lipschitz constants are sampled.
struct TubeSpec {
  double dx = 0.1;
  double du = 0.1;
  double dp = 0.1;
  int samples_per_axis = 3;
  int time_samples = 0;  // 0 selects 4 N

  /// Throws ContractError unless radii > 0 and samples >= 2.
  void validate() const;
};

/// Tube-sampled suprema. Lipschitz constants are stored after the safety factor;
/// the raw difference quotients are kept alongside.
struct CurvatureBounds {
  double L2 = 0.0;
  double M2f = 0.0;
  double L21_f = 0.0;
  double L21_L = 0.0;
  double L21_K = 0.0;
  double L21_f_raw = 0.0;
  double L21_L_raw = 0.0;
  double L21_K_raw = 0.0;
  double rho = 0.0;
  double A_inf = 0.0;
  double B_inf = 0.0;
  double P_max = 0.0;
  double Hux_inf = 0.0;  // sup |H_ux|_2 over the tube
  double Hup_inf = 0.0;  // sup |H_up|_2 over the tube
  double safety_factor = 1.5;
  int samples = 0;
};

struct CurvatureOptions {
  double safety_factor = 1.5;
  /// Throws LegendreError when the sampled rho is not positive.
  bool require_legendre = true;
};

/**
 * Samples the tube: at times jT/M every axis of (x, u, p) is offset by
 * samples_per_axis evenly spaced values in [-radius, radius] (a star around the
 * reconstruction). Lipschitz constants are max difference quotients of the AD
 * Hessians between each center and its half-radius axis neighbors.
 */
CurvatureBounds estimate_curvature_bounds(const OcpProblem& prob, const Reconstruction& rec,
                                          const TubeSpec& tube, const CurvatureOptions& options = {});

struct GeometryEstimate {
  double sigma_min_Mh = 0.0;
  double norm_Mh = 0.0;
  double lifting_norm = 2.0;      // |L_h|
  double restriction_norm = 1.0;  // |R_h|
  double C_geo = 0.0;
};

/// Dense KKT matrix [[W, J^T], [J, 0]] of the collocation NLP at the discrete point.
DenseMatrix discrete_kkt_matrix(const OcpProblem& prob, const DiscreteKkt& dkkt);

/// C_geo = |L_h| |R_h| / sigma_min(M_h). Throws StrongRegularityError when
/// sigma_min <= 1e-12 |M_h|.
GeometryEstimate estimate_C_geo_from_matrix(const DenseMatrix& Mh, double lifting_norm = 2.0,
                                            double restriction_norm = 1.0);
GeometryEstimate estimate_C_geo(const OcpProblem& prob, const DiscreteKkt& dkkt);

struct ConstantsBundle {
  double rho = 0.0;
  double L2 = 0.0;
  double L21_f = 0.0;
  double L21_L = 0.0;
  double L21_K = 0.0;
  double M2f = 0.0;
  double P_max = 0.0;
  double L21_H = 0.0;
  double C_int = 1.0;
  double c_Pi = 2.0;
  double A_inf = 0.0;
  double B_inf = 0.0;
  double Hux_inf = 0.0;
  double Hup_inf = 0.0;
  double C_geo = 0.0;
  double sigma_min_Mh = 0.0;
  double C_T = 0.0;
  double C_quad = 0.0;
  double C_Tprime = 0.0;
  double Gamma = 0.0;
  double Gamma_tot = 0.0;
  double Lambda = 0.0;
  double C_xp_inf = 0.0;
  double C_u_inf = 0.0;
  double C_close_inf = 0.0;

  // Provenance of the estimates.
  double safety_factor = 1.5;
  double C_xp_factor = 1.0;  // constant in front of C_geo (1+T) exp((A+B)T)
  double lifting_norm = 2.0;
  double restriction_norm = 1.0;
  double h_max = 0.0;
  int degree = 3;
  std::string source = "estimated";  // or "published"
  std::map<std::string, std::string> formulas;
};

/// c_Pi exp(A_inf T) (1 + B_inf / rho)
double compute_C_T(const ConstantsBundle& bundle, const Scheme& scheme, double horizon);

struct QuadratureConformity {
  double C_quad = 0.0;
  double C_Tprime = 0.0;
};
/// C_quad = h_max^2/12 L21_H G^2 with G = exp(A_inf T)(1 + B_inf/rho); C_T' = c_Pi L2 h_max^p.
QuadratureConformity compute_quadrature_and_conformity(const ConstantsBundle& bundle,
                                                       const Scheme& scheme, const Mesh& mesh);

/// C_int (L21_H + M2f) + 2 L21_K, from the stored summands.
double compute_Lambda(const ConstantsBundle& bundle);

struct CloseConstants {
  double C_xp_inf = 0.0;
  double C_u_inf = 0.0;
  double C_close_inf = 0.0;
};
/// C_xp = k C_geo (1+T) exp((A+B)T); C_u = (|H_ux| + |H_up|) C_xp / rho + 1/rho.
CloseConstants compute_C_close(const ConstantsBundle& bundle, double horizon);

/// The formula strings serialized with every certificate.
std::map<std::string, std::string> constant_formulas();

/// Fills every derived field (L21_H, C_int, C_T, C_quad, C_T', Gamma, Gamma_tot,
/// Lambda, C_close) from the primary estimates already stored in `bundle`.
void derive_constants(ConstantsBundle& bundle, const Scheme& scheme, const Mesh& mesh);

/// Full estimation: tube sampling, C_geo and every derived constant.
ConstantsBundle estimate_constants(const OcpProblem& prob, const DiscreteKkt& dkkt,
                                   const Reconstruction& rec, const TubeSpec& tube,
                                   const CurvatureOptions& options = {}, double C_xp_factor = 1.0);

/// Constants reported for the planar quadrotor at N = 35 (Hermite-Simpson).
namespace paper {
inline constexpr double kCgeo = 53.39;
inline constexpr double kSigmaMin = 1.87e-2;
inline constexpr double kGamma = 979.47;
inline constexpr double kLambda = 1.09;
inline constexpr double kCclose = 59.36;
inline constexpr double kRho = 0.01;
inline constexpr double kM2f = 17.90;
inline constexpr double kL21f = 1.23;
inline constexpr double kAlphaHat = 6.29e-4;
inline constexpr double kE_N2 = 3.27e-14;
inline constexpr double kE_inf = 7.05e-14;
}  // namespace paper

/// Overrides C_geo, Gamma, Lambda and C_close with the reported values. The
/// published set has no C_T, C_quad or C_T', so they are set to 0 and Gamma_tot = Gamma.
void apply_paper_constants(ConstantsBundle& bundle);

}  // namespace ssoc
