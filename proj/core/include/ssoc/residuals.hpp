#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ssoc/model.hpp"
#include "ssoc/reconstruction.hpp"

namespace ssoc {

struct IntervalResidual {
  int interval = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  double dyn_L2 = 0.0;   // |X' - f|_{L2(t0,t1)}
  double stat_L2 = 0.0;  // |H_u|_{L2(t0,t1)}
  double adj_L2 = 0.0;   // |-P' - H_x|_{L2(t0,t1)}

  double squared_sum() const { return dyn_L2 * dyn_L2 + stat_L2 * stat_L2; }
};

/**
 * Continuous KKT residuals of a reconstruction.
 *
 * L2 terms use composite Gauss-Legendre quadrature on every mesh interval,
 * split at the breakpoints of X, U and P; L-infinity terms take the max over
 * the quadrature points and 20 uniform samples per interval.
 */
struct ResidualReport {
  double e_dyn_L2 = 0.0;
  double e_stat_L2 = 0.0;
  double e_adj_L2 = 0.0;
  /// |b(X(0), X(T))| + |X(0) - x0|
  double e_bc = 0.0;
  /// e_dyn_L2 + e_stat_L2 + e_bc
  double E_N2 = 0.0;

  double e_dyn_inf = 0.0;
  double e_adj_inf = 0.0;
  double e_stat_inf = 0.0;
  /// |F4| + |X(0) - x0| + |F5| + |F6| (F6 vanishes when x(0) is fixed)
  double e_bc_kkt = 0.0;
  /// e_dyn_inf + e_adj_inf + e_stat_inf + e_bc_kkt (includes the adjoint residual)
  double E_inf = 0.0;
  /// e_dyn_inf + e_stat_inf + e_bc (diagnostic indicator without the adjoint)
  double E_inf_diag = 0.0;

  /// |X(0) - x0| + |X(T) - x_f|_K, only for problems with a terminal target.
  double e_bc_weighted = 0.0;

  /// Residuals of the discrete point values at the collocation points.
  double node_dyn_inf = 0.0;
  double node_stat_inf = 0.0;
  /// Quadrature-weighted node analogue of E_N2.
  double E_N2_nodes = 0.0;

  std::vector<IntervalResidual> per_interval;
  int quad_points = 5;
  int uniform_samples = 20;
  std::string quadrature = "gauss-legendre";
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int points, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Throws ContractError when quad_points_per_interval < 3.
ResidualReport compute_residuals(const OcpProblem& prob, const Reconstruction& rec,
                                 int quad_points_per_interval = 5);

/// E_N2 <= sqrt(T) E_inf_diag + e_bc + 1e-12.
bool residual_relation_check(const ResidualReport& report, double horizon);

/// ceil(q N) interval indices ordered by descending local squared residual; ties by index.
std::vector<int> worst_intervals(const ResidualReport& report, double fraction);

}  // namespace ssoc
