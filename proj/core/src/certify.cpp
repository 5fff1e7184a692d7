#include "ssoc/certify.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "ssoc/errors.hpp"

namespace ssoc {

ReducedCurvature reduced_curvature(const DenseMatrix& W, const DenseMatrix& J, const DenseMatrix& M) {
  const Eigen::Index nz = W.rows();
  if (W.cols() != nz || J.cols() != nz || M.rows() != nz || M.cols() != nz)
    throw DimensionError("reduced_curvature: inconsistent dimensions");
  const DenseMatrix Z = nullspace_basis(J);
  ReducedCurvature out;
  out.nullspace_dim = static_cast<int>(Z.cols());
  if (Z.cols() == 0) throw ContractError("reduced_curvature: null space is trivial");

  DenseMatrix reduced = Z.transpose() * W * Z;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  DenseMatrix mass = Z.transpose() * M * Z;
  mass = 0.5 * (mass + mass.transpose()).eval();

  Eigen::LLT<DenseMatrix> llt(mass);
  if (llt.info() != Eigen::Success) throw Error("reduced_curvature: Z^T M Z is not positive definite");
  // L^{-1} (Z^T W Z) L^{-T}
  DenseMatrix tmp = llt.matrixL().solve(reduced);
  DenseMatrix transformed = llt.matrixL().solve(tmp.transpose());
  transformed = 0.5 * (transformed + transformed.transpose()).eval();
  out.alpha_hat = sym_eig_min(transformed);
  out.alpha_hat_euclidean = sym_eig_min(reduced);
  return out;
}

AcceptanceTest acceptance_test(double alpha_hat, const ConstantsBundle& bundle,
                               const ResidualReport& residuals) {
  AcceptanceTest t;
  const double E = residuals.E_N2;
  const double drift = bundle.C_T * E;
  const double q = 1.0 - drift;
  t.lhs = alpha_hat * q * q;
  t.threshold = bundle.Gamma_tot * E;
  t.simplified_used = drift <= 0.1;
  t.simplified_passed = alpha_hat > t.threshold;
  if (!(q > 0.0)) {
    t.stability_lost = true;
    t.accepted_inequality = false;
    t.reason = "projection stability lost";
    return t;
  }
  t.accepted_inequality = t.lhs > t.threshold;
  t.reason = t.accepted_inequality ? "curvature exceeds residual threshold"
                                   : "curvature below residual threshold";
  return t;
}

Certificate finalize_certificate(double alpha_hat, const ConstantsBundle& bundle,
                                 const ResidualReport& residuals, const AcceptanceTest& test,
                                 bool solver_converged) {
  Certificate c;
  c.alpha_hat = alpha_hat;
  c.lhs = test.lhs;
  c.threshold = test.threshold;
  c.alpha_cont = test.lhs - test.threshold;
  c.simplified_test_used = test.simplified_used;
  c.simplified_test_passed = test.simplified_passed;
  c.residuals = residuals;
  c.constants = bundle;
  c.reason = test.reason;

  // With 1 - C_T E_N2 <= 0 the squared factor no longer measures anything, so no radius is issued.
  if (c.alpha_cont > 0.0 && !test.stability_lost) {
    c.trust_radius = bundle.Lambda > 0.0 ? c.alpha_cont / (2.0 * bundle.Lambda)
                                         : std::numeric_limits<double>::infinity();
  }
  c.proximity.C_close_E_inf = bundle.C_close_inf * residuals.E_inf;
  c.proximity.ok = c.trust_radius.has_value() && c.proximity.C_close_E_inf <= *c.trust_radius;

  c.accepted = test.accepted_inequality && c.alpha_cont > 0.0 && solver_converged && bundle.rho > 0.0;
  if (!solver_converged) c.reason = "solver did not converge";
  else if (!(bundle.rho > 0.0)) c.reason = "Legendre condition fails";
  else if (test.accepted_inequality && !(c.alpha_cont > 0.0)) c.reason = "transferred curvature not positive";
  return c;
}

}  // namespace ssoc
