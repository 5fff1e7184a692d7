#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssoc/constants.hpp"
#include "ssoc/numerics.hpp"
#include "ssoc/residuals.hpp"
#include "ssoc/solver.hpp"

namespace ssoc {

inline constexpr const char* kToolVersion = "0.1.0";

struct ReducedCurvature {
  double alpha_hat = 0.0;            // pencil (Z^T W Z, Z^T M Z)
  double alpha_hat_euclidean = 0.0;  // plain eigenvalue of Z^T W Z
  int nullspace_dim = 0;
};

/**
 * Smallest eigenvalue of Z^T W Z v = a Z^T M Z v with Z an orthonormal null-space
 * basis of J. Solved through a Cholesky factor of Z^T M Z.
 * Throws ConstraintQualificationError for rank-deficient J and Error when
 * Z^T M Z is not positive definite.
 */
ReducedCurvature reduced_curvature(const DenseMatrix& W, const DenseMatrix& J, const DenseMatrix& M);

struct AcceptanceTest {
  double lhs = 0.0;        // alpha_hat (1 - C_T E_N2)^2
  double threshold = 0.0;  // Gamma_tot E_N2
  bool accepted_inequality = false;
  bool simplified_used = false;    // C_T E_N2 <= 0.1
  bool simplified_passed = false;  // alpha_hat > Gamma_tot E_N2
  bool stability_lost = false;     // 1 - C_T E_N2 <= 0
  std::string reason;
};

AcceptanceTest acceptance_test(double alpha_hat, const ConstantsBundle& bundle,
                               const ResidualReport& residuals);

struct Proximity {
  double C_close_E_inf = 0.0;
  bool ok = false;
};

struct Provenance {
  std::string problem;
  std::string scheme;
  int intervals = 0;
  double h_max = 0.0;
  std::vector<double> mesh;
  SolveReport solver;
  std::string tool_version = kToolVersion;
  bool paper_constants = false;
  /// Values substituted for computed quantities (e.g. "E_N2"), if any.
  std::map<std::string, double> injected;
};

struct Certificate {
  double alpha_hat = 0.0;
  double alpha_hat_euclidean = 0.0;
  double threshold = 0.0;
  double lhs = 0.0;
  double alpha_cont = 0.0;
  /// alpha_cont / (2 Lambda); +inf when Lambda = 0; absent unless alpha_cont > 0 and
  /// projection stability holds.
  std::optional<double> trust_radius;
  Proximity proximity;
  bool accepted = false;
  bool simplified_test_used = false;
  bool simplified_test_passed = false;
  std::string reason;
  /// Reserved for a switching-structure inflation term; never populated.
  std::optional<double> switch_inflation;
  ResidualReport residuals;
  ConstantsBundle constants;
  Provenance provenance;
};

/// Assembles the verdict. `solver_converged` enters the acceptance rule.
Certificate finalize_certificate(double alpha_hat, const ConstantsBundle& bundle,
                                 const ResidualReport& residuals, const AcceptanceTest& test,
                                 bool solver_converged = true);

}  // namespace ssoc
