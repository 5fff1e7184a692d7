#pragma once

#include <Eigen/Core>
#include <vector>

namespace ssoc {

using DenseMatrix = Eigen::MatrixXd;

/// Smallest eigenvalue of a symmetric matrix.
/// Throws ContractError if A is not symmetric to 1e-10 (relative to max|A|, floor 1).
double sym_eig_min(const DenseMatrix& A);

/// All eigenvalues of a symmetric matrix, ascending.
Eigen::VectorXd sym_eigenvalues(const DenseMatrix& A);

double sigma_min(const DenseMatrix& A);
double sigma_max(const DenseMatrix& A);

/// Spectral norm; 0 for empty matrices.
double spectral_norm(const DenseMatrix& A);

/**
 * Orthonormal basis of ker(J) for a full-row-rank J (n_c x n_z).
 *
 * Rank is certified by lambda_min(J J^T) > 1e-10 lambda_max(J J^T); otherwise
 * ConstraintQualificationError is thrown.
 */
DenseMatrix nullspace_basis(const DenseMatrix& J);

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

/// Bounded Bunch-Kaufman LDL^T factorization (LAPACK sytrf_rk) of a symmetric, possibly
/// indefinite matrix. Inertia is read off the block-diagonal factor.
class SymmetricIndefiniteFactorization {
 public:
  explicit SymmetricIndefiniteFactorization(const DenseMatrix& A);

  const Inertia& inertia() const { return inertia_; }
  bool singular() const { return inertia_.zero > 0; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  DenseMatrix factor_;
  Eigen::VectorXd offdiag_;
  std::vector<int> pivots_;
  Inertia inertia_;
};

}  // namespace ssoc
