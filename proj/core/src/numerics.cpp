#include "ssoc/numerics.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "ssoc/errors.hpp"

static_assert(sizeof(lapack_int) == sizeof(int), "LP64 LAPACK interface expected");

namespace ssoc {

namespace {

void require_finite(const DenseMatrix& A, const char* what) {
  if (!A.allFinite()) throw ContractError(std::string(what) + ": matrix has non-finite entries");
}

void require_symmetric(const DenseMatrix& A) {
  if (A.rows() != A.cols()) throw ContractError("symmetric kernel called with a non-square matrix");
  require_finite(A, "symmetric kernel");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ContractError("matrix is not symmetric to 1e-10");
}

}  // namespace

Eigen::VectorXd sym_eigenvalues(const DenseMatrix& A) {
  if (A.size() == 0) return Eigen::VectorXd();
  require_symmetric(A);
  const DenseMatrix S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  return es.eigenvalues();
}

double sym_eig_min(const DenseMatrix& A) {
  if (A.size() == 0) throw ContractError("sym_eig_min of an empty matrix");
  return sym_eigenvalues(A)[0];
}

double sigma_min(const DenseMatrix& A) {
  require_finite(A, "sigma_min");
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<DenseMatrix> svd(A);
  return svd.singularValues().minCoeff();
}

double sigma_max(const DenseMatrix& A) {
  require_finite(A, "sigma_max");
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<DenseMatrix> svd(A);
  return svd.singularValues().maxCoeff();
}

double spectral_norm(const DenseMatrix& A) { return sigma_max(A); }

DenseMatrix nullspace_basis(const DenseMatrix& J) {
  require_finite(J, "nullspace_basis");
  const Eigen::Index nc = J.rows(), nz = J.cols();
  if (nc > nz) throw ConstraintQualificationError("more constraints than variables");
  if (nc == 0) return DenseMatrix::Identity(nz, nz);
  const Eigen::VectorXd ev = sym_eigenvalues(J * J.transpose());
  const double top = ev[ev.size() - 1];
  if (!(top > 0.0) || ev[0] <= 1e-10 * top)
    throw ConstraintQualificationError("constraint Jacobian is rank deficient (lambda_min(JJ^T)=" +
                                       std::to_string(ev[0]) + ")");
  Eigen::HouseholderQR<DenseMatrix> qr(J.transpose());
  const DenseMatrix Q = qr.householderQ() * DenseMatrix::Identity(nz, nz);
  return Q.rightCols(nz - nc);
}

SymmetricIndefiniteFactorization::SymmetricIndefiniteFactorization(const DenseMatrix& A)
    : factor_(A) {
  if (A.rows() != A.cols()) throw ContractError("factorization of a non-square matrix");
  require_finite(A, "factorization");
  const auto n = static_cast<lapack_int>(A.rows());
  pivots_.assign(static_cast<std::size_t>(n), 0);
  offdiag_ = Eigen::VectorXd::Zero(n);
  if (n == 0) return;
  const lapack_int info =
      LAPACKE_dsytrf_rk(LAPACK_COL_MAJOR, 'L', n, factor_.data(), n, offdiag_.data(), pivots_.data());
  if (info < 0) throw Error("dsytrf_rk: illegal argument");

  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double tiny = std::numeric_limits<double>::epsilon() * static_cast<double>(n) * scale;
  auto classify = [&](double d) {
    if (std::abs(d) <= tiny) ++inertia_.zero;
    else if (d > 0) ++inertia_.positive;
    else ++inertia_.negative;
  };
  for (lapack_int k = 0; k < n;) {
    if (pivots_[static_cast<std::size_t>(k)] > 0) {
      classify(factor_(k, k));
      k += 1;
    } else {
      const double a = factor_(k, k), b = offdiag_(k), c = factor_(k + 1, k + 1);
      const double mean = 0.5 * (a + c);
      const double rad = std::hypot(0.5 * (a - c), b);
      classify(mean + rad);
      classify(mean - rad);
      k += 2;
    }
  }
}

Eigen::VectorXd SymmetricIndefiniteFactorization::solve(const Eigen::VectorXd& b) const {
  if (b.size() != factor_.rows()) throw DimensionError("solve: right-hand side has wrong size");
  Eigen::VectorXd x = b;
  const auto n = static_cast<lapack_int>(factor_.rows());
  if (n == 0) return x;
  const lapack_int info = LAPACKE_dsytrs_3(LAPACK_COL_MAJOR, 'L', n, 1, factor_.data(), n,
                                           offdiag_.data(), pivots_.data(), x.data(), n);
  if (info != 0) throw Error("dsytrs_3 failed");
  return x;
}

}  // namespace ssoc
