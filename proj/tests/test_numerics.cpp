#include "doctest.h"
#include "oracles.hpp"
#include "ssoc/errors.hpp"
#include "ssoc/numerics.hpp"

using namespace ssoc;

TEST_SUITE("numerics") {

TEST_CASE("sym_eig_min on diagonal and identity") {
  CHECK(sym_eig_min(Eigen::Vector3d(3, 1, 2).asDiagonal().toDenseMatrix()) == doctest::Approx(1.0).epsilon(1e-15));
  for (int n : {1, 4, 9}) CHECK(sym_eig_min(DenseMatrix::Identity(n, n)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sym_eig_min agrees with characteristic polynomial roots") {
  for (int trial = 0; trial < 50; ++trial) {
    const DenseMatrix A = oracle::random_symmetric(8);
    CHECK(std::abs(sym_eig_min(A) - oracle::charpoly_min_root(A)) <= 1e-8);
  }
}

TEST_CASE("sym_eig_min rejects asymmetric input") {
  DenseMatrix A = DenseMatrix::Identity(3, 3);
  A(0, 1) = 1e-3;
  CHECK_THROWS_AS(sym_eig_min(A), ContractError);
}

TEST_CASE("orthogonal invariance of the smallest eigenvalue") {
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix A = oracle::random_symmetric(10);
    const DenseMatrix Q = oracle::random_orthogonal(10);
    DenseMatrix B = Q.transpose() * A * Q;
    B = 0.5 * (B + B.transpose()).eval();
    CHECK(std::abs(sym_eig_min(B) - sym_eig_min(A)) <= 1e-9);
  }
}

TEST_CASE("sigma_min examples") {
  CHECK(sigma_min(DenseMatrix::Identity(5, 5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sigma_min(Eigen::Vector2d(2.0, 0.5).asDiagonal().toDenseMatrix()) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sigma_min times explicit inverse norm is one") {
  for (int trial = 0; trial < 50; ++trial) {
    const DenseMatrix A = oracle::random_matrix(8, 8);
    CHECK(std::abs(sigma_min(A) * oracle::inverse_norm(A) - 1.0) <= 1e-8);
  }
}

TEST_CASE("sigma_min equals the square root of the smallest eigenvalue of A^T A") {
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix A = oracle::random_matrix(9, 6);
    DenseMatrix G = A.transpose() * A;
    G = 0.5 * (G + G.transpose()).eval();
    CHECK(std::abs(sigma_min(A) - std::sqrt(sym_eig_min(G))) <= 1e-8);
  }
  CHECK(spectral_norm(DenseMatrix(0, 0)) == 0.0);
}

TEST_CASE("nullspace_basis examples") {
  DenseMatrix J(1, 3);
  J << 1, 0, 0;
  const DenseMatrix Z = nullspace_basis(J);
  REQUIRE(Z.cols() == 2);
  CHECK((Z.transpose() * Z - DenseMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(Z.row(0).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK(nullspace_basis(oracle::random_matrix(4, 4)).cols() == 0);

  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix R = oracle::random_matrix(5, 12);
    const DenseMatrix N = nullspace_basis(R);
    REQUIRE(N.cols() == 7);
    CHECK((R * N).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((N.transpose() * N - DenseMatrix::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("rank-deficient constraint Jacobian raises a constraint-qualification error") {
  DenseMatrix J = oracle::random_matrix(3, 8);
  J.row(2) = 2.0 * J.row(0) - J.row(1);
  CHECK_THROWS_AS(nullspace_basis(J), ConstraintQualificationError);
}

TEST_CASE("indefinite factorization: inertia and solve residual") {
  for (int n : {10, 60, 200, 600}) {
    CAPTURE(n);
    const DenseMatrix A = oracle::random_symmetric(n);
    SymmetricIndefiniteFactorization f(A);
    const Eigen::VectorXd ev = sym_eigenvalues(A);
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) (ev[i] > 0 ? pos : neg)++;
    CHECK(f.inertia().positive == pos);
    CHECK(f.inertia().negative == neg);
    const Eigen::VectorXd b = oracle::random_vector(n);
    const Eigen::VectorXd x = f.solve(b);
    CHECK((A * x - b).norm() / b.norm() <= 1e-10 * std::max(1.0, spectral_norm(A) * x.norm() / b.norm()));
  }
  SymmetricIndefiniteFactorization s(DenseMatrix::Zero(3, 3));
  CHECK(s.singular());
}

}  // TEST_SUITE
