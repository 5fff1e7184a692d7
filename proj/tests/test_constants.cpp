#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ssoc/constants.hpp"
#include "ssoc/errors.hpp"

using namespace ssoc;

namespace {

struct Solved {
  OcpProblem prob;
  DiscreteKkt dkkt;
  Reconstruction rec;
};

Solved solved(const std::string& name, int N, Scheme s = Scheme::hermite_simpson()) {
  Solved r{builtin_problem(name), {}, {}};
  auto [d, rep] = solve(r.prob, Mesh::uniform(r.prob.horizon, N), s);
  REQUIRE(rep.converged);
  r.dkkt = d;
  r.rec = reconstruct(r.prob, d);
  return r;
}

const Solved& quadrotor35() {
  static const Solved s = solved("quadrotor", 35);
  return s;
}

std::vector<double> monotone_fields(const CurvatureBounds& b) {
  return {b.L2, b.M2f, b.L21_f, b.L21_L, b.L21_K, b.P_max};
}

}  // namespace

TEST_SUITE("constants") {

TEST_CASE("tube spec validation") {
  TubeSpec t;
  CHECK_NOTHROW(t.validate());
  t.dx = 0.0;
  CHECK_THROWS_AS(t.validate(), ContractError);
  t = {};
  t.samples_per_axis = 1;
  CHECK_THROWS_AS(t.validate(), ContractError);
}

TEST_CASE("quadrotor Legendre constant is lambda_min(R)") {
  const auto& s = quadrotor35();
  const CurvatureBounds b = estimate_curvature_bounds(s.prob, s.rec, TubeSpec{});
  CHECK(b.rho == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(b.safety_factor == 1.5);
  CHECK(b.L21_f == doctest::Approx(1.5 * b.L21_f_raw));
  CHECK(b.A_inf > 0.0);
  CHECK(b.B_inf > 0.0);
}

// Known gap: the sampled dynamics Hessian bound and its Lipschitz constant differ from the reported values.
TEST_CASE("quadrotor M2f and L21_f near the reported values" * doctest::may_fail()) {
  const auto& s = quadrotor35();
  const CurvatureBounds b = estimate_curvature_bounds(s.prob, s.rec, TubeSpec{});
  CHECK(std::abs(b.M2f - paper::kM2f) <= 0.10 * paper::kM2f);
  CHECK(std::abs(b.L21_f - paper::kL21f) <= 0.25 * paper::kL21f);
}

TEST_CASE("LQ Lipschitz constants vanish") {
  const Solved s = solved("double-integrator-lq", 10);
  const CurvatureBounds b = estimate_curvature_bounds(s.prob, s.rec, TubeSpec{});
  CHECK(b.L21_f == 0.0);
  CHECK(b.L21_L == 0.0);
  CHECK(b.L21_K == 0.0);
  CHECK(b.rho == doctest::Approx(1.0));
}

TEST_CASE("Legendre violation aborts") {
  Solved s = solved("double-integrator-lq", 6);
  OcpProblem concave = s.prob;
  concave.running_cost = [](const AdScalar2&, AdSpan x, AdSpan u) {
    return 0.5 * (x[0] * x[0] + x[1] * x[1]) - 0.5 * u[0] * u[0];
  };
  CHECK_THROWS_AS(estimate_curvature_bounds(concave, s.rec, TubeSpec{}), LegendreError);
}

TEST_CASE("C_geo from synthetic matrices") {
  const GeometryEstimate g = estimate_C_geo_from_matrix(DenseMatrix::Identity(6, 6));
  CHECK(g.C_geo == doctest::Approx(2.0).epsilon(1e-15));
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix B = oracle::random_matrix(7, 7);
    const DenseMatrix spd = B.transpose() * B + 0.1 * DenseMatrix::Identity(7, 7);
    const GeometryEstimate e = estimate_C_geo_from_matrix(spd);
    CHECK(e.C_geo * e.sigma_min_Mh == doctest::Approx(2.0).epsilon(1e-14));
  }
  DenseMatrix singular = DenseMatrix::Identity(3, 3);
  singular(2, 2) = 0.0;
  CHECK_THROWS_AS(estimate_C_geo_from_matrix(singular), StrongRegularityError);
}

TEST_CASE("discrete KKT matrix shape and C_geo on the LQ builtin") {
  const Solved s = solved("double-integrator-lq", 8);
  const DenseMatrix M = discrete_kkt_matrix(s.prob, s.dkkt);
  CHECK(M.rows() == s.dkkt.layout.n_z() + s.dkkt.layout.n_c());
  CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  const GeometryEstimate g = estimate_C_geo(s.prob, s.dkkt);
  CHECK(g.C_geo == doctest::Approx(2.0 / sigma_min(M)));
}

TEST_CASE("C_T formula") {
  ConstantsBundle b;
  b.rho = 0.01;
  CHECK(compute_C_T(b, Scheme::hermite_simpson(), 3.0) == doctest::Approx(2.0));
  b.A_inf = 1.0;
  b.B_inf = 0.01;
  CHECK(compute_C_T(b, Scheme::trapezoidal(), 1.0) == doctest::Approx(4.0 * std::exp(1.0)).epsilon(1e-14));
  CHECK(compute_C_T(b, Scheme::trapezoidal(), 1.0) == doctest::Approx(10.873).epsilon(1e-4));
}

TEST_CASE("quadrature and conformity constants scale with the mesh") {
  ConstantsBundle b;
  b.rho = 0.5;
  b.A_inf = 0.7;
  b.B_inf = 0.3;
  b.L2 = 4.0;
  b.L21_H = 0.0;
  const Scheme hs = Scheme::hermite_simpson();
  CHECK(compute_quadrature_and_conformity(b, hs, Mesh::uniform(1.0, 10)).C_quad == 0.0);
  b.L21_H = 2.0;
  const auto coarse = compute_quadrature_and_conformity(b, hs, Mesh::uniform(1.0, 10));
  const auto fine = compute_quadrature_and_conformity(b, hs, Mesh::uniform(1.0, 20));
  CHECK(fine.C_quad == doctest::Approx(coarse.C_quad / 4.0).epsilon(1e-14));
  CHECK(fine.C_Tprime == doctest::Approx(coarse.C_Tprime / 8.0).epsilon(1e-14));
  const auto tc = compute_quadrature_and_conformity(b, Scheme::trapezoidal(), Mesh::uniform(1.0, 10));
  const auto tf = compute_quadrature_and_conformity(b, Scheme::trapezoidal(), Mesh::uniform(1.0, 20));
  CHECK(tf.C_Tprime == doctest::Approx(tc.C_Tprime / 2.0).epsilon(1e-14));
  const double G = std::exp(0.7) * (1.0 + 0.3 / 0.5);
  CHECK(coarse.C_quad == doctest::Approx(0.01 / 12.0 * 2.0 * G * G).epsilon(1e-14));
  CHECK(coarse.C_Tprime == doctest::Approx(2.0 * 4.0 * 1e-3).epsilon(1e-14));
}

TEST_CASE("Lambda formula") {
  ConstantsBundle b;
  b.C_int = 2.0;
  CHECK(compute_Lambda(b) == 0.0);
  b.L21_L = 1.0;
  b.P_max = 2.0;
  b.L21_f = 0.5;
  b.M2f = 1.0;
  b.L21_K = 0.0;
  b.rho = 1.0;
  derive_constants(b, Scheme::hermite_simpson(), Mesh::uniform(2.0, 4));
  CHECK(b.C_int == 2.0);
  CHECK(b.L21_H == 2.0);
  CHECK(b.Lambda == 6.0);
}

TEST_CASE("C_close formula and monotonicity in rho") {
  ConstantsBundle b;
  b.C_geo = 1.0;
  b.rho = 1.0;
  const CloseConstants c = compute_C_close(b, 1.0);
  CHECK(c.C_xp_inf == doctest::Approx(2.0));
  CHECK(c.C_u_inf == doctest::Approx(1.0));
  CHECK(c.C_close_inf == doctest::Approx(3.0));
  b.Hux_inf = 0.4;
  b.Hup_inf = 0.2;
  double prev = std::numeric_limits<double>::infinity();
  for (double rho : {0.1, 0.5, 1.0, 4.0}) {
    b.rho = rho;
    const double cu = compute_C_close(b, 1.0).C_u_inf;
    CHECK(cu < prev);
    prev = cu;
  }
}

TEST_CASE("derived constants recompose from their summands") {
  const auto& s = quadrotor35();
  const ConstantsBundle b = estimate_constants(s.prob, s.dkkt, s.rec, TubeSpec{});
  CHECK(b.Gamma == b.C_geo * b.L2);
  CHECK(b.Gamma_tot == b.Gamma + b.C_quad + b.C_Tprime);
  CHECK(b.Lambda == b.C_int * (b.L21_H + b.M2f) + 2.0 * b.L21_K);
  CHECK(b.L21_H == b.L21_L + b.P_max * b.L21_f);
  CHECK(b.C_close_inf == b.C_xp_inf + b.C_u_inf);
  CHECK(std::isfinite(b.C_T));
  CHECK(b.C_T > 0.0);
  CHECK(b.formulas.count("Lambda") == 1);
  CHECK(b.source == "estimated");
}

// Known gap: with the estimated growth bound for the quadrotor, C_quad dwarfs Gamma.
TEST_CASE("quadrotor Gamma_tot is within 5% of Gamma" * doctest::may_fail()) {
  const auto& s = quadrotor35();
  const ConstantsBundle b = estimate_constants(s.prob, s.dkkt, s.rec, TubeSpec{});
  CHECK(std::abs(b.Gamma_tot - b.Gamma) <= 0.05 * b.Gamma);
}

TEST_CASE("enlarging the tube never decreases the sup estimates") {
  const auto& s = quadrotor35();
  TubeSpec small;
  const auto base = monotone_fields(estimate_curvature_bounds(s.prob, s.rec, small));
  for (int axis = 0; axis < 3; ++axis) {
    TubeSpec big = small;
    (axis == 0 ? big.dx : axis == 1 ? big.du : big.dp) = 0.2;
    const auto grown = monotone_fields(estimate_curvature_bounds(s.prob, s.rec, big));
    for (std::size_t i = 0; i < base.size(); ++i) {
      CAPTURE(axis);
      CAPTURE(i);
      CHECK(grown[i] >= base[i] - 1e-12);
    }
  }
}

TEST_CASE("refining the sampling grid changes constants by at most 20% and never lowers them") {
  const auto& s = quadrotor35();
  TubeSpec coarse;
  TubeSpec fine;
  fine.samples_per_axis = 2 * coarse.samples_per_axis;
  fine.time_samples = 2 * 4 * 35;
  const auto a = monotone_fields(estimate_curvature_bounds(s.prob, s.rec, coarse));
  const auto b = monotone_fields(estimate_curvature_bounds(s.prob, s.rec, fine));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(i);
    CHECK(b[i] >= a[i] - 1e-12);
    CHECK(std::abs(b[i] - a[i]) <= 0.2 * std::max(a[i], 1e-300));
  }
}

TEST_CASE("published constants override") {
  ConstantsBundle b;
  b.C_T = 5.0;
  apply_paper_constants(b);
  CHECK(b.C_geo == 53.39);
  CHECK(b.Gamma == 979.47);
  CHECK(b.Gamma_tot == 979.47);
  CHECK(b.Lambda == 1.09);
  CHECK(b.C_close_inf == 59.36);
  CHECK(b.C_T == 0.0);
  CHECK(b.source == "published");
}

}  // TEST_SUITE
