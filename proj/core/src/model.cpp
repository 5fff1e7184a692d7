#include "ssoc/model.hpp"

#include <cmath>

#include "ssoc/errors.hpp"

namespace ssoc {

namespace {

void check_dim(const Eigen::VectorXd& v, int expected, const char* what) {
  if (v.size() != expected)
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(v.size()));
}

AdVector constants(const Eigen::VectorXd& v) {
  AdVector r;
  r.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) r.emplace_back(v[i]);
  return r;
}

AdVector variables(const Eigen::VectorXd& v, std::size_t offset, std::size_t seeds) {
  AdVector r;
  r.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    r.push_back(AdScalar2::variable(v[i], offset + static_cast<std::size_t>(i), seeds));
  return r;
}

void check_finite(double v, double t, const std::string& component) {
  if (!std::isfinite(v)) throw EvaluationDomainError(t, component);
}

Eigen::VectorXd gradient_of(const AdScalar2& a, int d) {
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) g[i] = a.grad(static_cast<std::size_t>(i));
  return g;
}

Eigen::MatrixXd hessian_of(const AdScalar2& a, int d) {
  Eigen::MatrixXd h(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = a.hess(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      h(i, j) = v;
      h(j, i) = v;
    }
  return h;
}

}  // namespace

void OcpProblem::validate() const {
  if (n <= 0 || m <= 0) throw ContractError("problem '" + name + "': n and m must be positive");
  if (n_b < 0) throw ContractError("problem '" + name + "': n_b must be non-negative");
  if (!(horizon > 0.0)) throw ContractError("problem '" + name + "': horizon must be positive");
  if (!dynamics || !running_cost || !endpoint_cost)
    throw ContractError("problem '" + name + "': missing callback");
  if (n_b > 0 && !boundary)
    throw ContractError("problem '" + name + "': n_b > 0 requires a boundary map");
  if (initial_state && initial_state->size() != n)
    throw ContractError("problem '" + name + "': initial state has wrong dimension");
}

Eigen::VectorXd eval_dynamics(const OcpProblem& prob, double t, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u) {
  check_dim(x, prob.n, "state");
  check_dim(u, prob.m, "control");
  const AdVector xs = constants(x), us = constants(u);
  const AdVector f = prob.dynamics(AdScalar2(t), xs, us);
  if (static_cast<int>(f.size()) != prob.n) throw DimensionError("dynamics returned wrong dimension");
  Eigen::VectorXd r(prob.n);
  for (int i = 0; i < prob.n; ++i) {
    r[i] = f[static_cast<std::size_t>(i)].value();
    check_finite(r[i], t, "f[" + std::to_string(i) + "]");
  }
  return r;
}

double eval_running_cost(const OcpProblem& prob, double t, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u) {
  check_dim(x, prob.n, "state");
  check_dim(u, prob.m, "control");
  const AdVector xs = constants(x), us = constants(u);
  const double v = prob.running_cost(AdScalar2(t), xs, us).value();
  check_finite(v, t, "L");
  return v;
}

PointDerivatives eval_point(const OcpProblem& prob, double t, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& u) {
  check_dim(x, prob.n, "state");
  check_dim(u, prob.m, "control");
  const int n = prob.n, m = prob.m, d = n + m;
  const auto seeds = static_cast<std::size_t>(d);
  const AdVector xs = variables(x, 0, seeds);
  const AdVector us = variables(u, static_cast<std::size_t>(n), seeds);
  const AdScalar2 ts(t);

  const AdVector f = prob.dynamics(ts, xs, us);
  if (static_cast<int>(f.size()) != n) throw DimensionError("dynamics returned wrong dimension");
  const AdScalar2 L = prob.running_cost(ts, xs, us);

  PointDerivatives out;
  out.f.resize(n);
  out.f_x.resize(n, n);
  out.f_u.resize(n, m);
  out.f_hessian.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& fi = f[static_cast<std::size_t>(i)];
    out.f[i] = fi.value();
    check_finite(fi.value(), t, "f[" + std::to_string(i) + "]");
    const Eigen::VectorXd g = gradient_of(fi, d);
    out.f_x.row(i) = g.head(n).transpose();
    out.f_u.row(i) = g.tail(m).transpose();
    out.f_hessian.push_back(hessian_of(fi, d));
    if (!out.f_hessian.back().allFinite()) throw EvaluationDomainError(t, "hessian of f[" + std::to_string(i) + "]");
  }
  out.L = L.value();
  check_finite(out.L, t, "L");
  out.L_grad = gradient_of(L, d);
  out.L_hessian = hessian_of(L, d);
  if (!out.f_x.allFinite() || !out.f_u.allFinite() || !out.L_grad.allFinite() ||
      !out.L_hessian.allFinite())
    throw EvaluationDomainError(t, "derivatives of f or L");
  return out;
}

HamiltonianEval hamiltonian_from(const PointDerivatives& d, const Eigen::VectorXd& p, int n,
                                 int m) {
  HamiltonianEval h;
  h.H = d.L + p.dot(d.f);
  Eigen::VectorXd grad = d.L_grad;
  Eigen::MatrixXd hess = d.L_hessian;
  grad.head(n) += d.f_x.transpose() * p;
  grad.tail(m) += d.f_u.transpose() * p;
  for (int i = 0; i < n; ++i) hess += p[i] * d.f_hessian[static_cast<std::size_t>(i)];
  h.H_x = grad.head(n);
  h.H_u = grad.tail(m);
  h.H_xx = hess.topLeftCorner(n, n);
  h.H_uu = hess.bottomRightCorner(m, m);
  h.H_ux = hess.bottomLeftCorner(m, n);
  h.H_up = d.f_u.transpose();
  return h;
}

HamiltonianEval eval_hamiltonian(const OcpProblem& prob, double t, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  check_dim(p, prob.n, "costate");
  const PointDerivatives d = eval_point(prob, t, x, u);
  HamiltonianEval h = hamiltonian_from(d, p, prob.n, prob.m);
  if (!std::isfinite(h.H) || !h.H_x.allFinite() || !h.H_u.allFinite())
    throw EvaluationDomainError(t, "hamiltonian");
  return h;
}

EndpointEval eval_endpoint_terms(const OcpProblem& prob, const Eigen::VectorXd& x0,
                                 const Eigen::VectorXd& xT, const Eigen::VectorXd& lambda) {
  const int n = prob.n, nb = prob.n_b, d = 2 * n;
  check_dim(x0, n, "initial state");
  check_dim(xT, n, "terminal state");
  check_dim(lambda, nb, "boundary multiplier");
  const auto seeds = static_cast<std::size_t>(d);
  const AdVector a = variables(x0, 0, seeds);
  const AdVector b = variables(xT, static_cast<std::size_t>(n), seeds);

  EndpointEval out;
  const AdScalar2 K = prob.endpoint_cost(a, b);
  out.K = K.value();
  const Eigen::VectorXd kg = gradient_of(K, d);
  out.K_x0 = kg.head(n);
  out.K_xT = kg.tail(n);
  out.K_hessian = hessian_of(K, d);
  out.lagrangian_hessian = out.K_hessian;

  out.b.resize(nb);
  out.b_x0.resize(nb, n);
  out.b_xT.resize(nb, n);
  if (nb > 0) {
    const AdVector bv = prob.boundary(a, b);
    if (static_cast<int>(bv.size()) != nb) throw DimensionError("boundary map returned wrong dimension");
    for (int i = 0; i < nb; ++i) {
      const auto& bi = bv[static_cast<std::size_t>(i)];
      out.b[i] = bi.value();
      const Eigen::VectorXd g = gradient_of(bi, d);
      out.b_x0.row(i) = g.head(n).transpose();
      out.b_xT.row(i) = g.tail(n).transpose();
      out.b_hessian.push_back(hessian_of(bi, d));
      out.lagrangian_hessian += lambda[i] * out.b_hessian.back();
    }
  }
  if (!std::isfinite(out.K) || !out.K_hessian.allFinite() || !out.b.allFinite())
    throw EvaluationDomainError(prob.horizon, "endpoint terms");
  return out;
}

}  // namespace ssoc
