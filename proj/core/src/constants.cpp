#include "ssoc/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssoc/errors.hpp"
#include "ssoc/parallel.hpp"

namespace ssoc {

void TubeSpec::validate() const {
  if (!(dx > 0.0 && du > 0.0 && dp > 0.0)) throw ContractError("tube radii must be positive");
  if (samples_per_axis < 2) throw ContractError("tube samples_per_axis must be at least 2");
  if (time_samples < 0) throw ContractError("tube time_samples must be non-negative");
}

namespace {

std::vector<double> axis_offsets(double radius, int samples) {
  std::vector<double> out;
  for (int i = 0; i < samples; ++i) {
    const double v = -radius + 2.0 * radius * i / (samples - 1);
    if (std::abs(v) > 1e-15 * radius) out.push_back(v);
  }
  return out;
}

double max_hessian_norm(const PointDerivatives& d) {
  double v = 0.0;
  for (const auto& H : d.f_hessian) v = std::max(v, spectral_norm(H));
  return v;
}

double max_hessian_diff(const PointDerivatives& a, const PointDerivatives& b) {
  double v = 0.0;
  for (std::size_t i = 0; i < a.f_hessian.size(); ++i)
    v = std::max(v, spectral_norm(a.f_hessian[i] - b.f_hessian[i]));
  return v;
}

struct Partial {
  double L2 = 0.0, M2f = 0.0, L21_f = 0.0, L21_L = 0.0;
  double rho = std::numeric_limits<double>::infinity();
  double A = 0.0, B = 0.0, P = 0.0, Hux = 0.0, Hup = 0.0;
  int samples = 0;
};

}  // namespace

CurvatureBounds estimate_curvature_bounds(const OcpProblem& prob, const Reconstruction& rec,
                                          const TubeSpec& tube, const CurvatureOptions& options) {
  tube.validate();
  if (!(options.safety_factor >= 1.0)) throw ContractError("safety factor must be >= 1");
  const int n = prob.n, m = prob.m;
  const double T = rec.layout.mesh().horizon();
  const int M = tube.time_samples > 0 ? tube.time_samples : 4 * rec.layout.mesh().intervals();
  const std::vector<double> off_x = axis_offsets(tube.dx, tube.samples_per_axis);
  const std::vector<double> off_u = axis_offsets(tube.du, tube.samples_per_axis);
  const std::vector<double> off_p = axis_offsets(tube.dp, tube.samples_per_axis);

  std::vector<Partial> parts(static_cast<std::size_t>(M + 1));
  parallel_for(M + 1, [&](int j) {
    Partial& r = parts[static_cast<std::size_t>(j)];
    const double t = j == M ? T : T * j / M;
    const Eigen::VectorXd x = rec.X.eval(t), u = rec.U.eval(t), p = rec.P.eval(t);

    auto absorb = [&](const PointDerivatives& d, const Eigen::VectorXd& costate) {
      const double f2 = max_hessian_norm(d);
      r.M2f = std::max(r.M2f, f2);
      r.L2 = std::max({r.L2, f2, spectral_norm(d.L_hessian)});
      const HamiltonianEval h = hamiltonian_from(d, costate, n, m);
      r.rho = std::min(r.rho, sym_eig_min(h.H_uu));
      r.Hux = std::max(r.Hux, spectral_norm(h.H_ux));
      r.Hup = std::max(r.Hup, spectral_norm(h.H_up));
      ++r.samples;
    };
    auto at = [&](int axis, double delta) {
      Eigen::VectorXd xs = x, us = u;
      if (axis < n) xs(axis) += delta;
      else us(axis - n) += delta;
      return eval_point(prob, t, xs, us);
    };

    const PointDerivatives center = eval_point(prob, t, x, u);
    absorb(center, p);
    r.A = spectral_norm(center.f_x);
    r.B = spectral_norm(center.f_u);
    r.P = p.norm();
    for (int axis = 0; axis < n + m; ++axis) {
      const double radius = axis < n ? tube.dx : tube.du;
      for (double delta : axis < n ? off_x : off_u) absorb(at(axis, delta), p);
      for (double sign : {-1.0, 1.0}) {
        const PointDerivatives d = at(axis, sign * 0.5 * radius);
        r.L21_f = std::max(r.L21_f, max_hessian_diff(d, center) / (0.5 * radius));
        r.L21_L = std::max(r.L21_L, spectral_norm(d.L_hessian - center.L_hessian) / (0.5 * radius));
      }
    }
    for (int axis = 0; axis < n; ++axis) {
      for (double delta : off_p) {
        Eigen::VectorXd ps = p;
        ps(axis) += delta;
        absorb(center, ps);
      }
    }
  });

  CurvatureBounds out;
  out.safety_factor = options.safety_factor;
  out.rho = std::numeric_limits<double>::infinity();
  for (const Partial& r : parts) {
    out.L2 = std::max(out.L2, r.L2);
    out.M2f = std::max(out.M2f, r.M2f);
    out.L21_f_raw = std::max(out.L21_f_raw, r.L21_f);
    out.L21_L_raw = std::max(out.L21_L_raw, r.L21_L);
    out.rho = std::min(out.rho, r.rho);
    out.A_inf = std::max(out.A_inf, r.A);
    out.B_inf = std::max(out.B_inf, r.B);
    out.P_max = std::max(out.P_max, r.P);
    out.Hux_inf = std::max(out.Hux_inf, r.Hux);
    out.Hup_inf = std::max(out.Hup_inf, r.Hup);
    out.samples += r.samples;
  }
  out.P_max += tube.dp;

  // Endpoint Lagrangian K + lambda^T b around (X(0), X(T)).
  const Eigen::VectorXd x0 = rec.X.eval(0.0), xT = rec.X.eval(T);
  auto endpoint_hessian = [&](int axis, double delta) {
    Eigen::VectorXd a = x0, b = xT;
    if (axis >= 0) (axis < n ? a(axis) : b(axis - n)) += delta;
    return eval_endpoint_terms(prob, a, b, rec.lambda).lagrangian_hessian;
  };
  const Eigen::MatrixXd K0 = endpoint_hessian(-1, 0.0);
  out.L2 = std::max(out.L2, spectral_norm(K0));
  ++out.samples;
  for (int axis = 0; axis < 2 * n; ++axis) {
    for (double delta : off_x) {
      out.L2 = std::max(out.L2, spectral_norm(endpoint_hessian(axis, delta)));
      ++out.samples;
    }
    for (double sign : {-1.0, 1.0}) {
      const double step = 0.5 * tube.dx;
      out.L21_K_raw =
          std::max(out.L21_K_raw, spectral_norm(endpoint_hessian(axis, sign * step) - K0) / step);
    }
  }

  out.L21_f = options.safety_factor * out.L21_f_raw;
  out.L21_L = options.safety_factor * out.L21_L_raw;
  out.L21_K = options.safety_factor * out.L21_K_raw;
  if (options.require_legendre && !(out.rho > 0.0))
    throw LegendreError("strengthened Legendre condition fails on the tube: min eig H_uu = " +
                        std::to_string(out.rho));
  return out;
}

DenseMatrix discrete_kkt_matrix(const OcpProblem& prob, const DiscreteKkt& dkkt) {
  const NlpEvaluation ev = evaluate_nlp(prob, dkkt.layout, dkkt.z, dkkt.y, true);
  const Eigen::Index nz = ev.hessian.rows(), nc = ev.jacobian.rows();
  DenseMatrix K = DenseMatrix::Zero(nz + nc, nz + nc);
  K.topLeftCorner(nz, nz) = DenseMatrix(ev.hessian);
  const DenseMatrix J(ev.jacobian);
  K.topRightCorner(nz, nc) = J.transpose();
  K.bottomLeftCorner(nc, nz) = J;
  return K;
}

GeometryEstimate estimate_C_geo_from_matrix(const DenseMatrix& Mh, double lifting_norm,
                                            double restriction_norm) {
  GeometryEstimate g;
  g.lifting_norm = lifting_norm;
  g.restriction_norm = restriction_norm;
  g.sigma_min_Mh = sigma_min(Mh);
  g.norm_Mh = sigma_max(Mh);
  if (!(g.sigma_min_Mh > 1e-12 * g.norm_Mh))
    throw StrongRegularityError("discrete KKT matrix is numerically singular (sigma_min = " +
                                std::to_string(g.sigma_min_Mh) + ")");
  g.C_geo = lifting_norm * restriction_norm / g.sigma_min_Mh;
  return g;
}

GeometryEstimate estimate_C_geo(const OcpProblem& prob, const DiscreteKkt& dkkt) {
  if (!dkkt.converged) throw ContractError("C_geo needs a converged discrete solution");
  return estimate_C_geo_from_matrix(discrete_kkt_matrix(prob, dkkt));
}

double compute_C_T(const ConstantsBundle& b, const Scheme& scheme, double horizon) {
  if (!(b.rho > 0.0)) throw LegendreError("C_T needs rho > 0");
  return scheme.lebesgue * std::exp(b.A_inf * horizon) * (1.0 + b.B_inf / b.rho);
}

QuadratureConformity compute_quadrature_and_conformity(const ConstantsBundle& b,
                                                       const Scheme& scheme, const Mesh& mesh) {
  if (!(b.rho > 0.0)) throw LegendreError("C_quad needs rho > 0");
  const double h = mesh.max_step();
  const double growth = std::exp(b.A_inf * mesh.horizon()) * (1.0 + b.B_inf / b.rho);
  QuadratureConformity q;
  q.C_quad = h * h / 12.0 * b.L21_H * growth * growth;
  q.C_Tprime = scheme.lebesgue * b.L2 * std::pow(h, scheme.degree);
  return q;
}

double compute_Lambda(const ConstantsBundle& b) {
  return b.C_int * (b.L21_H + b.M2f) + 2.0 * b.L21_K;
}

CloseConstants compute_C_close(const ConstantsBundle& b, double horizon) {
  if (!(b.rho > 0.0)) throw LegendreError("C_close needs rho > 0");
  CloseConstants c;
  c.C_xp_inf = b.C_xp_factor * b.C_geo * (1.0 + horizon) * std::exp((b.A_inf + b.B_inf) * horizon);
  c.C_u_inf = (b.Hux_inf + b.Hup_inf) * c.C_xp_inf / b.rho + 1.0 / b.rho;
  c.C_close_inf = c.C_xp_inf + c.C_u_inf;
  return c;
}

std::map<std::string, std::string> constant_formulas() {
  return {
      {"L21_H", "L21_L + P_max * L21_f"},
      {"C_int", "max(T, 1)"},
      {"C_geo", "lifting_norm * restriction_norm / sigma_min(M_h)"},
      {"C_T", "c_Pi * exp(A_inf * T) * (1 + B_inf / rho)"},
      {"C_quad", "h_max^2 / 12 * L21_H * G^2, G = exp(A_inf * T) * (1 + B_inf / rho)"},
      {"C_Tprime", "c_Pi * L2 * h_max^p"},
      {"Gamma", "C_geo * L2"},
      {"Gamma_tot", "Gamma + C_quad + C_Tprime"},
      {"Lambda", "C_int * (L21_H + M2f) + 2 * L21_K"},
      {"C_xp_inf", "C_xp_factor * C_geo * (1 + T) * exp((A_inf + B_inf) * T)"},
      {"C_u_inf", "(Hux_inf + Hup_inf) * C_xp_inf / rho + 1 / rho"},
      {"C_close_inf", "C_xp_inf + C_u_inf"},
      {"L21", "safety_factor * max difference quotient of sampled Hessians at half-radius"},
  };
}

void derive_constants(ConstantsBundle& b, const Scheme& scheme, const Mesh& mesh) {
  const double T = mesh.horizon();
  b.c_Pi = scheme.lebesgue;
  b.degree = scheme.degree;
  b.h_max = mesh.max_step();
  b.C_int = std::max(T, 1.0);
  b.L21_H = b.L21_L + b.P_max * b.L21_f;
  b.C_T = compute_C_T(b, scheme, T);
  const QuadratureConformity q = compute_quadrature_and_conformity(b, scheme, mesh);
  b.C_quad = q.C_quad;
  b.C_Tprime = q.C_Tprime;
  b.Gamma = b.C_geo * b.L2;
  b.Gamma_tot = b.Gamma + b.C_quad + b.C_Tprime;
  b.Lambda = compute_Lambda(b);
  const CloseConstants c = compute_C_close(b, T);
  b.C_xp_inf = c.C_xp_inf;
  b.C_u_inf = c.C_u_inf;
  b.C_close_inf = c.C_close_inf;
  b.formulas = constant_formulas();
}

ConstantsBundle estimate_constants(const OcpProblem& prob, const DiscreteKkt& dkkt,
                                   const Reconstruction& rec, const TubeSpec& tube,
                                   const CurvatureOptions& options, double C_xp_factor) {
  if (!(C_xp_factor > 0.0)) throw ContractError("C_xp factor must be positive");
  const CurvatureBounds cb = estimate_curvature_bounds(prob, rec, tube, options);
  const GeometryEstimate geo = estimate_C_geo(prob, dkkt);
  ConstantsBundle b;
  b.rho = cb.rho;
  b.L2 = cb.L2;
  b.L21_f = cb.L21_f;
  b.L21_L = cb.L21_L;
  b.L21_K = cb.L21_K;
  b.M2f = cb.M2f;
  b.P_max = cb.P_max;
  b.A_inf = cb.A_inf;
  b.B_inf = cb.B_inf;
  b.Hux_inf = cb.Hux_inf;
  b.Hup_inf = cb.Hup_inf;
  b.safety_factor = cb.safety_factor;
  b.C_geo = geo.C_geo;
  b.sigma_min_Mh = geo.sigma_min_Mh;
  b.lifting_norm = geo.lifting_norm;
  b.restriction_norm = geo.restriction_norm;
  b.C_xp_factor = C_xp_factor;
  derive_constants(b, dkkt.layout.scheme(), dkkt.layout.mesh());
  return b;
}

void apply_paper_constants(ConstantsBundle& b) {
  b.source = "published";
  b.C_geo = paper::kCgeo;
  b.Gamma = paper::kGamma;
  b.C_T = 0.0;
  b.C_quad = 0.0;
  b.C_Tprime = 0.0;
  b.Gamma_tot = b.Gamma;
  b.Lambda = paper::kLambda;
  b.C_close_inf = paper::kCclose;
}

}  // namespace ssoc
