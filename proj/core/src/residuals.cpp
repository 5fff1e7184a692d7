#include "ssoc/residuals.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssoc/errors.hpp"
#include "ssoc/parallel.hpp"

namespace ssoc {

void gauss_legendre(int points, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (points < 1) throw ContractError("gauss_legendre: need at least one point");
  // Golub-Welsch: eigenvalues of the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int i = 1; i < points; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes = es.eigenvalues();
  weights.resize(points);
  for (int i = 0; i < points; ++i) weights(i) = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
}

namespace {

struct PointResidual {
  Eigen::VectorXd dyn;
  Eigen::VectorXd adj;
  Eigen::VectorXd stat;
};

PointResidual residual_at(const OcpProblem& prob, const Reconstruction& rec, int piece, int u_piece,
                          double t) {
  const Eigen::VectorXd x = rec.X.eval_piece(piece, t);
  const Eigen::VectorXd u = rec.U.eval_piece(u_piece, t);
  const Eigen::VectorXd p = rec.P.eval_piece(piece, t);
  const PointDerivatives d = eval_point(prob, t, x, u);
  const int n = prob.n;
  PointResidual r;
  r.dyn = rec.X.eval_piece_derivative(piece, t) - d.f;
  r.adj = -rec.P.eval_piece_derivative(piece, t) - (d.L_grad.head(n) + d.f_x.transpose() * p);
  r.stat = d.L_grad.tail(prob.m) + d.f_u.transpose() * p;
  return r;
}

struct IntervalWork {
  double dyn_sq = 0.0, stat_sq = 0.0, adj_sq = 0.0;
  double dyn_inf = 0.0, stat_inf = 0.0, adj_inf = 0.0;
};

}  // namespace

ResidualReport compute_residuals(const OcpProblem& prob, const Reconstruction& rec,
                                 int quad_points_per_interval) {
  if (quad_points_per_interval < 3) throw ContractError("quad_points_per_interval must be >= 3");
  const NlpLayout& layout = rec.layout;
  const Mesh& mesh = layout.mesh();
  const int N = mesh.intervals();
  const int u_per_interval = layout.scheme().has_midpoints() ? 2 : 1;
  const std::vector<double>& u_breaks = rec.U.breakpoints();

  ResidualReport report;
  report.quad_points = quad_points_per_interval;
  Eigen::VectorXd gl_nodes, gl_weights;
  gauss_legendre(quad_points_per_interval, gl_nodes, gl_weights);

  std::vector<IntervalWork> work(static_cast<std::size_t>(N));
  parallel_for(N, [&](int k) {
    IntervalWork& w = work[static_cast<std::size_t>(k)];
    auto take_max = [&](const PointResidual& r) {
      w.dyn_inf = std::max(w.dyn_inf, r.dyn.norm());
      w.adj_inf = std::max(w.adj_inf, r.adj.norm());
      w.stat_inf = std::max(w.stat_inf, r.stat.norm());
    };
    // Gauss-Legendre on each smooth sub-piece (control breakpoints split the interval).
    for (int s = 0; s < u_per_interval; ++s) {
      const int u_piece = k * u_per_interval + s;
      const double a = u_breaks[static_cast<std::size_t>(u_piece)];
      const double b = u_breaks[static_cast<std::size_t>(u_piece + 1)];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int q = 0; q < quad_points_per_interval; ++q) {
        const PointResidual r = residual_at(prob, rec, k, u_piece, mid + half * gl_nodes(q));
        w.dyn_sq += half * gl_weights(q) * r.dyn.squaredNorm();
        w.adj_sq += half * gl_weights(q) * r.adj.squaredNorm();
        w.stat_sq += half * gl_weights(q) * r.stat.squaredNorm();
        take_max(r);
      }
    }
    const int samples = report.uniform_samples;
    const double t0 = mesh.node(k), h = mesh.step(k);
    for (int j = 0; j < samples; ++j) {
      const double t = j + 1 == samples ? mesh.node(k + 1) : t0 + h * j / (samples - 1);
      const int u_piece = std::clamp(rec.U.locate(t), k * u_per_interval, (k + 1) * u_per_interval - 1);
      take_max(residual_at(prob, rec, k, u_piece, t));
    }
  });

  double dyn_sq = 0.0, stat_sq = 0.0, adj_sq = 0.0;
  report.per_interval.reserve(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    const IntervalWork& w = work[static_cast<std::size_t>(k)];
    IntervalResidual ir;
    ir.interval = k;
    ir.t0 = mesh.node(k);
    ir.t1 = mesh.node(k + 1);
    ir.dyn_L2 = std::sqrt(w.dyn_sq);
    ir.stat_L2 = std::sqrt(w.stat_sq);
    ir.adj_L2 = std::sqrt(w.adj_sq);
    report.per_interval.push_back(ir);
    dyn_sq += w.dyn_sq;
    stat_sq += w.stat_sq;
    adj_sq += w.adj_sq;
    report.e_dyn_inf = std::max(report.e_dyn_inf, w.dyn_inf);
    report.e_adj_inf = std::max(report.e_adj_inf, w.adj_inf);
    report.e_stat_inf = std::max(report.e_stat_inf, w.stat_inf);
  }
  report.e_dyn_L2 = std::sqrt(dyn_sq);
  report.e_stat_L2 = std::sqrt(stat_sq);
  report.e_adj_L2 = std::sqrt(adj_sq);

  // Boundary terms.
  const double T = mesh.horizon();
  const Eigen::VectorXd x0 = rec.X.eval(0.0), xT = rec.X.eval(T);
  const EndpointEval ep = eval_endpoint_terms(prob, x0, xT, rec.lambda);
  const double initial_mismatch = prob.initial_state ? (x0 - *prob.initial_state).norm() : 0.0;
  report.e_bc = (prob.n_b > 0 ? ep.b.norm() : 0.0) + initial_mismatch;
  report.E_N2 = report.e_dyn_L2 + report.e_stat_L2 + report.e_bc;

  const Eigen::VectorXd lam_term_T =
      prob.n_b > 0 ? Eigen::VectorXd(ep.b_xT.transpose() * rec.lambda) : Eigen::VectorXd::Zero(prob.n);
  const double terminal = (rec.P.eval(T) - ep.K_xT - lam_term_T).norm();
  double initial = 0.0;
  if (!prob.initial_state) {
    const Eigen::VectorXd lam_term_0 = prob.n_b > 0 ? Eigen::VectorXd(ep.b_x0.transpose() * rec.lambda)
                                                    : Eigen::VectorXd::Zero(prob.n);
    initial = (-rec.P.eval(0.0) - ep.K_x0 - lam_term_0).norm();
  }
  report.e_bc_kkt = report.e_bc + terminal + initial;
  report.E_inf = report.e_dyn_inf + report.e_adj_inf + report.e_stat_inf + report.e_bc_kkt;
  report.E_inf_diag = report.e_dyn_inf + report.e_stat_inf + report.e_bc;

  if (prob.terminal_target) {
    const Eigen::VectorXd dT = xT - *prob.terminal_target;
    const Eigen::MatrixXd K =
        prob.terminal_weight ? *prob.terminal_weight : Eigen::MatrixXd::Identity(prob.n, prob.n);
    report.e_bc_weighted = initial_mismatch + std::sqrt(std::max(0.0, dT.dot(K * dT)));
  }

  // Discrete point values at the collocation points.
  const Eigen::VectorXd qw = layout.quadrature_weights();
  double node_dyn_sq = 0.0, node_stat_sq = 0.0;
  for (int p = 0; p < layout.points(); ++p) {
    const double t = layout.time(p);
    const int piece = std::min(mesh.locate(t), N - 1);
    const PointDerivatives d =
        eval_point(prob, t, rec.point_states.col(p), rec.point_controls.col(p));
    const Eigen::VectorXd dyn = rec.X.eval_piece_derivative(piece, t) - d.f;
    const Eigen::VectorXd stat = d.L_grad.tail(prob.m) + d.f_u.transpose() * rec.point_costates.col(p);
    report.node_dyn_inf = std::max(report.node_dyn_inf, dyn.norm());
    report.node_stat_inf = std::max(report.node_stat_inf, stat.norm());
    node_dyn_sq += qw(p) * dyn.squaredNorm();
    node_stat_sq += qw(p) * stat.squaredNorm();
  }
  report.E_N2_nodes = std::sqrt(node_dyn_sq) + std::sqrt(node_stat_sq) + report.e_bc;
  return report;
}

bool residual_relation_check(const ResidualReport& report, double horizon) {
  return report.E_N2 <= std::sqrt(horizon) * report.E_inf_diag + report.e_bc + 1e-12;
}

std::vector<int> worst_intervals(const ResidualReport& report, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ContractError("refinement fraction must be in (0,1]");
  const int N = static_cast<int>(report.per_interval.size());
  std::vector<int> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return report.per_interval[static_cast<std::size_t>(a)].squared_sum() >
           report.per_interval[static_cast<std::size_t>(b)].squared_sum();
  });
  const int count = std::min(N, static_cast<int>(std::ceil(fraction * N - 1e-12)));
  order.resize(static_cast<std::size_t>(count));
  return order;
}

}  // namespace ssoc
