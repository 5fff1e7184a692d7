#include "ssoc/reconstruction.hpp"

#include <algorithm>
#include <cmath>

#include "ssoc/errors.hpp"

namespace ssoc {

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<Eigen::MatrixXd> coefficients)
    : breaks_(std::move(breaks)), coefficients_(std::move(coefficients)) {
  if (breaks_.size() < 2 || coefficients_.size() + 1 != breaks_.size())
    throw ContractError("piecewise polynomial: breakpoints and pieces disagree");
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k)
    if (!(breaks_[k + 1] > breaks_[k])) throw ContractError("piecewise polynomial: breakpoints must increase");
  dim_ = static_cast<int>(coefficients_.front().rows());
  degree_ = static_cast<int>(coefficients_.front().cols()) - 1;
  for (const auto& c : coefficients_)
    if (c.rows() != dim_ || c.cols() != degree_ + 1)
      throw ContractError("piecewise polynomial: inconsistent coefficient shapes");
}

PiecewisePoly PiecewisePoly::cubic_hermite(const std::vector<double>& breaks,
                                           const Eigen::MatrixXd& values,
                                           const Eigen::MatrixXd& slopes) {
  const auto K = static_cast<Eigen::Index>(breaks.size());
  if (values.cols() != K || slopes.cols() != K || values.rows() != slopes.rows())
    throw DimensionError("cubic_hermite: data does not match breakpoints");
  std::vector<Eigen::MatrixXd> coeffs;
  for (Eigen::Index k = 0; k + 1 < K; ++k) {
    const double h = breaks[static_cast<std::size_t>(k + 1)] - breaks[static_cast<std::size_t>(k)];
    const Eigen::VectorXd a = values.col(k), b = values.col(k + 1);
    const Eigen::VectorXd da = slopes.col(k), db = slopes.col(k + 1);
    Eigen::MatrixXd c(values.rows(), 4);
    c.col(0) = a;
    c.col(1) = da;
    c.col(2) = (3.0 * (b - a) / h - 2.0 * da - db) / h;
    c.col(3) = (2.0 * (a - b) / h + da + db) / (h * h);
    coeffs.push_back(std::move(c));
  }
  return PiecewisePoly(breaks, std::move(coeffs));
}

PiecewisePoly PiecewisePoly::linear(const std::vector<double>& breaks, const Eigen::MatrixXd& values) {
  const auto K = static_cast<Eigen::Index>(breaks.size());
  if (values.cols() != K) throw DimensionError("linear: data does not match breakpoints");
  std::vector<Eigen::MatrixXd> coeffs;
  for (Eigen::Index k = 0; k + 1 < K; ++k) {
    const double h = breaks[static_cast<std::size_t>(k + 1)] - breaks[static_cast<std::size_t>(k)];
    Eigen::MatrixXd c(values.rows(), 2);
    c.col(0) = values.col(k);
    c.col(1) = (values.col(k + 1) - values.col(k)) / h;
    coeffs.push_back(std::move(c));
  }
  return PiecewisePoly(breaks, std::move(coeffs));
}

int PiecewisePoly::locate(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(end()));
  if (!(t >= start() - tol && t <= end() + tol))
    throw ContractError("evaluation time " + std::to_string(t) + " outside [" +
                        std::to_string(start()) + ", " + std::to_string(end()) + "]");
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  return std::clamp(static_cast<int>(it - breaks_.begin()) - 1, 0, pieces() - 1);
}

Eigen::VectorXd PiecewisePoly::eval_piece(int piece, double t) const {
  const Eigen::MatrixXd& c = coefficients(piece);
  const double s = t - breaks_[static_cast<std::size_t>(piece)];
  Eigen::VectorXd v = c.col(degree_);
  for (int j = degree_ - 1; j >= 0; --j) v = v * s + c.col(j);
  return v;
}

Eigen::VectorXd PiecewisePoly::eval_piece_derivative(int piece, double t) const {
  const Eigen::MatrixXd& c = coefficients(piece);
  const double s = t - breaks_[static_cast<std::size_t>(piece)];
  if (degree_ == 0) return Eigen::VectorXd::Zero(dim_);
  Eigen::VectorXd v = degree_ * c.col(degree_);
  for (int j = degree_ - 1; j >= 1; --j) v = v * s + j * c.col(j);
  return v;
}

Eigen::VectorXd PiecewisePoly::eval(double t) const { return eval_piece(locate(t), t); }

Eigen::VectorXd PiecewisePoly::eval_derivative(double t) const {
  return eval_piece_derivative(locate(t), t);
}

Reconstruction reconstruct(const OcpProblem& prob, const DiscreteKkt& dkkt) {
  if (!dkkt.converged) throw ContractError("refusing to reconstruct a non-converged discrete solution");
  const NlpLayout& layout = dkkt.layout;
  const int n = prob.n, N = layout.mesh().intervals();
  const std::vector<double>& nodes = layout.mesh().nodes();

  Reconstruction rec;
  rec.layout = layout;
  rec.lambda = dkkt.lambda;
  rec.costate_jump = dkkt.costate_jump;

  Eigen::MatrixXd xs(n, N + 1), fs(n, N + 1), ps(n, N + 1);
  for (int k = 0; k <= N; ++k) {
    const int p = layout.node_point(k);
    xs.col(k) = dkkt.states.col(p);
    ps.col(k) = dkkt.costates.col(p);
    fs.col(k) = eval_dynamics(prob, nodes[static_cast<std::size_t>(k)], dkkt.states.col(p),
                              dkkt.controls.col(p));
  }
  rec.X = PiecewisePoly::cubic_hermite(nodes, xs, fs);
  rec.U = PiecewisePoly::linear(layout.times(), dkkt.controls);

  const EndpointEval ep = eval_endpoint_terms(prob, xs.col(0), xs.col(N), dkkt.lambda);
  const Eigen::VectorXd p_terminal = ep.K_xT + ep.b_xT.transpose() * dkkt.lambda;
  rec.terminal_shift = (ps.col(N) - p_terminal).norm();
  ps.col(N) = p_terminal;

  Eigen::MatrixXd slopes(n, N + 1);
  for (int k = 0; k <= N; ++k) {
    const int p = layout.node_point(k);
    const HamiltonianEval h = eval_hamiltonian(prob, nodes[static_cast<std::size_t>(k)],
                                               dkkt.states.col(p), dkkt.controls.col(p), ps.col(k));
    slopes.col(k) = -h.H_x;
  }
  rec.P = PiecewisePoly::cubic_hermite(nodes, ps, slopes);
  rec.node_costates = ps;
  rec.terminal_residual = (rec.P.eval(layout.mesh().horizon()) - p_terminal).norm();
  rec.point_states = dkkt.states;
  rec.point_controls = dkkt.controls;
  rec.point_costates = dkkt.costates;
  return rec;
}

Reconstruction perturb_controls(const Reconstruction& rec,
                                const std::function<Eigen::VectorXd(double)>& delta) {
  Reconstruction out = rec;
  const auto& times = rec.layout.times();
  for (int p = 0; p < rec.layout.points(); ++p) {
    const Eigen::VectorXd d = delta(times[static_cast<std::size_t>(p)]);
    if (d.size() != rec.point_controls.rows()) throw DimensionError("control perturbation has wrong size");
    out.point_controls.col(p) += d;
  }
  out.U = PiecewisePoly::linear(times, out.point_controls);
  return out;
}

}  // namespace ssoc
