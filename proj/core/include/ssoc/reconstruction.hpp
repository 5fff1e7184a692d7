#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "ssoc/model.hpp"
#include "ssoc/solver.hpp"
#include "ssoc/transcription.hpp"

namespace ssoc {

/**
 * Vector-valued piecewise polynomial on [t_0, t_K].
 *
 * Piece k covers [t_k, t_{k+1}] and is stored in the local variable
 * s = t - t_k as a dim x (degree + 1) coefficient matrix, column j holding
 * the coefficient of s^j. Evaluation at a breakpoint uses the piece to the
 * right, except at the final breakpoint.
 */
class PiecewisePoly {
 public:
  PiecewisePoly() = default;
  PiecewisePoly(std::vector<double> breaks, std::vector<Eigen::MatrixXd> coefficients);

  /// C^1 cubic through `values` with slopes `slopes` (both dim x breaks).
  static PiecewisePoly cubic_hermite(const std::vector<double>& breaks,
                                     const Eigen::MatrixXd& values, const Eigen::MatrixXd& slopes);
  /// Continuous piecewise linear interpolant of `values` (dim x breaks).
  static PiecewisePoly linear(const std::vector<double>& breaks, const Eigen::MatrixXd& values);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int pieces() const { return static_cast<int>(coefficients_.size()); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  double start() const { return breaks_.front(); }
  double end() const { return breaks_.back(); }
  const Eigen::MatrixXd& coefficients(int piece) const {
    return coefficients_[static_cast<std::size_t>(piece)];
  }

  /// Throws ContractError for t outside [start, end].
  Eigen::VectorXd eval(double t) const;
  Eigen::VectorXd eval_derivative(double t) const;
  /// Evaluation restricted to one piece (t may sit on either end of it).
  Eigen::VectorXd eval_piece(int piece, double t) const;
  Eigen::VectorXd eval_piece_derivative(int piece, double t) const;
  int locate(double t) const;

 private:
  std::vector<double> breaks_;
  std::vector<Eigen::MatrixXd> coefficients_;
  int dim_ = 0;
  int degree_ = 0;
};

struct Reconstruction {
  PiecewisePoly X;  // cubic Hermite states, slopes f(t_k, x_k, u_k)
  PiecewisePoly U;  // piecewise linear through every control sample
  PiecewisePoly P;  // cubic Hermite costates, slopes -H_x(t_k, x_k, u_k, p_k)
  Eigen::VectorXd lambda;
  NlpLayout layout;
  Eigen::MatrixXd node_costates;  // n x (N+1), after terminal anchoring
  /// |p_N(before) - p_N(after)| from enforcing p(T) = K_xT + b_xT^T lambda.
  double terminal_shift = 0.0;
  /// Largest one-sided costate disagreement at interior nodes before averaging.
  double costate_jump = 0.0;
  /// |P(T) - K_xT - b_xT^T lambda| after anchoring.
  double terminal_residual = 0.0;
  /// Discrete values at every collocation point; costates before anchoring.
  Eigen::MatrixXd point_states;
  Eigen::MatrixXd point_controls;
  Eigen::MatrixXd point_costates;
};

/// Throws ContractError when dkkt did not come from a converged solve.
Reconstruction reconstruct(const OcpProblem& prob, const DiscreteKkt& dkkt);

/// Copy of `rec` whose control samples are shifted by delta(t) and re-interpolated.
Reconstruction perturb_controls(const Reconstruction& rec,
                                const std::function<Eigen::VectorXd(double)>& delta);

}  // namespace ssoc
