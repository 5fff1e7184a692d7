#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssoc/model.hpp"
#include "ssoc/numerics.hpp"
#include "ssoc/transcription.hpp"

namespace ssoc {

struct SolverOptions {
  double kkt_tolerance = 1e-12;
  int max_iterations = 200;
  double regularization = 1e-8;  // first nonzero primal regularization
  double armijo = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-12;
  /// Merit penalty mu is raised to penalty_factor * |y|_inf whenever it falls below |y|_inf.
  double penalty_factor = 2.0;

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  double kkt_residual = 0.0;  // max(stationarity, feasibility)
  double stationarity = 0.0;  // |grad phi + J^T y|_inf
  double feasibility = 0.0;   // |c|_inf
  bool converged = false;
  double regularization = 0.0;  // delta used on the final Newton step
  std::string initial_guess;
  std::string message;
  /// Merit value before/after each accepted step, at that step's penalty.
  std::vector<std::pair<double, double>> merit_steps;
};

/// Discrete primal-dual point of the collocation NLP.
struct DiscreteKkt {
  NlpLayout layout;
  Eigen::VectorXd z;         // decision vector
  Eigen::VectorXd y;         // all constraint multipliers (defects, boundary, initial rows)
  Eigen::MatrixXd states;    // n x points
  Eigen::MatrixXd controls;  // m x points
  Eigen::MatrixXd costates;  // n x points, from the defect multipliers
  Eigen::VectorXd lambda;    // n_b boundary multipliers
  double costate_jump = 0.0;
  bool converged = false;
};

struct NewtonStep {
  Eigen::VectorXd dz;
  Eigen::VectorXd y;  // multipliers after the step
  double regularization = 0.0;
  Inertia inertia;
};

/**
 * Solves [[W + delta I, J^T], [J, 0]] [dz; y] = -[grad; c].
 *
 * Starts from delta_init. When the factorization reports an inertia other
 * than (n_z, n_c, 0), delta is raised to max(delta_min, 10 delta) and the
 * system is refactored; past 1e6 SolverBreakdown is thrown.
 */
NewtonStep newton_step(const DenseMatrix& W, const DenseMatrix& J, const Eigen::VectorXd& grad,
                       const Eigen::VectorXd& c, double delta_init = 0.0,
                       double delta_min = 1e-8);

/// Linear interpolation of the problem's guess_start -> guess_end, constant guess_control.
Eigen::VectorXd default_initial_guess(const OcpProblem& prob, const NlpLayout& layout);

struct InitialGuess {
  Eigen::VectorXd z;
  std::optional<Eigen::VectorXd> y;
  std::string description = "warm start";
};

/// Globalized Newton-KKT (SQP) iteration with an l1 merit function.
/// Non-convergence is reported, not thrown; breakdown throws SolverBreakdown.
std::pair<DiscreteKkt, SolveReport> solve(const OcpProblem& prob, const Mesh& mesh,
                                          const Scheme& scheme, const SolverOptions& options = {},
                                          const std::optional<InitialGuess>& guess = std::nullopt);

}  // namespace ssoc
