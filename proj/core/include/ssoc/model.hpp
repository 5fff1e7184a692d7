#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssoc/ad.hpp"

namespace ssoc {

using AdVector = std::vector<AdScalar2>;
using AdSpan = std::span<const AdScalar2>;

/**
 * Bolza problem
 *
 *   min K(x(0), x(T)) + int_0^T L(t, x, u) dt
 *   s.t. x' = f(t, x, u),  b(x(0), x(T)) = 0,  [x(0) = x0]
 *
 * All callbacks are written against AdScalar2 so that first and second
 * derivatives come out of a single evaluation.
 */
struct OcpProblem {
  using Dynamics = std::function<AdVector(const AdScalar2& t, AdSpan x, AdSpan u)>;
  using RunningCost = std::function<AdScalar2(const AdScalar2& t, AdSpan x, AdSpan u)>;
  using EndpointCost = std::function<AdScalar2(AdSpan x0, AdSpan xT)>;
  using BoundaryMap = std::function<AdVector(AdSpan x0, AdSpan xT)>;

  std::string name;
  int n = 0;
  int m = 0;
  int n_b = 0;
  double horizon = 1.0;

  Dynamics dynamics;
  RunningCost running_cost;
  EndpointCost endpoint_cost;
  BoundaryMap boundary;  // may be empty when n_b == 0

  /// Fixed initial state, imposed as explicit constraint rows.
  std::optional<Eigen::VectorXd> initial_state;

  /// Default initial guess: states interpolate linearly start -> end, constant control.
  Eigen::VectorXd guess_start;
  Eigen::VectorXd guess_end;
  Eigen::VectorXd guess_control;

  /// Optional terminal target and weight used only for the weighted
  /// boundary diagnostic |X(0)-x0| + |X(T)-x_f|_K.
  std::optional<Eigen::VectorXd> terminal_target;
  std::optional<Eigen::MatrixXd> terminal_weight;

  /// Throws ContractError when the problem is malformed.
  void validate() const;
};

/// f, L and their first and second partials over the stacked variable (x, u).
struct PointDerivatives {
  Eigen::VectorXd f;                       // n
  Eigen::MatrixXd f_x;                     // n x n
  Eigen::MatrixXd f_u;                     // n x m
  std::vector<Eigen::MatrixXd> f_hessian;  // n entries, each (n+m) x (n+m)
  double L = 0.0;
  Eigen::VectorXd L_grad;     // n + m
  Eigen::MatrixXd L_hessian;  // (n+m) x (n+m)
};

struct HamiltonianEval {
  double H = 0.0;
  Eigen::VectorXd H_x;
  Eigen::VectorXd H_u;
  Eigen::MatrixXd H_xx;
  Eigen::MatrixXd H_uu;
  Eigen::MatrixXd H_ux;  // m x n
  Eigen::MatrixXd H_up;  // m x n, equals f_u^T
};

struct EndpointEval {
  double K = 0.0;
  Eigen::VectorXd K_x0;
  Eigen::VectorXd K_xT;
  Eigen::MatrixXd K_hessian;  // 2n x 2n over (x0, xT)
  Eigen::VectorXd b;          // n_b
  Eigen::MatrixXd b_x0;       // n_b x n
  Eigen::MatrixXd b_xT;       // n_b x n
  std::vector<Eigen::MatrixXd> b_hessian;  // n_b entries, each 2n x 2n
  /// K_hessian + sum_i lambda_i * b_hessian[i]
  Eigen::MatrixXd lagrangian_hessian;
};

Eigen::VectorXd eval_dynamics(const OcpProblem& prob, double t, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u);

double eval_running_cost(const OcpProblem& prob, double t, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u);

/// One AD pass seeded over the n + m coordinates of (x, u).
PointDerivatives eval_point(const OcpProblem& prob, double t, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& u);

HamiltonianEval hamiltonian_from(const PointDerivatives& d, const Eigen::VectorXd& p, int n,
                                 int m);

HamiltonianEval eval_hamiltonian(const OcpProblem& prob, double t, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& p);

EndpointEval eval_endpoint_terms(const OcpProblem& prob, const Eigen::VectorXd& x0,
                                 const Eigen::VectorXd& xT, const Eigen::VectorXd& lambda);

/// Builtin problems, sorted by name.
std::vector<std::string> builtin_problem_names();

/// Throws RegistryError for unknown names.
OcpProblem builtin_problem(const std::string& name);

namespace quadrotor {
inline constexpr double kMass = 1.0;
inline constexpr double kGravity = 9.81;
inline constexpr double kArm = 0.3;
inline constexpr double kInertia = 0.2;
inline constexpr double kHorizon = 2.0;
}  // namespace quadrotor

}  // namespace ssoc
