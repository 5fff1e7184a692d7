#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "ssoc/model.hpp"

namespace ssoc {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Strictly increasing time grid t_0 = 0 < ... < t_N = T.
class Mesh {
 public:
  Mesh() = default;
  /// Throws ContractError unless nodes are strictly increasing, start at 0 and
  /// contain at least two entries.
  explicit Mesh(std::vector<double> nodes);

  static Mesh uniform(double horizon, int intervals);

  int intervals() const { return static_cast<int>(nodes_.size()) - 1; }
  double node(int k) const { return nodes_[static_cast<std::size_t>(k)]; }
  double step(int k) const { return node(k + 1) - node(k); }
  double horizon() const { return nodes_.back(); }
  double max_step() const;
  const std::vector<double>& nodes() const { return nodes_; }

  /// Index k with t in [t_k, t_{k+1}); the last interval for t = T.
  int locate(double t) const;

  /// Splits every listed interval at its midpoint.
  Mesh bisected(const std::vector<int>& intervals) const;

 private:
  std::vector<double> nodes_;
};

enum class SchemeKind { Trapezoidal, HermiteSimpson };

struct Scheme {
  SchemeKind kind = SchemeKind::HermiteSimpson;
  int degree = 3;         // reconstruction degree p
  double lebesgue = 2.0;  // interpolation Lebesgue constant c_Pi

  static Scheme trapezoidal() { return {SchemeKind::Trapezoidal, 1, 2.0}; }
  static Scheme hermite_simpson() { return {SchemeKind::HermiteSimpson, 3, 2.0}; }
  /// "trapezoidal" or "hermite-simpson"; throws ContractError otherwise.
  static Scheme parse(const std::string& name);

  std::string name() const;
  bool has_midpoints() const { return kind == SchemeKind::HermiteSimpson; }
};

/**
 * Index map of the collocation NLP.
 *
 * Decision variables live on "points": the mesh nodes, plus interval
 * midpoints for Hermite-Simpson. Points are ordered in time and each point
 * stores [x (n), u (m)] contiguously. Constraint rows are, in order: the
 * per-interval defect groups, the boundary rows b(x_0, x_N), and the fixed
 * initial-state rows x_0 - x0.
 */
class NlpLayout {
 public:
  NlpLayout() = default;
  NlpLayout(int n, int m, int n_b, bool fixed_initial, Mesh mesh, Scheme scheme);

  int n() const { return n_; }
  int m() const { return m_; }
  int n_b() const { return n_b_; }
  bool fixed_initial() const { return fixed_initial_; }
  const Mesh& mesh() const { return mesh_; }
  const Scheme& scheme() const { return scheme_; }

  int points() const { return static_cast<int>(times_.size()); }
  double time(int point) const { return times_[static_cast<std::size_t>(point)]; }
  const std::vector<double>& times() const { return times_; }
  int node_point(int k) const { return scheme_.has_midpoints() ? 2 * k : k; }
  int mid_point(int k) const { return 2 * k + 1; }
  int last_point() const { return points() - 1; }

  int n_z() const { return points() * (n_ + m_); }
  int n_c() const { return n_rows_; }
  int defect_groups_per_interval() const { return scheme_.has_midpoints() ? 2 : 1; }

  int state_index(int point, int i) const { return point * (n_ + m_) + i; }
  int control_index(int point, int j) const { return point * (n_ + m_) + n_ + j; }
  int defect_row(int interval, int group, int i) const {
    return (interval * defect_groups_per_interval() + group) * n_ + i;
  }
  int boundary_row(int i) const { return defects_end() + i; }
  int initial_row(int i) const { return defects_end() + n_b_ + i; }
  int defects_end() const { return mesh_.intervals() * defect_groups_per_interval() * n_; }

  Eigen::VectorXd state(const Eigen::VectorXd& z, int point) const {
    return z.segment(state_index(point, 0), n_);
  }
  Eigen::VectorXd control(const Eigen::VectorXd& z, int point) const {
    return z.segment(control_index(point, 0), m_);
  }
  /// n x points and m x points views of z.
  Eigen::MatrixXd states(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd controls(const Eigen::VectorXd& z) const;
  Eigen::VectorXd pack(const Eigen::MatrixXd& states, const Eigen::MatrixXd& controls) const;

  /// Quadrature weight of every point (trapezoid or Simpson).
  Eigen::VectorXd quadrature_weights() const;

  /// A defect group is sum_p (alpha_p x_p + beta_p f_p) over its points.
  struct Term {
    int point;
    double alpha;
    double beta;
  };
  std::vector<Term> defect_terms(int interval, int group) const;

 private:
  int n_ = 0, m_ = 0, n_b_ = 0;
  bool fixed_initial_ = false;
  Mesh mesh_;
  Scheme scheme_;
  std::vector<double> times_;
  int n_rows_ = 0;
};

NlpLayout assemble(const OcpProblem& prob, const Mesh& mesh, const Scheme& scheme);

/// Everything the Newton-KKT iteration needs at (z, y), from one AD pass per point.
struct NlpEvaluation {
  double objective = 0.0;
  Eigen::VectorXd gradient;     // n_z
  Eigen::VectorXd constraints;  // n_c
  SparseMatrix jacobian;        // n_c x n_z
  SparseMatrix hessian;         // n_z x n_z, Lagrangian objective + y^T c
};

/// Hessian is assembled only when `with_hessian` is set.
NlpEvaluation evaluate_nlp(const OcpProblem& prob, const NlpLayout& layout,
                           const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                           bool with_hessian = true);

double eval_objective(const OcpProblem& prob, const NlpLayout& layout, const Eigen::VectorXd& z);
Eigen::VectorXd eval_defects(const OcpProblem& prob, const NlpLayout& layout,
                             const Eigen::VectorXd& z);
SparseMatrix eval_constraint_jacobian(const OcpProblem& prob, const NlpLayout& layout,
                                      const Eigen::VectorXd& z);
SparseMatrix eval_lagrangian_hessian(const OcpProblem& prob, const NlpLayout& layout,
                                     const Eigen::VectorXd& z, const Eigen::VectorXd& y);

/// Quadrature Gram matrix of the variation norm
/// |dx|_L2^2 + |du|_L2^2 + |dx(0)|^2 + |dx(T)|^2, diagonal in z.
Eigen::VectorXd variation_norm_weights(const NlpLayout& layout);

/// Costates at every point recovered from the defect multipliers.
struct CostateEstimate {
  Eigen::MatrixXd values;  // n x points
  /// max over interior nodes of |p_left - p_right| (one-sided interval estimates)
  double max_node_jump = 0.0;
};

/// p_point = (sum over defect groups of beta * y_group) / quadrature weight.
/// With this scaling H_u vanishes at every point whenever the NLP is stationary.
CostateEstimate extract_costates(const NlpLayout& layout, const Eigen::VectorXd& y);

}  // namespace ssoc
