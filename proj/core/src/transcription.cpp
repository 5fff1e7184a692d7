#include "ssoc/transcription.hpp"

#include <algorithm>
#include <cmath>

#include "ssoc/errors.hpp"

namespace ssoc {

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw ContractError("mesh needs at least one interval");
  if (nodes_.front() != 0.0) throw ContractError("mesh must start at t = 0");
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k)
    if (!(nodes_[k + 1] > nodes_[k])) throw ContractError("mesh nodes must be strictly increasing");
}

Mesh Mesh::uniform(double horizon, int intervals) {
  if (intervals < 1) throw ContractError("mesh needs at least one interval");
  if (!(horizon > 0.0)) throw ContractError("horizon must be positive");
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int k = 0; k <= intervals; ++k) t[static_cast<std::size_t>(k)] = horizon * k / intervals;
  t.back() = horizon;
  return Mesh(std::move(t));
}

double Mesh::max_step() const {
  double h = 0.0;
  for (int k = 0; k < intervals(); ++k) h = std::max(h, step(k));
  return h;
}

int Mesh::locate(double t) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const int k = static_cast<int>(it - nodes_.begin()) - 1;
  return std::clamp(k, 0, intervals() - 1);
}

Mesh Mesh::bisected(const std::vector<int>& which) const {
  std::vector<bool> split(static_cast<std::size_t>(intervals()), false);
  for (int k : which) {
    if (k < 0 || k >= intervals()) throw ContractError("bisected: interval index out of range");
    split[static_cast<std::size_t>(k)] = true;
  }
  std::vector<double> t;
  t.reserve(nodes_.size() + which.size());
  for (int k = 0; k < intervals(); ++k) {
    t.push_back(node(k));
    if (split[static_cast<std::size_t>(k)]) t.push_back(0.5 * (node(k) + node(k + 1)));
  }
  t.push_back(nodes_.back());
  return Mesh(std::move(t));
}

Scheme Scheme::parse(const std::string& name) {
  if (name == "trapezoidal") return trapezoidal();
  if (name == "hermite-simpson") return hermite_simpson();
  throw ContractError("unknown scheme '" + name + "' (expected trapezoidal|hermite-simpson)");
}

std::string Scheme::name() const {
  return kind == SchemeKind::Trapezoidal ? "trapezoidal" : "hermite-simpson";
}

NlpLayout::NlpLayout(int n, int m, int n_b, bool fixed_initial, Mesh mesh, Scheme scheme)
    : n_(n), m_(m), n_b_(n_b), fixed_initial_(fixed_initial), mesh_(std::move(mesh)),
      scheme_(scheme) {
  const int N = mesh_.intervals();
  for (int k = 0; k < N; ++k) {
    times_.push_back(mesh_.node(k));
    if (scheme_.has_midpoints()) times_.push_back(0.5 * (mesh_.node(k) + mesh_.node(k + 1)));
  }
  times_.push_back(mesh_.horizon());
  n_rows_ = defects_end() + n_b_ + (fixed_initial_ ? n_ : 0);
}

Eigen::MatrixXd NlpLayout::states(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd s(n_, points());
  for (int p = 0; p < points(); ++p) s.col(p) = state(z, p);
  return s;
}

Eigen::MatrixXd NlpLayout::controls(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd c(m_, points());
  for (int p = 0; p < points(); ++p) c.col(p) = control(z, p);
  return c;
}

Eigen::VectorXd NlpLayout::pack(const Eigen::MatrixXd& states, const Eigen::MatrixXd& controls) const {
  if (states.rows() != n_ || states.cols() != points() || controls.rows() != m_ ||
      controls.cols() != points())
    throw DimensionError("pack: state/control matrices do not match the layout");
  Eigen::VectorXd z(n_z());
  for (int p = 0; p < points(); ++p) {
    z.segment(state_index(p, 0), n_) = states.col(p);
    z.segment(control_index(p, 0), m_) = controls.col(p);
  }
  return z;
}

Eigen::VectorXd NlpLayout::quadrature_weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(points());
  for (int k = 0; k < mesh_.intervals(); ++k) {
    const double h = mesh_.step(k);
    if (scheme_.has_midpoints()) {
      w[node_point(k)] += h / 6.0;
      w[mid_point(k)] += 4.0 * h / 6.0;
      w[node_point(k + 1)] += h / 6.0;
    } else {
      w[node_point(k)] += h / 2.0;
      w[node_point(k + 1)] += h / 2.0;
    }
  }
  return w;
}

std::vector<NlpLayout::Term> NlpLayout::defect_terms(int interval, int group) const {
  const double h = mesh_.step(interval);
  const int a = node_point(interval), b = node_point(interval + 1);
  if (!scheme_.has_midpoints()) return {{a, -1.0, -h / 2.0}, {b, 1.0, -h / 2.0}};
  const int mid = mid_point(interval);
  if (group == 0)  // Simpson: x_b - x_a - h/6 (f_a + 4 f_m + f_b)
    return {{a, -1.0, -h / 6.0}, {mid, 0.0, -4.0 * h / 6.0}, {b, 1.0, -h / 6.0}};
  // Hermite midpoint: x_m - (x_a + x_b)/2 - h/8 (f_a - f_b)
  return {{a, -0.5, -h / 8.0}, {mid, 1.0, 0.0}, {b, -0.5, h / 8.0}};
}

NlpLayout assemble(const OcpProblem& prob, const Mesh& mesh, const Scheme& scheme) {
  prob.validate();
  if (std::abs(mesh.horizon() - prob.horizon) > 1e-12 * std::max(1.0, prob.horizon))
    throw ContractError("mesh does not end at the problem horizon");
  return NlpLayout(prob.n, prob.m, prob.n_b, prob.initial_state.has_value(), mesh, scheme);
}

namespace {

using Triplet = Eigen::Triplet<double>;

std::vector<PointDerivatives> point_derivatives(const OcpProblem& prob, const NlpLayout& layout,
                                                const Eigen::VectorXd& z) {
  if (z.size() != layout.n_z()) throw DimensionError("decision vector has wrong size");
  if (!z.allFinite()) throw ContractError("decision vector is not finite");
  std::vector<PointDerivatives> d;
  d.reserve(static_cast<std::size_t>(layout.points()));
  for (int p = 0; p < layout.points(); ++p)
    d.push_back(eval_point(prob, layout.time(p), layout.state(z, p), layout.control(z, p)));
  return d;
}

void add_block(std::vector<Triplet>& t, int row0, int col0, const Eigen::MatrixXd& block) {
  for (Eigen::Index j = 0; j < block.cols(); ++j)
    for (Eigen::Index i = 0; i < block.rows(); ++i)
      if (block(i, j) != 0.0)
        t.emplace_back(row0 + static_cast<int>(i), col0 + static_cast<int>(j), block(i, j));
}

}  // namespace

NlpEvaluation evaluate_nlp(const OcpProblem& prob, const NlpLayout& layout,
                           const Eigen::VectorXd& z, const Eigen::VectorXd& y, bool with_hessian) {
  const int n = layout.n(), m = layout.m(), nz = layout.n_z(), nc = layout.n_c();
  if (with_hessian && y.size() != nc) throw DimensionError("multiplier vector has wrong size");
  const auto pd = point_derivatives(prob, layout, z);
  const Eigen::VectorXd w = layout.quadrature_weights();
  const int first = 0, last = layout.last_point();
  const Eigen::VectorXd lambda =
      with_hessian ? Eigen::VectorXd(y.segment(layout.boundary_row(0), layout.n_b()))
                   : Eigen::VectorXd::Zero(layout.n_b());
  const EndpointEval ep =
      eval_endpoint_terms(prob, layout.state(z, first), layout.state(z, last), lambda);

  NlpEvaluation out;
  out.objective = ep.K;
  out.gradient = Eigen::VectorXd::Zero(nz);
  for (int p = 0; p < layout.points(); ++p) {
    const auto& d = pd[static_cast<std::size_t>(p)];
    out.objective += w[p] * d.L;
    out.gradient.segment(layout.state_index(p, 0), n + m) += w[p] * d.L_grad;
  }
  out.gradient.segment(layout.state_index(first, 0), n) += ep.K_x0;
  out.gradient.segment(layout.state_index(last, 0), n) += ep.K_xT;

  out.constraints = Eigen::VectorXd::Zero(nc);
  std::vector<Triplet> jt;
  // f-coefficient accumulated per point: sum over groups of beta * y_group.
  Eigen::MatrixXd fcoef = Eigen::MatrixXd::Zero(n, layout.points());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (int k = 0; k < layout.mesh().intervals(); ++k) {
    for (int g = 0; g < layout.defect_groups_per_interval(); ++g) {
      const int row = layout.defect_row(k, g, 0);
      for (const auto& term : layout.defect_terms(k, g)) {
        const auto& d = pd[static_cast<std::size_t>(term.point)];
        out.constraints.segment(row, n) +=
            term.alpha * layout.state(z, term.point) + term.beta * d.f;
        add_block(jt, row, layout.state_index(term.point, 0), term.alpha * I + term.beta * d.f_x);
        add_block(jt, row, layout.control_index(term.point, 0), term.beta * d.f_u);
        if (with_hessian) fcoef.col(term.point) += term.beta * y.segment(row, n);
      }
    }
  }
  if (layout.n_b() > 0) {
    out.constraints.segment(layout.boundary_row(0), layout.n_b()) = ep.b;
    add_block(jt, layout.boundary_row(0), layout.state_index(first, 0), ep.b_x0);
    add_block(jt, layout.boundary_row(0), layout.state_index(last, 0), ep.b_xT);
  }
  if (layout.fixed_initial()) {
    out.constraints.segment(layout.initial_row(0), n) =
        layout.state(z, first) - *prob.initial_state;
    add_block(jt, layout.initial_row(0), layout.state_index(first, 0), I);
  }
  out.jacobian.resize(nc, nz);
  out.jacobian.setFromTriplets(jt.begin(), jt.end());

  if (with_hessian) {
    std::vector<Triplet> ht;
    for (int p = 0; p < layout.points(); ++p) {
      const auto& d = pd[static_cast<std::size_t>(p)];
      Eigen::MatrixXd block = w[p] * d.L_hessian;
      for (int i = 0; i < n; ++i) block += fcoef(i, p) * d.f_hessian[static_cast<std::size_t>(i)];
      add_block(ht, layout.state_index(p, 0), layout.state_index(p, 0), block);
    }
    const Eigen::MatrixXd& E = ep.lagrangian_hessian;
    const int i0 = layout.state_index(first, 0), iT = layout.state_index(last, 0);
    add_block(ht, i0, i0, E.topLeftCorner(n, n));
    add_block(ht, i0, iT, E.topRightCorner(n, n));
    add_block(ht, iT, i0, E.bottomLeftCorner(n, n));
    add_block(ht, iT, iT, E.bottomRightCorner(n, n));
    out.hessian.resize(nz, nz);
    out.hessian.setFromTriplets(ht.begin(), ht.end());
  }
  return out;
}

double eval_objective(const OcpProblem& prob, const NlpLayout& layout, const Eigen::VectorXd& z) {
  if (z.size() != layout.n_z()) throw DimensionError("decision vector has wrong size");
  const Eigen::VectorXd w = layout.quadrature_weights();
  double J = eval_endpoint_terms(prob, layout.state(z, 0), layout.state(z, layout.last_point()),
                                 Eigen::VectorXd::Zero(layout.n_b()))
                 .K;
  for (int p = 0; p < layout.points(); ++p)
    J += w[p] * eval_running_cost(prob, layout.time(p), layout.state(z, p), layout.control(z, p));
  return J;
}

Eigen::VectorXd eval_defects(const OcpProblem& prob, const NlpLayout& layout,
                             const Eigen::VectorXd& z) {
  return evaluate_nlp(prob, layout, z, Eigen::VectorXd(), false).constraints;
}

SparseMatrix eval_constraint_jacobian(const OcpProblem& prob, const NlpLayout& layout,
                                      const Eigen::VectorXd& z) {
  return evaluate_nlp(prob, layout, z, Eigen::VectorXd(), false).jacobian;
}

SparseMatrix eval_lagrangian_hessian(const OcpProblem& prob, const NlpLayout& layout,
                                     const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  return evaluate_nlp(prob, layout, z, y, true).hessian;
}

Eigen::VectorXd variation_norm_weights(const NlpLayout& layout) {
  const Eigen::VectorXd w = layout.quadrature_weights();
  Eigen::VectorXd g(layout.n_z());
  for (int p = 0; p < layout.points(); ++p) {
    g.segment(layout.state_index(p, 0), layout.n()).setConstant(w[p]);
    g.segment(layout.control_index(p, 0), layout.m()).setConstant(w[p]);
  }
  g.segment(layout.state_index(0, 0), layout.n()).array() += 1.0;
  g.segment(layout.state_index(layout.last_point(), 0), layout.n()).array() += 1.0;
  return g;
}

CostateEstimate extract_costates(const NlpLayout& layout, const Eigen::VectorXd& y) {
  if (y.size() != layout.n_c()) throw DimensionError("multiplier vector has wrong size");
  const int n = layout.n(), P = layout.points(), N = layout.mesh().intervals();
  const Eigen::VectorXd w = layout.quadrature_weights();

  // Per-interval numerators and weights at the interval's two end nodes, so
  // one-sided estimates at interior nodes can be compared.
  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(n, P);
  Eigen::MatrixXd left_num = Eigen::MatrixXd::Zero(n, N), right_num = Eigen::MatrixXd::Zero(n, N);
  Eigen::VectorXd left_w = Eigen::VectorXd::Zero(N), right_w = Eigen::VectorXd::Zero(N);
  for (int k = 0; k < N; ++k) {
    const double h = layout.mesh().step(k);
    const double node_w = layout.scheme().has_midpoints() ? h / 6.0 : h / 2.0;
    left_w[k] = node_w;
    right_w[k] = node_w;
    for (int g = 0; g < layout.defect_groups_per_interval(); ++g) {
      const Eigen::VectorXd yg = y.segment(layout.defect_row(k, g, 0), n);
      for (const auto& term : layout.defect_terms(k, g)) {
        num.col(term.point) += term.beta * yg;
        if (term.point == layout.node_point(k)) left_num.col(k) += term.beta * yg;
        if (term.point == layout.node_point(k + 1)) right_num.col(k) += term.beta * yg;
      }
    }
  }
  CostateEstimate est;
  est.values.resize(n, P);
  for (int p = 0; p < P; ++p) est.values.col(p) = num.col(p) / w[p];
  for (int k = 1; k < N; ++k) {
    // estimate at node k from interval k-1 (its right end) and interval k (its left end)
    const Eigen::VectorXd from_left = right_num.col(k - 1) / right_w[k - 1];
    const Eigen::VectorXd from_right = left_num.col(k) / left_w[k];
    est.max_node_jump = std::max(est.max_node_jump, (from_left - from_right).norm());
  }
  return est;
}

}  // namespace ssoc
