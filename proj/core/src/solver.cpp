#include "ssoc/solver.hpp"

#include <cmath>
#include <limits>

#include "ssoc/errors.hpp"

namespace ssoc {

void SolverOptions::validate() const {
  if (!(kkt_tolerance > 0.0)) throw ContractError("solver tolerance must be positive");
  if (max_iterations < 1) throw ContractError("max_iterations must be at least 1");
  if (!(regularization > 0.0)) throw ContractError("regularization must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ContractError("backtrack ratio must be in (0,1)");
  if (!(armijo > 0.0 && armijo < 0.5)) throw ContractError("armijo factor must be in (0,1/2)");
}

NewtonStep newton_step(const DenseMatrix& W, const DenseMatrix& J, const Eigen::VectorXd& grad,
                       const Eigen::VectorXd& c, double delta_init, double delta_min) {
  const Eigen::Index nz = W.rows(), nc = J.rows();
  if (W.cols() != nz || J.cols() != nz || grad.size() != nz || c.size() != nc)
    throw DimensionError("newton_step: inconsistent dimensions");

  DenseMatrix K = DenseMatrix::Zero(nz + nc, nz + nc);
  K.topLeftCorner(nz, nz) = W;
  K.topRightCorner(nz, nc) = J.transpose();
  K.bottomLeftCorner(nc, nz) = J;
  Eigen::VectorXd rhs(nz + nc);
  rhs << -grad, -c;

  constexpr double kMaxDelta = 1e6;
  double delta = delta_init;
  for (;;) {
    if (delta > 0.0) K.topLeftCorner(nz, nz) = W + delta * DenseMatrix::Identity(nz, nz);
    SymmetricIndefiniteFactorization fact(K);
    const Inertia& in = fact.inertia();
    if (in.zero == 0 && in.positive == nz && in.negative == nc) {
      const Eigen::VectorXd sol = fact.solve(rhs);
      return {sol.head(nz), sol.tail(nc), delta, in};
    }
    delta = delta > 0.0 ? 10.0 * delta : delta_min;
    if (delta > kMaxDelta)
      throw SolverBreakdown("KKT matrix has wrong inertia or is singular after maximal regularization");
  }
}

Eigen::VectorXd default_initial_guess(const OcpProblem& prob, const NlpLayout& layout) {
  Eigen::MatrixXd X(prob.n, layout.points()), U(prob.m, layout.points());
  const Eigen::VectorXd start =
      prob.guess_start.size() == prob.n ? prob.guess_start : Eigen::VectorXd::Zero(prob.n);
  const Eigen::VectorXd end = prob.guess_end.size() == prob.n ? prob.guess_end : start;
  const Eigen::VectorXd u =
      prob.guess_control.size() == prob.m ? prob.guess_control : Eigen::VectorXd::Zero(prob.m);
  for (int p = 0; p < layout.points(); ++p) {
    const double s = layout.time(p) / layout.mesh().horizon();
    X.col(p) = (1.0 - s) * start + s * end;
    U.col(p) = u;
  }
  return layout.pack(X, U);
}

namespace {

struct MeritParts {
  double objective;
  double violation;  // l1 norm of constraints
};

MeritParts merit_parts(const OcpProblem& prob, const NlpLayout& layout, const Eigen::VectorXd& z) {
  const NlpEvaluation ev = evaluate_nlp(prob, layout, z, Eigen::VectorXd(), false);
  return {ev.objective, ev.constraints.lpNorm<1>()};
}

}  // namespace

std::pair<DiscreteKkt, SolveReport> solve(const OcpProblem& prob, const Mesh& mesh,
                                          const Scheme& scheme, const SolverOptions& options,
                                          const std::optional<InitialGuess>& guess) {
  options.validate();
  const NlpLayout layout = assemble(prob, mesh, scheme);
  const int nz = layout.n_z(), nc = layout.n_c();

  SolveReport report;
  Eigen::VectorXd z, y = Eigen::VectorXd::Zero(nc);
  if (guess) {
    if (guess->z.size() != nz) throw DimensionError("initial guess has wrong size");
    z = guess->z;
    if (guess->y) {
      if (guess->y->size() != nc) throw DimensionError("initial multiplier guess has wrong size");
      y = *guess->y;
    }
    report.initial_guess = guess->description;
  } else {
    z = default_initial_guess(prob, layout);
    report.initial_guess = "linear state interpolation, constant nominal control";
  }

  double mu = 1.0;
  double delta_prev = 0.0;
  for (int it = 0;; ++it) {
    const NlpEvaluation ev = evaluate_nlp(prob, layout, z, y, true);
    const Eigen::VectorXd residual = ev.gradient + ev.jacobian.transpose() * y;
    report.stationarity = residual.lpNorm<Eigen::Infinity>();
    report.feasibility = nc > 0 ? ev.constraints.lpNorm<Eigen::Infinity>() : 0.0;
    report.kkt_residual = std::max(report.stationarity, report.feasibility);
    report.iterations = it;
    if (report.kkt_residual <= options.kkt_tolerance) {
      report.converged = true;
      report.message = "converged";
      break;
    }
    if (it >= options.max_iterations) {
      report.message = "maximum iterations reached";
      break;
    }

    const DenseMatrix W = DenseMatrix(ev.hessian);
    const DenseMatrix J = DenseMatrix(ev.jacobian);
    // Retry without regularization first; fall back to the last working delta.
    NewtonStep step;
    try {
      step = newton_step(W, J, ev.gradient, ev.constraints, 0.0,
                         std::max(options.regularization, 0.1 * delta_prev));
    } catch (const SolverBreakdown&) {
      // Primal regularization cannot repair a rank-deficient J; name that cause.
      if (nc > 0) nullspace_basis(J);
      throw;
    }
    delta_prev = step.regularization;
    report.regularization = step.regularization;

    const double ynorm = step.y.lpNorm<Eigen::Infinity>();
    if (mu < ynorm) mu = options.penalty_factor * ynorm;

    const double violation = ev.constraints.lpNorm<1>();
    const double merit0 = ev.objective + mu * violation;
    const double slope = ev.gradient.dot(step.dz) - mu * violation;
    const double noise = 10.0 * std::numeric_limits<double>::epsilon() * std::abs(merit0);

    auto merit_at = [&](const Eigen::VectorXd& zt) {
      const MeritParts mp = merit_parts(prob, layout, zt);
      return mp.objective + mu * mp.violation;
    };

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd z_next;
    double merit_next = merit0;
    for (;;) {
      z_next = z + alpha * step.dz;
      merit_next = merit_at(z_next);
      if (merit_next <= merit0 + options.armijo * alpha * std::min(slope, 0.0) + noise) {
        accepted = true;
        break;
      }
      if (alpha == 1.0 && nc > 0) {
        // Second-order correction against the Maratos effect.
        const Eigen::VectorXd c_trial = evaluate_nlp(prob, layout, z_next, Eigen::VectorXd(), false).constraints;
        const NewtonStep corr = newton_step(W, J, Eigen::VectorXd::Zero(nz), c_trial,
                                            step.regularization, options.regularization);
        const Eigen::VectorXd z_soc = z_next + corr.dz;
        const double merit_soc = merit_at(z_soc);
        if (merit_soc <= merit0 + options.armijo * std::min(slope, 0.0) + noise) {
          z_next = z_soc;
          merit_next = merit_soc;
          accepted = true;
          break;
        }
      }
      alpha *= options.backtrack;
      if (alpha < options.min_step) break;
    }
    if (!accepted) {
      report.message = "line search failed";
      break;
    }
    report.merit_steps.emplace_back(merit0, merit_next);
    z = z_next;
    y = y + alpha * (step.y - y);
  }

  DiscreteKkt kkt;
  kkt.layout = layout;
  kkt.z = z;
  kkt.y = y;
  kkt.states = layout.states(z);
  kkt.controls = layout.controls(z);
  const CostateEstimate ce = extract_costates(layout, y);
  kkt.costates = ce.values;
  kkt.costate_jump = ce.max_node_jump;
  kkt.lambda = y.segment(layout.boundary_row(0), layout.n_b());
  kkt.converged = report.converged;
  return {kkt, report};
}

}  // namespace ssoc
