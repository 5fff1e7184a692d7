#include "ssoc/refine.hpp"

#include <cmath>
#include <numbers>

#include "ssoc/errors.hpp"
#include "ssoc/residuals.hpp"

namespace ssoc {

void PipelineConfig::validate() const {
  solver.validate();
  tube.validate();
  if (quad_points < 3) throw ContractError("quad points per interval must be at least 3");
  if (!(safety_factor >= 1.0)) throw ContractError("safety factor must be >= 1");
  if (!(C_xp_factor > 0.0)) throw ContractError("C_xp factor must be positive");
  if (inject_E_N2 && !(*inject_E_N2 >= 0.0)) throw ContractError("injected E_N2 must be >= 0");
  if (inject_E_inf && !(*inject_E_inf >= 0.0)) throw ContractError("injected E_inf must be >= 0");
}

void RefinePolicy::validate() const {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ContractError("refine fraction must be in (0,1]");
  if (max_rounds < 0) throw ContractError("max rounds must be non-negative");
  if (max_intervals < 1) throw ContractError("max intervals must be positive");
}

namespace {

void perturb_discrete_controls(DiscreteKkt& dkkt, double amplitude) {
  const NlpLayout& layout = dkkt.layout;
  const double T = layout.mesh().horizon();
  for (int p = 0; p < layout.points(); ++p) {
    const double shift = amplitude * std::sin(std::numbers::pi * layout.time(p) / T);
    for (int j = 0; j < layout.m(); ++j) {
      dkkt.z(layout.control_index(p, j)) += shift;
      dkkt.controls(j, p) += shift;
    }
  }
}

}  // namespace

PipelineResult certify_once(const OcpProblem& prob, const Mesh& mesh, const Scheme& scheme,
                            const PipelineConfig& config, const std::optional<InitialGuess>& guess) {
  config.validate();
  PipelineResult out;
  auto solved = solve(prob, mesh, scheme, config.solver, guess);
  out.dkkt = std::move(solved.first);
  out.solve = std::move(solved.second);
  if (!out.solve.converged)
    throw NonConvergence("solver did not converge: " + out.solve.message + " after " +
                         std::to_string(out.solve.iterations) + " iterations, KKT residual " +
                         std::to_string(out.solve.kkt_residual));
  if (config.control_perturbation != 0.0) perturb_discrete_controls(out.dkkt, config.control_perturbation);

  out.reconstruction = reconstruct(prob, out.dkkt);
  ResidualReport residuals = compute_residuals(prob, out.reconstruction, config.quad_points);

  CurvatureOptions copt;
  copt.safety_factor = config.safety_factor;
  ConstantsBundle bundle =
      estimate_constants(prob, out.dkkt, out.reconstruction, config.tube, copt, config.C_xp_factor);
  if (config.paper_constants) apply_paper_constants(bundle);

  const NlpEvaluation ev = evaluate_nlp(prob, out.dkkt.layout, out.dkkt.z, out.dkkt.y, true);
  const DenseMatrix W(ev.hessian), J(ev.jacobian);
  const DenseMatrix M = variation_norm_weights(out.dkkt.layout).asDiagonal();
  const ReducedCurvature curv = reduced_curvature(W, J, M);

  Provenance prov;
  double alpha_hat = curv.alpha_hat;
  if (config.inject_alpha_hat) {
    alpha_hat = *config.inject_alpha_hat;
    prov.injected["alpha_hat"] = alpha_hat;
  }
  if (config.inject_E_N2) {
    residuals.E_N2 = *config.inject_E_N2;
    prov.injected["E_N2"] = residuals.E_N2;
  }
  if (config.inject_E_inf) {
    residuals.E_inf = *config.inject_E_inf;
    prov.injected["E_inf"] = residuals.E_inf;
  }
  if (config.control_perturbation != 0.0) prov.injected["control_perturbation"] = config.control_perturbation;

  const AcceptanceTest test = acceptance_test(alpha_hat, bundle, residuals);
  out.certificate = finalize_certificate(alpha_hat, bundle, residuals, test, out.solve.converged);
  out.certificate.alpha_hat_euclidean = curv.alpha_hat_euclidean;

  prov.problem = prob.name;
  prov.scheme = scheme.name();
  prov.intervals = mesh.intervals();
  prov.h_max = mesh.max_step();
  prov.mesh = mesh.nodes();
  prov.solver = out.solve;
  prov.paper_constants = config.paper_constants;
  out.certificate.provenance = std::move(prov);
  return out;
}

InitialGuess interpolate_guess(const OcpProblem& prob, const Reconstruction& rec, const Mesh& mesh,
                               const Scheme& scheme) {
  const NlpLayout layout = assemble(prob, mesh, scheme);
  Eigen::MatrixXd X(prob.n, layout.points()), U(prob.m, layout.points());
  for (int p = 0; p < layout.points(); ++p) {
    X.col(p) = rec.X.eval(layout.time(p));
    U.col(p) = rec.U.eval(layout.time(p));
  }
  InitialGuess g;
  g.z = layout.pack(X, U);
  g.description = "interpolated from the previous round's reconstruction";
  return g;
}

RefineResult certify_loop(const OcpProblem& prob, const Mesh& initial_mesh, const Scheme& scheme,
                          const RefinePolicy& policy, const PipelineConfig& config) {
  policy.validate();
  RefineResult result;
  Mesh mesh = initial_mesh;
  std::optional<InitialGuess> guess;
  for (int round = 0;; ++round) {
    PipelineResult run;
    try {
      run = certify_once(prob, mesh, scheme, config, guess);
    } catch (const Error& e) {
      result.aborted = true;
      result.termination = std::string("aborted: ") + e.what();
      return result;
    }
    const Certificate& c = run.certificate;
    RoundSummary s;
    s.round = round;
    s.intervals = mesh.intervals();
    s.mesh = mesh.nodes();
    s.solver_iterations = run.solve.iterations;
    s.E_N2 = c.residuals.E_N2;
    s.E_inf = c.residuals.E_inf;
    s.alpha_hat = c.alpha_hat;
    s.threshold = c.threshold;
    s.alpha_cont = c.alpha_cont;
    s.accepted = c.accepted;
    s.reason = c.reason;
    result.final_certificate = c;

    if (c.accepted) {
      result.termination = "accepted";
      result.history.push_back(std::move(s));
      return result;
    }
    if (round >= policy.max_rounds) {
      result.termination = "max rounds reached";
      result.history.push_back(std::move(s));
      return result;
    }
    const std::vector<int> worst = worst_intervals(c.residuals, policy.fraction);
    if (mesh.intervals() + static_cast<int>(worst.size()) > policy.max_intervals) {
      result.termination = "interval limit reached";
      result.history.push_back(std::move(s));
      return result;
    }
    s.bisected = worst;
    result.history.push_back(std::move(s));
    const Mesh next = mesh.bisected(worst);
    guess = interpolate_guess(prob, run.reconstruction, next, scheme);
    mesh = next;
  }
}

}  // namespace ssoc
