#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssoc/certify.hpp"
#include "ssoc/constants.hpp"
#include "ssoc/model.hpp"
#include "ssoc/reconstruction.hpp"
#include "ssoc/solver.hpp"
#include "ssoc/transcription.hpp"

namespace ssoc {

/// Everything one certification run needs besides the problem, mesh and scheme.
struct PipelineConfig {
  SolverOptions solver;
  TubeSpec tube;
  int quad_points = 5;
  double safety_factor = 1.5;
  double C_xp_factor = 1.0;
  /// Replace C_geo, Gamma, Lambda and C_close by the values reported for the quadrotor.
  bool paper_constants = false;
  std::optional<double> inject_E_N2;
  std::optional<double> inject_E_inf;
  std::optional<double> inject_alpha_hat;
  /// Adds amplitude * sin(pi t / T) to every control sample after the solve.
  double control_perturbation = 0.0;
  /// Recorded for reproducibility; the tube grid itself is deterministic.
  std::uint64_t seed = 0;

  void validate() const;
};

struct PipelineResult {
  DiscreteKkt dkkt;
  SolveReport solve;
  Reconstruction reconstruction;
  Certificate certificate;
};

/// solve -> reconstruct -> residuals -> constants -> certify, once.
/// Throws NonConvergence when the solver stops without meeting its tolerance.
PipelineResult certify_once(const OcpProblem& prob, const Mesh& mesh, const Scheme& scheme,
                            const PipelineConfig& config,
                            const std::optional<InitialGuess>& guess = std::nullopt);

/// Primal warm start on `mesh` sampled from a previous reconstruction.
InitialGuess interpolate_guess(const OcpProblem& prob, const Reconstruction& rec, const Mesh& mesh,
                               const Scheme& scheme);

struct RefinePolicy {
  double fraction = 0.3;
  int max_rounds = 8;
  int max_intervals = 400;

  void validate() const;
};

struct RoundSummary {
  int round = 0;
  int intervals = 0;
  std::vector<double> mesh;
  int solver_iterations = 0;
  double E_N2 = 0.0;
  double E_inf = 0.0;
  double alpha_hat = 0.0;
  double threshold = 0.0;
  double alpha_cont = 0.0;
  bool accepted = false;
  std::string reason;
  std::vector<int> bisected;  // intervals split after this round
};

struct RefineResult {
  std::optional<Certificate> final_certificate;
  std::vector<RoundSummary> history;
  std::string termination;  // "accepted", "max rounds reached", "interval limit reached", or an error
  bool aborted = false;
};

/// Certify-or-refine: bisects the worst fraction of intervals after every rejection.
RefineResult certify_loop(const OcpProblem& prob, const Mesh& initial_mesh, const Scheme& scheme,
                          const RefinePolicy& policy, const PipelineConfig& config);

}  // namespace ssoc
