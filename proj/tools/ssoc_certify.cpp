// Command-line front end: list | certify | sweep | refine.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssoc/errors.hpp"
#include "ssoc/refine.hpp"
#include "ssoc/report_io.hpp"

namespace {

constexpr int kExitAccepted = 0;
constexpr int kExitError = 1;
constexpr int kExitRejected = 2;

struct RunConfig {
  std::string problem = "quadrotor";
  int n = 35;
  std::string scheme = "hermite-simpson";
  double tol = 1e-12;
  int max_iterations = 200;
  double tube_dx = 0.1, tube_du = 0.1, tube_dp = 0.1;
  int tube_samples = 3;
  int quad_points = 5;
  std::string out_dir = ".";
  bool paper_constants = false;
  std::uint64_t seed = 0;
  double safety_factor = 1.5;
  double cxp_factor = 1.0;
  std::optional<double> inject_e2, inject_einf, inject_alpha_hat;
  double perturb_controls = 0.0;

  ssoc::PipelineConfig pipeline() const {
    ssoc::PipelineConfig c;
    c.solver.kkt_tolerance = tol;
    c.solver.max_iterations = max_iterations;
    c.tube.dx = tube_dx;
    c.tube.du = tube_du;
    c.tube.dp = tube_dp;
    c.tube.samples_per_axis = tube_samples;
    c.quad_points = quad_points;
    c.paper_constants = paper_constants;
    c.seed = seed;
    c.safety_factor = safety_factor;
    c.C_xp_factor = cxp_factor;
    c.inject_E_N2 = inject_e2;
    c.inject_E_inf = inject_einf;
    c.inject_alpha_hat = inject_alpha_hat;
    c.control_perturbation = perturb_controls;
    return c;
  }
};

void add_common(CLI::App* cmd, RunConfig& cfg, bool with_n) {
  cmd->add_option("--problem", cfg.problem, "builtin problem name")->capture_default_str();
  if (with_n) cmd->add_option("--n", cfg.n, "mesh intervals")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--scheme", cfg.scheme, "collocation scheme")
      ->check(CLI::IsMember({"trapezoidal", "hermite-simpson"}))
      ->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "solver KKT tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-iter", cfg.max_iterations, "solver iteration limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tube-dx", cfg.tube_dx, "tube radius in x")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--tube-du", cfg.tube_du, "tube radius in u")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--tube-dp", cfg.tube_dp, "tube radius in p")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--tube-samples", cfg.tube_samples, "tube samples per axis")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  cmd->add_option("--quad-points", cfg.quad_points, "Gauss-Legendre points per interval")
      ->check(CLI::Range(3, 64))
      ->capture_default_str();
  cmd->add_option("--out-dir", cfg.out_dir, "output directory")->capture_default_str();
  cmd->add_flag("--paper-constants", cfg.paper_constants,
                "use the reported quadrotor constants (C_geo, Gamma, Lambda, C_close)");
  cmd->add_option("--seed", cfg.seed, "seed recorded for reproducibility")->capture_default_str();
  cmd->add_option("--safety-factor", cfg.safety_factor, "multiplier on sampled Lipschitz constants")
      ->check(CLI::Range(1.0, 1e6))
      ->capture_default_str();
  cmd->add_option("--cxp-factor", cfg.cxp_factor, "constant in front of the C_xp growth bound")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--inject-e2", cfg.inject_e2, "replace the computed E_N2")->check(CLI::NonNegativeNumber);
  cmd->add_option("--inject-einf", cfg.inject_einf, "replace the computed E_inf")->check(CLI::NonNegativeNumber);
  cmd->add_option("--inject-alpha-hat", cfg.inject_alpha_hat, "replace the computed discrete curvature");
  cmd->add_option("--perturb-controls", cfg.perturb_controls,
                  "add amplitude*sin(pi t/T) to every control sample before certification");
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void print_summary(const ssoc::Certificate& c) {
  std::cout << "problem " << c.provenance.problem << "  scheme " << c.provenance.scheme << "  N "
            << c.provenance.intervals << "\n"
            << "solver: " << c.provenance.solver.message << " in " << c.provenance.solver.iterations
            << " iterations, KKT residual " << ssoc::format_number(c.provenance.solver.kkt_residual) << "\n"
            << "alpha_hat " << ssoc::format_number(c.alpha_hat) << "  threshold "
            << ssoc::format_number(c.threshold) << "  alpha_cont " << ssoc::format_number(c.alpha_cont) << "\n"
            << "E_N2 " << ssoc::format_number(c.residuals.E_N2) << "  E_inf "
            << ssoc::format_number(c.residuals.E_inf) << "  node E_N2 "
            << ssoc::format_number(c.residuals.E_N2_nodes) << "\n"
            << "trust radius " << (c.trust_radius ? ssoc::format_number(*c.trust_radius) : std::string("none"))
            << "  proximity " << ssoc::format_number(c.proximity.C_close_E_inf)
            << (c.proximity.ok ? " ok" : " not verified") << "\n"
            << (c.accepted ? "ACCEPTED" : "REJECTED") << " (" << c.reason << ")\n";
}

int cmd_list() {
  std::cout << "problems:\n";
  for (const auto& name : ssoc::builtin_problem_names()) std::cout << "  " << name << "\n";
  std::cout << "schemes:\n  hermite-simpson\n  trapezoidal\n";
  return kExitAccepted;
}

int cmd_certify(const RunConfig& cfg) {
  const ssoc::OcpProblem prob = ssoc::builtin_problem(cfg.problem);
  const ssoc::Scheme scheme = ssoc::Scheme::parse(cfg.scheme);
  const auto out = prepare_out_dir(cfg.out_dir);
  const ssoc::PipelineResult run =
      ssoc::certify_once(prob, ssoc::Mesh::uniform(prob.horizon, cfg.n), scheme, cfg.pipeline());
  ssoc::write_text_file((out / "certificate.json").string(),
                        ssoc::certificate_to_json(run.certificate).dump(2) + "\n");
  ssoc::write_text_file((out / "trajectory.csv").string(), ssoc::trajectory_csv(run.reconstruction, 10));
  ssoc::write_text_file((out / "residuals.csv").string(), ssoc::residuals_csv(run.certificate.residuals));
  print_summary(run.certificate);
  return run.certificate.accepted ? kExitAccepted : kExitRejected;
}

int cmd_sweep(const RunConfig& cfg, std::vector<int> n_list) {
  if (n_list.empty()) throw ssoc::ContractError("sweep needs at least one N");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw ssoc::ContractError("sweep N list must be strictly ascending");
  const ssoc::OcpProblem prob = ssoc::builtin_problem(cfg.problem);
  const ssoc::Scheme scheme = ssoc::Scheme::parse(cfg.scheme);
  const auto out = prepare_out_dir(cfg.out_dir);
  std::vector<ssoc::SweepRow> rows;
  bool all_accepted = true;
  for (int N : n_list) {
    ssoc::SweepRow row;
    row.N = N;
    try {
      const ssoc::PipelineResult run =
          ssoc::certify_once(prob, ssoc::Mesh::uniform(prob.horizon, N), scheme, cfg.pipeline());
      const ssoc::Certificate& c = run.certificate;
      row.E_N2 = c.residuals.E_N2;
      row.E_inf = c.residuals.E_inf;
      row.alpha_hat = c.alpha_hat;
      row.threshold = c.threshold;
      row.accepted = c.accepted;
    } catch (const ssoc::Error& e) {
      row.status = std::string("error: ") + e.what();
    }
    all_accepted = all_accepted && row.accepted;
    std::cout << "N " << N << ": " << (row.status == "ok" ? (row.accepted ? "accepted" : "rejected") : row.status)
              << "  E_N2 " << ssoc::format_number(row.E_N2) << "\n";
    rows.push_back(row);
  }
  ssoc::write_text_file((out / "convergence.csv").string(), ssoc::convergence_csv(rows));
  return all_accepted ? kExitAccepted : kExitRejected;
}

int cmd_refine(const RunConfig& cfg, const ssoc::RefinePolicy& policy) {
  const ssoc::OcpProblem prob = ssoc::builtin_problem(cfg.problem);
  const ssoc::Scheme scheme = ssoc::Scheme::parse(cfg.scheme);
  const auto out = prepare_out_dir(cfg.out_dir);
  const ssoc::RefineResult r =
      ssoc::certify_loop(prob, ssoc::Mesh::uniform(prob.horizon, cfg.n), scheme, policy, cfg.pipeline());
  ssoc::write_text_file((out / "report.json").string(), ssoc::refine_to_json(r).dump(2) + "\n");
  for (const auto& s : r.history)
    std::cout << "round " << s.round << ": N " << s.intervals << "  E_N2 " << ssoc::format_number(s.E_N2)
              << "  " << (s.accepted ? "accepted" : "rejected") << "\n";
  std::cout << "termination: " << r.termination << "\n";
  if (r.aborted || !r.final_certificate) return kExitError;
  ssoc::write_text_file((out / "certificate.json").string(),
                        ssoc::certificate_to_json(*r.final_certificate).dump(2) + "\n");
  return r.final_certificate->accepted ? kExitAccepted : kExitRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct-collocation solver with a posteriori second-order sufficiency certificates"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<int> n_list{10, 15, 20, 25, 30, 35};
  ssoc::RefinePolicy policy;

  CLI::App* list = app.add_subcommand("list", "list builtin problems and schemes");
  CLI::App* certify = app.add_subcommand("certify", "solve and certify once");
  add_common(certify, cfg, true);
  CLI::App* sweep = app.add_subcommand("sweep", "certify on a list of uniform meshes");
  add_common(sweep, cfg, false);
  sweep->add_option("--n-list", n_list, "ascending list of N")->delimiter(',')->capture_default_str();
  CLI::App* refine = app.add_subcommand("refine", "certify, bisecting the worst intervals on rejection");
  add_common(refine, cfg, true);
  refine->add_option("--max-rounds", policy.max_rounds, "refinement rounds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  refine->add_option("--fraction", policy.fraction, "fraction of intervals bisected per round")
      ->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  refine->add_option("--max-intervals", policy.max_intervals, "interval budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*list) return cmd_list();
    if (*certify) return cmd_certify(cfg);
    if (*sweep) return cmd_sweep(cfg, n_list);
    if (*refine) return cmd_refine(cfg, policy);
  } catch (const ssoc::NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
