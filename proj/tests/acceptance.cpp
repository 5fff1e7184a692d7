// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented above it.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "ssoc/errors.hpp"
#include "ssoc/refine.hpp"
#include "ssoc/report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssoc;

namespace {

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    std::cout << "    [" << (ok ? "ok" : "not met") << "] " << what << "\n";
  }
  void note(const std::string& what) { std::cout << "    " << what << "\n"; }
  bool finish() const {
    std::cout << "criterion " << id_ << " (" << title_ << "): " << (ok_ ? "PASS" : "FAIL") << "\n" << std::flush;
    return ok_;
  }
  void fail_with(const std::string& why) { check(false, why); }

 private:
  int id_;
  std::string title_;
  bool ok_ = true;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ssoc-acceptance-" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct CliRun {
  int code = -1;
  double seconds = 0.0;
};

CliRun cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(SSOC_CLI_PATH) + " " + args + " --out-dir " + dir.string() + " >" +
                          (dir / "stdout.txt").string() + " 2>" + (dir / "stderr.txt").string();
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double get(const json& j, const char* key) { return number_from_json(j.at(key)); }

// Every pipeline run made by the suite, for the residual-relation criterion.
struct RecordedRun {
  std::string label;
  ResidualReport residuals;
  double horizon = 1.0;
};
std::vector<RecordedRun> g_runs;
void record(const std::string& label, const ResidualReport& r, double horizon) {
  g_runs.push_back({label, r, horizon});
}
void record(const std::string& label, const json& certificate) {
  record(label, residuals_from_json(certificate.at("residuals")),
         certificate.at("provenance").at("mesh").back().get<double>());
}

json g_quadrotor_certificate;

bool criterion1() {
  Criterion c(1, "quadrotor end-to-end");
  const fs::path d = workdir("c1");
  const CliRun r = cli("certify --problem quadrotor --n 35 --scheme hermite-simpson", d);
  if (!fs::exists(d / "certificate.json")) {
    c.fail_with("certify produced no certificate (exit " + std::to_string(r.code) + ")");
    return c.finish();
  }
  const json j = json::parse(slurp(d / "certificate.json"));
  g_quadrotor_certificate = j;
  record("quadrotor N=35", j);
  const json& solver = j["provenance"]["solver"];
  const json& res = j["residuals"];
  const double alpha = get(j, "alpha_hat");
  c.check(solver["converged"].get<bool>() && get(solver, "kkt_residual") <= 1e-12,
          "solver converged, KKT residual " + num(get(solver, "kkt_residual")));
  c.check(alpha >= paper::kAlphaHat / 5 && alpha <= paper::kAlphaHat * 5,
          "alpha_hat " + num(alpha) + " within x5 of 6.29e-4 (euclidean " + num(get(j, "alpha_hat_euclidean")) + ")");
  c.check(get(res, "node_dyn_inf") <= 1e-10 && get(res, "node_stat_inf") <= 1e-10,
          "node residuals dyn " + num(get(res, "node_dyn_inf")) + ", stat " + num(get(res, "node_stat_inf")));
  c.check(get(res, "E_N2") <= 1e-6, "dense-grid E_N2 " + num(get(res, "E_N2")) + " <= 1e-6");
  c.check(get(j, "alpha_cont") > 0.0, "alpha_cont " + num(get(j, "alpha_cont")) + " > 0");
  c.check(j["accepted"].get<bool>() && r.code == 0,
          "accepted (exit " + std::to_string(r.code) + ", reason: " + j["reason"].get<std::string>() + ")");
  c.check(j["proximity"]["ok"].get<bool>(), "proximity flag");
  c.check(r.seconds <= 60.0, "runtime " + num(r.seconds) + " s <= 60 s");
  c.note("C_T " + num(get(j["constants"], "C_T")) + ", C_T*E_N2 " + num(get(j["constants"], "C_T") * get(res, "E_N2")));
  return c.finish();
}

bool criterion2() {
  Criterion c(2, "published arithmetic chain");
  const fs::path d = workdir("c2");
  const CliRun r = cli(
      "certify --problem quadrotor --n 35 --paper-constants --inject-e2 3.27e-14 --inject-einf 7.05e-14 "
      "--inject-alpha-hat 6.29e-4",
      d);
  if (!fs::exists(d / "certificate.json")) {
    c.fail_with("no certificate (exit " + std::to_string(r.code) + ")");
    return c.finish();
  }
  const json j = json::parse(slurp(d / "certificate.json"));
  const double threshold = get(j, "threshold"), alpha_cont = get(j, "alpha_cont");
  c.check(threshold >= 3.2e-11 && threshold <= 4.7e-11, "threshold " + num(threshold) + " in [3.2e-11, 4.7e-11]");
  c.check(std::abs(alpha_cont - 6.29e-4) < 0.5e-6, "alpha_cont " + num(alpha_cont) + " = 6.29e-4 to 3 figures");
  const bool has_r = !j["trust_radius"].is_null();
  const double radius = has_r ? get(j, "trust_radius") : 0.0;
  c.check(has_r && std::abs(radius - 2.885e-4) <= 1e-7, "r " + num(radius) + " = 2.885e-4 +- 1e-7");
  const double prox = get(j["proximity"], "C_close_E_inf");
  c.check(std::abs(prox - 4.18e-12) <= 1e-14, "proximity product " + num(prox) + " = 4.18e-12 +- 1e-14");
  c.check(j["accepted"].get<bool>() && r.code == 0, "accepted (exit " + std::to_string(r.code) + ")");
  return c.finish();
}

bool criterion3() {
  Criterion c(3, "quadrotor mesh sweep");
  const fs::path d = workdir("c3");
  const CliRun r = cli("sweep --problem quadrotor --n-list 10,15,20,25,30,35", d);
  const auto rows = csv_rows(slurp(d / "convergence.csv"));
  if (rows.size() != 7) {
    c.fail_with("convergence.csv has " + std::to_string(rows.size()) + " lines (exit " + std::to_string(r.code) + ")");
    return c.finish();
  }
  bool all_accepted = true, monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const double e2 = std::stod(row[1]);
    all_accepted = all_accepted && row[5] == "true";
    monotone = monotone && e2 <= 1.1 * prev;
    prev = e2;
    c.note("N " + row[0] + ": E_N2 " + num(e2) + ", alpha_hat " + num(std::stod(row[3])) + ", threshold " +
           num(std::stod(row[4])) + ", accepted " + row[5] + " (" + row[6] + ")");
  }
  c.check(all_accepted, "accepted on every row");
  c.check(monotone, "E_N2 non-increasing in N within 10%");
  return c.finish();
}

bool criterion4() {
  Criterion c(4, "constants reproduction");
  if (g_quadrotor_certificate.is_null()) {
    c.fail_with("no N=35 certificate");
    return c.finish();
  }
  const json& k = g_quadrotor_certificate["constants"];
  const double sigma = get(k, "sigma_min_Mh"), cgeo = get(k, "C_geo"), m2f = get(k, "M2f"), l21 = get(k, "L21_f");
  c.check(sigma >= 1.87e-2 / 1.15 && sigma <= 1.87e-2 * 1.15, "sigma_min(M_h) " + num(sigma) + " in [1.63e-2, 2.15e-2]");
  c.check(cgeo <= 65.0, "C_geo " + num(cgeo) + " <= 65");
  c.check(m2f >= 16.0 && m2f <= 20.0, "M2f " + num(m2f) + " in [16, 20]");
  c.check(l21 >= 0.9 && l21 <= 1.6, "L21_f " + num(l21) + " in [0.9, 1.6]");
  c.note("reported, not asserted: Lambda " + num(get(k, "Lambda")) + " (published 1.09), C_close " +
         num(get(k, "C_close_inf")) + " (published 59.36)");
  return c.finish();
}

bool criterion5() {
  Criterion c(5, "oracle equivalence");
  {
    const OcpProblem p = builtin_problem("double-integrator-lq");
    const auto [d, rep] = solve(p, Mesh::uniform(1.0, 10), Scheme::hermite_simpson());
    const NlpEvaluation ev = evaluate_nlp(p, d.layout, d.z, d.y);
    const DenseMatrix W(ev.hessian), J(ev.jacobian);
    const DenseMatrix M = variation_norm_weights(d.layout).asDiagonal();
    const double alpha = reduced_curvature(W, J, M).alpha_hat;
    const DenseMatrix Z = nullspace_basis(J);
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10000; ++s) {
      const Eigen::VectorXd v = Z * oracle::random_vector(static_cast<int>(Z.cols()));
      best = std::min(best, v.dot(W * v) / v.dot(M * v));
    }
    c.check(alpha <= best + 1e-12 && best - alpha <= 1e-6,
            "(a) pencil " + num(alpha) + " vs sampled minimum " + num(best));
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const DenseMatrix A = oracle::random_matrix(8, 8);
      worst = std::max(worst, std::abs(sigma_min(A) * oracle::inverse_norm(A) - 1.0));
    }
    c.check(worst <= 1e-8, "(b) max |sigma_min * |A^-1| - 1| = " + num(worst));
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const DenseMatrix A = oracle::random_symmetric(8);
      worst = std::max(worst, std::abs(sym_eig_min(A) - oracle::charpoly_min_root(A)));
    }
    c.check(worst <= 1e-8, "(c) max |sym_eig_min - charpoly root| = " + num(worst));
  }
  return c.finish();
}

bool criterion6() {
  Criterion c(6, "derivative correctness");
  for (const auto& name : builtin_problem_names()) {
    const OcpProblem p = builtin_problem(name);
    const int nv = p.n + p.m;
    double gerr = 0.0, herr = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double t = oracle::random_vector(1, 0, p.horizon)[0];
      const Eigen::VectorXd xu = oracle::random_vector(nv, -2, 2);
      const PointDerivatives d = eval_point(p, t, xu.head(p.n), xu.tail(p.m));
      auto f_of = [&](const Eigen::VectorXd& z) { return eval_dynamics(p, t, z.head(p.n), z.tail(p.m)); };
      auto L_of = [&](const Eigen::VectorXd& z) { return eval_running_cost(p, t, z.head(p.n), z.tail(p.m)); };
      Eigen::MatrixXd Jad(p.n, nv);
      Jad << d.f_x, d.f_u;
      gerr = std::max({gerr, oracle::rel_err(Jad, oracle::fd_jacobian(f_of, xu)),
                       oracle::rel_err(d.L_grad, oracle::fd_gradient(L_of, xu))});
      herr = std::max(herr, oracle::rel_err(d.L_hessian, oracle::fd_hessian(L_of, xu)));
      for (int k = 0; k < p.n; ++k) {
        auto fk = [&](const Eigen::VectorXd& z) { return f_of(z)[k]; };
        herr = std::max(herr, oracle::rel_err(d.f_hessian[static_cast<std::size_t>(k)], oracle::fd_hessian(fk, xu)));
      }
      const Eigen::VectorXd ends = oracle::random_vector(2 * p.n, -2, 2);
      const Eigen::VectorXd lambda = oracle::random_vector(p.n_b);
      const EndpointEval e = eval_endpoint_terms(p, ends.head(p.n), ends.tail(p.n), lambda);
      auto K_of = [&](const Eigen::VectorXd& z) { return eval_endpoint_terms(p, z.head(p.n), z.tail(p.n), lambda).K; };
      Eigen::VectorXd Kg(2 * p.n);
      Kg << e.K_x0, e.K_xT;
      gerr = std::max(gerr, oracle::rel_err(Kg, oracle::fd_gradient(K_of, ends)));
      herr = std::max(herr, oracle::rel_err(e.K_hessian, oracle::fd_hessian(K_of, ends)));
    }
    c.check(gerr <= 1e-6 && herr <= 1e-4,
            name + ": gradient rel. err " + num(gerr) + ", Hessian rel. err " + num(herr) + " over 100 points");
  }
  return c.finish();
}

bool criterion7() {
  Criterion c(7, "analytic LQ solution");
  const auto exact = oracle::double_integrator_lq();
  const OcpProblem p = builtin_problem("double-integrator-lq");
  const auto [d, rep] = solve(p, Mesh::uniform(1.0, 20), Scheme::hermite_simpson());
  const Reconstruction rec = reconstruct(p, d);
  double xerr = 0.0, perr = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double t = k / 20.0;
    xerr = std::max(xerr, (d.states.col(d.layout.node_point(k)) - exact.state(t)).cwiseAbs().maxCoeff());
    perr = std::max(perr, (rec.P.eval(t) - exact.costate(t)).cwiseAbs().maxCoeff());
  }
  c.check(xerr <= 1e-6, "node states vs closed form: " + num(xerr) + " <= 1e-6");
  c.check(perr <= 1e-5, "reconstructed costate vs closed form: " + num(perr) + " <= 1e-5");
  return c.finish();
}

bool criterion8() {
  Criterion c(8, "residual identities");
  double worst_rel = 0.0;
  for (const std::string name : {"quadrotor", "double-integrator-lq", "double-integrator-transfer", "stiff-lq"}) {
    for (Scheme s : {Scheme::trapezoidal(), Scheme::hermite_simpson()}) {
      const OcpProblem p = builtin_problem(name);
      const PipelineResult r = certify_once(p, Mesh::uniform(p.horizon, 14), s, PipelineConfig{});
      const ResidualReport& rr = r.certificate.residuals;
      record(name + " " + s.name() + " N=14", rr, p.horizon);
      double dyn = 0.0, stat = 0.0;
      for (const auto& ir : rr.per_interval) {
        dyn += ir.dyn_L2 * ir.dyn_L2;
        stat += ir.stat_L2 * ir.stat_L2;
      }
      auto rel = [](double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / b; };
      worst_rel = std::max({worst_rel, rel(dyn, rr.e_dyn_L2 * rr.e_dyn_L2), rel(stat, rr.e_stat_L2 * rr.e_stat_L2)});
    }
  }
  c.check(worst_rel <= 1e-12, "decomposition vs global L2, worst rel. err " + num(worst_rel));

  {
    const OcpProblem p = builtin_problem("double-integrator-transfer");
    const auto [d, rep] = solve(p, Mesh::uniform(1.0, 20), Scheme::hermite_simpson());
    const Reconstruction base = reconstruct(p, d);
    std::vector<double> e;
    for (double eps : {1e-4, 1e-3, 1e-2}) {
      const Reconstruction pert =
          perturb_controls(base, [eps](double t) { return Eigen::VectorXd::Constant(1, eps * std::sin(M_PI * t)); });
      e.push_back(compute_residuals(p, pert).e_stat_L2);
    }
    const double r1 = e[1] / e[0], r2 = e[2] / e[1];
    c.check(r1 >= 8 && r1 <= 12 && r2 >= 8 && r2 <= 12,
            "perturbation linearity: successive ratios " + num(r1) + ", " + num(r2));
  }

  int violations = 0;
  for (const auto& run : g_runs) {
    if (!residual_relation_check(run.residuals, run.horizon)) {
      ++violations;
      c.note("relation violated on " + run.label);
    }
  }
  c.check(violations == 0, "E_N2 <= sqrt(T) E_inf + e_bc on all " + std::to_string(g_runs.size()) + " pipeline runs");
  return c.finish();
}

bool criterion9() {
  Criterion c(9, "negative controls");
  for (const std::string name : {"double-integrator-transfer", "double-integrator-lq"}) {
    const fs::path base = workdir("c9-" + name), pert = workdir("c9p-" + name);
    const CliRun a = cli("certify --problem " + name + " --n 20", base);
    const CliRun b = cli("certify --problem " + name + " --n 20 --perturb-controls 1e-2", pert);
    if (!fs::exists(base / "certificate.json") || !fs::exists(pert / "certificate.json")) {
      c.fail_with(name + ": missing certificate");
      continue;
    }
    const json ja = json::parse(slurp(base / "certificate.json")), jb = json::parse(slurp(pert / "certificate.json"));
    record(name + " N=20", ja);
    record(name + " N=20 perturbed", jb);
    const double ca = get(ja, "alpha_cont"), cb = get(jb, "alpha_cont");
    const bool flipped = ja["accepted"].get<bool>() && !jb["accepted"].get<bool>();
    const bool dropped = ca > 0.0 && cb <= 0.5 * ca;
    c.check(ja["accepted"].get<bool>() && (flipped || dropped),
            "(i) " + name + ": baseline accepted " + (ja["accepted"].get<bool>() ? "yes" : "no") + " (exit " +
                std::to_string(a.code) + "), perturbed accepted " + (jb["accepted"].get<bool>() ? "yes" : "no") +
                " (exit " + std::to_string(b.code) + "), alpha_cont " + num(ca) + " -> " + num(cb));
  }
  {
    OcpProblem p = builtin_problem("double-integrator-transfer");
    p.n_b = 3;
    p.boundary = [](AdSpan, AdSpan xT) { return AdVector{xT[0] - 1.0, xT[1], 2.0 * xT[0] - 2.0}; };
    std::string outcome;
    bool ok = false;
    try {
      certify_once(p, Mesh::uniform(1.0, 10), Scheme::hermite_simpson(), PipelineConfig{});
      outcome = "a certificate was issued";
    } catch (const ConstraintQualificationError& e) {
      ok = true;
      outcome = std::string("constraint-qualification error: ") + e.what();
    } catch (const std::exception& e) {
      outcome = std::string("other error: ") + e.what();
    }
    c.check(ok, "(ii) redundant boundary row -> " + outcome);
  }
  return c.finish();
}

}  // namespace

// Usage: ssoc_acceptance [--strict | --expect-pass 2,5,...]
// Default and --strict exit nonzero when any criterion fails; --expect-pass only
// for the listed criteria. Every criterion is evaluated and reported either way.
int main(int argc, char** argv) {
  std::set<int> expected;
  bool strict = true;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--strict") {
      strict = true;
    } else if (arg == "--expect-pass" && i + 1 < argc) {
      strict = false;
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) expected.insert(std::stoi(item));
    } else {
      std::cerr << "usage: ssoc_acceptance [--strict | --expect-pass 2,5,...]\n";
      return 2;
    }
  }

  std::cout << "acceptance suite\n";
  const std::vector<std::pair<int, bool (*)()>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {9, criterion9}, {8, criterion8}};
  std::map<int, bool> passed;
  bool errored = false;
  for (const auto& [id, criterion] : criteria) {
    try {
      passed[id] = criterion();
    } catch (const std::exception& e) {
      std::cout << "    unexpected error: " << e.what() << "\n";
      std::cout << "criterion " << id << ": FAIL\n";
      passed[id] = false;
      errored = true;
    }
  }
  fs::remove_all(fs::temp_directory_path() / ("ssoc-acceptance-" + std::to_string(::getpid())));

  int failed = 0, regressions = 0;
  for (const auto& [id, ok] : passed) {
    if (ok) continue;
    ++failed;
    if (strict || expected.count(id)) ++regressions;
  }
  std::cout << (9 - failed) << " of 9 criteria met\n";
  if (!strict) std::cout << regressions << " failure(s) among the expected-to-pass set\n";
  return (regressions > 0 || errored) ? 1 : 0;
}
