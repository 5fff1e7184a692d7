#include "ssoc/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ssoc/errors.hpp"

namespace ssoc {

using nlohmann::json;

json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error("unexpected numeric string '" + s + "'");
  }
  return j.get<double>();
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? number_to_json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number_from_json(j.at(key));
}

}  // namespace

json residuals_to_json(const ResidualReport& r) {
  json per = json::array();
  for (const auto& ir : r.per_interval)
    per.push_back({{"interval", ir.interval},
                   {"t0", number_to_json(ir.t0)},
                   {"t1", number_to_json(ir.t1)},
                   {"dyn_L2", number_to_json(ir.dyn_L2)},
                   {"stat_L2", number_to_json(ir.stat_L2)},
                   {"adj_L2", number_to_json(ir.adj_L2)}});
  return {
      {"e_dyn_L2", number_to_json(r.e_dyn_L2)},
      {"e_stat_L2", number_to_json(r.e_stat_L2)},
      {"e_adj_L2", number_to_json(r.e_adj_L2)},
      {"e_bc", number_to_json(r.e_bc)},
      {"E_N2", number_to_json(r.E_N2)},
      {"e_dyn_inf", number_to_json(r.e_dyn_inf)},
      {"e_adj_inf", number_to_json(r.e_adj_inf)},
      {"e_stat_inf", number_to_json(r.e_stat_inf)},
      {"e_bc_kkt", number_to_json(r.e_bc_kkt)},
      {"E_inf", number_to_json(r.E_inf)},
      {"E_inf_diag", number_to_json(r.E_inf_diag)},
      {"e_bc_weighted", number_to_json(r.e_bc_weighted)},
      {"node_dyn_inf", number_to_json(r.node_dyn_inf)},
      {"node_stat_inf", number_to_json(r.node_stat_inf)},
      {"E_N2_nodes", number_to_json(r.E_N2_nodes)},
      {"quadrature", {{"rule", r.quadrature}, {"points_per_interval", r.quad_points},
                      {"uniform_samples_per_interval", r.uniform_samples}}},
      {"per_interval", per},
  };
}

ResidualReport residuals_from_json(const json& j) {
  ResidualReport r;
  r.e_dyn_L2 = number_from_json(j.at("e_dyn_L2"));
  r.e_stat_L2 = number_from_json(j.at("e_stat_L2"));
  r.e_adj_L2 = number_from_json(j.at("e_adj_L2"));
  r.e_bc = number_from_json(j.at("e_bc"));
  r.E_N2 = number_from_json(j.at("E_N2"));
  r.e_dyn_inf = number_from_json(j.at("e_dyn_inf"));
  r.e_adj_inf = number_from_json(j.at("e_adj_inf"));
  r.e_stat_inf = number_from_json(j.at("e_stat_inf"));
  r.e_bc_kkt = number_from_json(j.at("e_bc_kkt"));
  r.E_inf = number_from_json(j.at("E_inf"));
  r.E_inf_diag = number_from_json(j.at("E_inf_diag"));
  r.e_bc_weighted = number_from_json(j.at("e_bc_weighted"));
  r.node_dyn_inf = number_from_json(j.at("node_dyn_inf"));
  r.node_stat_inf = number_from_json(j.at("node_stat_inf"));
  r.E_N2_nodes = number_from_json(j.at("E_N2_nodes"));
  const json& q = j.at("quadrature");
  r.quadrature = q.at("rule").get<std::string>();
  r.quad_points = q.at("points_per_interval").get<int>();
  r.uniform_samples = q.at("uniform_samples_per_interval").get<int>();
  for (const json& e : j.at("per_interval")) {
    IntervalResidual ir;
    ir.interval = e.at("interval").get<int>();
    ir.t0 = number_from_json(e.at("t0"));
    ir.t1 = number_from_json(e.at("t1"));
    ir.dyn_L2 = number_from_json(e.at("dyn_L2"));
    ir.stat_L2 = number_from_json(e.at("stat_L2"));
    ir.adj_L2 = number_from_json(e.at("adj_L2"));
    r.per_interval.push_back(ir);
  }
  return r;
}

#define SSOC_CONSTANT_FIELDS(X)                                                                   \
  X(rho) X(L2) X(L21_f) X(L21_L) X(L21_K) X(M2f) X(P_max) X(L21_H) X(C_int) X(c_Pi) X(A_inf)     \
  X(B_inf) X(Hux_inf) X(Hup_inf) X(C_geo) X(sigma_min_Mh) X(C_T) X(C_quad) X(C_Tprime) X(Gamma) \
  X(Gamma_tot) X(Lambda) X(C_xp_inf) X(C_u_inf) X(C_close_inf) X(safety_factor) X(C_xp_factor)  \
  X(lifting_norm) X(restriction_norm) X(h_max)

json constants_to_json(const ConstantsBundle& b) {
  json j;
#define SSOC_PUT(name) j[#name] = number_to_json(b.name);
  SSOC_CONSTANT_FIELDS(SSOC_PUT)
#undef SSOC_PUT
  j["degree"] = b.degree;
  j["source"] = b.source;
  j["formulas"] = b.formulas;
  return j;
}

ConstantsBundle constants_from_json(const json& j) {
  ConstantsBundle b;
#define SSOC_GET(name) b.name = number_from_json(j.at(#name));
  SSOC_CONSTANT_FIELDS(SSOC_GET)
#undef SSOC_GET
  b.degree = j.at("degree").get<int>();
  b.source = j.at("source").get<std::string>();
  b.formulas = j.at("formulas").get<std::map<std::string, std::string>>();
  return b;
}

#undef SSOC_CONSTANT_FIELDS

json solve_report_to_json(const SolveReport& s) {
  json steps = json::array();
  for (const auto& [before, after] : s.merit_steps)
    steps.push_back({number_to_json(before), number_to_json(after)});
  return {{"iterations", s.iterations},
          {"kkt_residual", number_to_json(s.kkt_residual)},
          {"stationarity", number_to_json(s.stationarity)},
          {"feasibility", number_to_json(s.feasibility)},
          {"converged", s.converged},
          {"regularization", number_to_json(s.regularization)},
          {"initial_guess", s.initial_guess},
          {"message", s.message},
          {"merit_steps", steps}};
}

SolveReport solve_report_from_json(const json& j) {
  SolveReport s;
  s.iterations = j.at("iterations").get<int>();
  s.kkt_residual = number_from_json(j.at("kkt_residual"));
  s.stationarity = number_from_json(j.at("stationarity"));
  s.feasibility = number_from_json(j.at("feasibility"));
  s.converged = j.at("converged").get<bool>();
  s.regularization = number_from_json(j.at("regularization"));
  s.initial_guess = j.at("initial_guess").get<std::string>();
  s.message = j.at("message").get<std::string>();
  for (const json& e : j.at("merit_steps"))
    s.merit_steps.emplace_back(number_from_json(e.at(0)), number_from_json(e.at(1)));
  return s;
}

json certificate_to_json(const Certificate& c) {
  json mesh = json::array();
  for (double t : c.provenance.mesh) mesh.push_back(number_to_json(t));
  json injected = json::object();
  for (const auto& [k, v] : c.provenance.injected) injected[k] = number_to_json(v);
  return {
      {"alpha_hat", number_to_json(c.alpha_hat)},
      {"alpha_hat_euclidean", number_to_json(c.alpha_hat_euclidean)},
      {"threshold", number_to_json(c.threshold)},
      {"lhs", number_to_json(c.lhs)},
      {"alpha_cont", number_to_json(c.alpha_cont)},
      {"trust_radius", optional_number(c.trust_radius)},
      {"proximity", {{"C_close_E_inf", number_to_json(c.proximity.C_close_E_inf)}, {"ok", c.proximity.ok}}},
      {"accepted", c.accepted},
      {"simplified_test_used", c.simplified_test_used},
      {"simplified_test_passed", c.simplified_test_passed},
      {"reason", c.reason},
      {"switch_inflation", optional_number(c.switch_inflation)},
      {"residuals", residuals_to_json(c.residuals)},
      {"constants", constants_to_json(c.constants)},
      {"provenance",
       {{"problem", c.provenance.problem},
        {"scheme", c.provenance.scheme},
        {"intervals", c.provenance.intervals},
        {"h_max", number_to_json(c.provenance.h_max)},
        {"mesh", mesh},
        {"solver", solve_report_to_json(c.provenance.solver)},
        {"tool_version", c.provenance.tool_version},
        {"paper_constants", c.provenance.paper_constants},
        {"injected", injected}}},
  };
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.alpha_hat = number_from_json(j.at("alpha_hat"));
  c.alpha_hat_euclidean = number_from_json(j.at("alpha_hat_euclidean"));
  c.threshold = number_from_json(j.at("threshold"));
  c.lhs = number_from_json(j.at("lhs"));
  c.alpha_cont = number_from_json(j.at("alpha_cont"));
  c.trust_radius = optional_from(j, "trust_radius");
  c.proximity.C_close_E_inf = number_from_json(j.at("proximity").at("C_close_E_inf"));
  c.proximity.ok = j.at("proximity").at("ok").get<bool>();
  c.accepted = j.at("accepted").get<bool>();
  c.simplified_test_used = j.at("simplified_test_used").get<bool>();
  c.simplified_test_passed = j.at("simplified_test_passed").get<bool>();
  c.reason = j.at("reason").get<std::string>();
  c.switch_inflation = optional_from(j, "switch_inflation");
  c.residuals = residuals_from_json(j.at("residuals"));
  c.constants = constants_from_json(j.at("constants"));
  const json& p = j.at("provenance");
  c.provenance.problem = p.at("problem").get<std::string>();
  c.provenance.scheme = p.at("scheme").get<std::string>();
  c.provenance.intervals = p.at("intervals").get<int>();
  c.provenance.h_max = number_from_json(p.at("h_max"));
  for (const json& t : p.at("mesh")) c.provenance.mesh.push_back(number_from_json(t));
  c.provenance.solver = solve_report_from_json(p.at("solver"));
  c.provenance.tool_version = p.at("tool_version").get<std::string>();
  c.provenance.paper_constants = p.at("paper_constants").get<bool>();
  for (const auto& [k, v] : p.at("injected").items()) c.provenance.injected[k] = number_from_json(v);
  return c;
}

json refine_to_json(const RefineResult& r) {
  json history = json::array();
  for (const RoundSummary& s : r.history) {
    json mesh = json::array();
    for (double t : s.mesh) mesh.push_back(number_to_json(t));
    history.push_back({{"round", s.round},
                       {"intervals", s.intervals},
                       {"mesh", mesh},
                       {"solver_iterations", s.solver_iterations},
                       {"E_N2", number_to_json(s.E_N2)},
                       {"E_inf", number_to_json(s.E_inf)},
                       {"alpha_hat", number_to_json(s.alpha_hat)},
                       {"threshold", number_to_json(s.threshold)},
                       {"alpha_cont", number_to_json(s.alpha_cont)},
                       {"accepted", s.accepted},
                       {"reason", s.reason},
                       {"bisected", s.bisected}});
  }
  return {{"termination", r.termination},
          {"aborted", r.aborted},
          {"rounds", static_cast<int>(r.history.size())},
          {"history", history},
          {"final_certificate",
           r.final_certificate ? certificate_to_json(*r.final_certificate) : json(nullptr)}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Reconstruction& rec, int samples_per_interval) {
  if (samples_per_interval < 1) throw ContractError("samples per interval must be positive");
  const Mesh& mesh = rec.layout.mesh();
  const int n = rec.X.dim(), m = rec.U.dim();
  std::ostringstream os;
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x" << i + 1;
  for (int j = 0; j < m; ++j) os << ",u" << j + 1;
  for (int i = 0; i < n; ++i) os << ",p" << i + 1;
  os << "\n";
  auto row = [&](double t) {
    os << format_number(t);
    const Eigen::VectorXd x = rec.X.eval(t), u = rec.U.eval(t), p = rec.P.eval(t);
    for (int i = 0; i < n; ++i) os << "," << format_number(x(i));
    for (int j = 0; j < m; ++j) os << "," << format_number(u(j));
    for (int i = 0; i < n; ++i) os << "," << format_number(p(i));
    os << "\n";
  };
  for (int k = 0; k < mesh.intervals(); ++k)
    for (int s = 0; s < samples_per_interval; ++s)
      row(mesh.node(k) + mesh.step(k) * s / samples_per_interval);
  row(mesh.horizon());
  return os.str();
}

std::string residuals_csv(const ResidualReport& r) {
  std::ostringstream os;
  os << "k,t_k,t_k1,dyn_L2,stat_L2\n";
  for (const auto& ir : r.per_interval)
    os << ir.interval << "," << format_number(ir.t0) << "," << format_number(ir.t1) << ","
       << format_number(ir.dyn_L2) << "," << format_number(ir.stat_L2) << "\n";
  return os.str();
}

std::string convergence_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "N,E_N2,E_inf,alpha_hat,threshold,accepted,status\n";
  for (const SweepRow& r : rows) {
    std::string status = r.status;
    for (char& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    os << r.N << "," << format_number(r.E_N2) << "," << format_number(r.E_inf) << ","
       << format_number(r.alpha_hat) << "," << format_number(r.threshold) << ","
       << (r.accepted ? "true" : "false") << "," << status << "\n";
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ssoc
