#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ssoc/certify.hpp"
#include "ssoc/reconstruction.hpp"
#include "ssoc/refine.hpp"
#include "ssoc/residuals.hpp"

namespace ssoc {

/// Non-finite doubles are written as the strings "inf", "-inf" and "nan".
nlohmann::json number_to_json(double v);
double number_from_json(const nlohmann::json& j);

nlohmann::json residuals_to_json(const ResidualReport& r);
ResidualReport residuals_from_json(const nlohmann::json& j);

nlohmann::json constants_to_json(const ConstantsBundle& b);
ConstantsBundle constants_from_json(const nlohmann::json& j);

nlohmann::json solve_report_to_json(const SolveReport& s);
SolveReport solve_report_from_json(const nlohmann::json& j);

nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

nlohmann::json refine_to_json(const RefineResult& r);

/// One row of a mesh sweep.
struct SweepRow {
  int N = 0;
  std::string status = "ok";  // "ok" or the error message
  double E_N2 = 0.0;
  double E_inf = 0.0;
  double alpha_hat = 0.0;
  double threshold = 0.0;
  bool accepted = false;
};

/// %.17g formatting, with inf/nan spelled as in JSON.
std::string format_number(double v);

/// Columns t, x_1..x_n, u_1..u_m, p_1..p_n on `samples_per_interval` points per mesh interval plus T.
std::string trajectory_csv(const Reconstruction& rec, int samples_per_interval = 10);
/// Columns k, t_k, t_k1, dyn_L2, stat_L2.
std::string residuals_csv(const ResidualReport& r);
/// Columns N, E_N2, E_inf, alpha_hat, threshold, accepted, status.
std::string convergence_csv(const std::vector<SweepRow>& rows);

/// Throws Error when the file cannot be written.
void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace ssoc
