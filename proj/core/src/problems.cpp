#include <algorithm>
#include <array>
#include <map>

#include "ssoc/errors.hpp"
#include "ssoc/model.hpp"

namespace ssoc {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r[i++] = x;
  return r;
}

// Planar rigid-body quadrotor, state [y, z, theta, v_y, v_z, omega], control
// [u1, u2] (rotor thrusts). Quadratic tracking of x_ref = 0 with a terminal
// penalty towards the hover target.
OcpProblem make_quadrotor() {
  using namespace quadrotor;
  OcpProblem p;
  p.name = "quadrotor";
  p.n = 6;
  p.m = 2;
  p.n_b = 0;
  p.horizon = kHorizon;

  const std::array<double, 6> q{1.0, 1.0, 0.1, 0.1, 0.1, 0.1};
  const std::array<double, 2> r{0.01, 0.01};
  const double k_terminal = 100.0;
  const std::array<double, 6> target{1.0, 0.5, 0.0, 0.0, 0.0, 0.0};

  p.dynamics = [](const AdScalar2&, AdSpan x, AdSpan u) {
    const AdScalar2 thrust = (u[0] + u[1]) / kMass;
    return AdVector{x[3],
                    x[4],
                    x[5],
                    -(thrust * sin(x[2])),
                    thrust * cos(x[2]) - kGravity,
                    (kArm / kInertia) * (u[0] - u[1])};
  };
  p.running_cost = [q, r](const AdScalar2&, AdSpan x, AdSpan u) {
    AdScalar2 acc(0.0);
    for (std::size_t i = 0; i < 6; ++i) acc += q[i] * (x[i] * x[i]);
    for (std::size_t j = 0; j < 2; ++j) acc += r[j] * (u[j] * u[j]);
    return 0.5 * acc;
  };
  p.endpoint_cost = [k_terminal, target](AdSpan, AdSpan xT) {
    AdScalar2 acc(0.0);
    for (std::size_t i = 0; i < 6; ++i) {
      const AdScalar2 e = xT[i] - target[i];
      acc += e * e;
    }
    return (0.5 * k_terminal) * acc;
  };
  p.initial_state = vec({-1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  p.guess_start = *p.initial_state;
  p.guess_end = vec({1.0, 0.5, 0.0, 0.0, 0.0, 0.0});
  const double hover = kMass * kGravity / 2.0;
  p.guess_control = vec({hover, hover});
  p.terminal_target = p.guess_end;
  p.terminal_weight = Eigen::MatrixXd::Identity(6, 6) * k_terminal;
  return p;
}

// min 1/2 int_0^1 (x^T x + u^2) dt + 1/2 |x(1)|^2,  x1' = x2, x2' = u, x(0) = (1, 0).
OcpProblem make_double_integrator_lq() {
  OcpProblem p;
  p.name = "double-integrator-lq";
  p.n = 2;
  p.m = 1;
  p.n_b = 0;
  p.horizon = 1.0;
  p.dynamics = [](const AdScalar2&, AdSpan x, AdSpan u) { return AdVector{x[1], u[0]}; };
  p.running_cost = [](const AdScalar2&, AdSpan x, AdSpan u) {
    return 0.5 * (x[0] * x[0] + x[1] * x[1] + u[0] * u[0]);
  };
  p.endpoint_cost = [](AdSpan, AdSpan xT) { return 0.5 * (xT[0] * xT[0] + xT[1] * xT[1]); };
  p.initial_state = vec({1.0, 0.0});
  p.guess_start = *p.initial_state;
  p.guess_end = vec({0.0, 0.0});
  p.guess_control = vec({0.0});
  return p;
}

// Transfer x(0) = (0, 0) -> x(1) = (1, 0) with minimum control energy; the
// terminal condition is a boundary map, so n_b = 2.
OcpProblem make_double_integrator_transfer() {
  OcpProblem p;
  p.name = "double-integrator-transfer";
  p.n = 2;
  p.m = 1;
  p.n_b = 2;
  p.horizon = 1.0;
  p.dynamics = [](const AdScalar2&, AdSpan x, AdSpan u) { return AdVector{x[1], u[0]}; };
  p.running_cost = [](const AdScalar2&, AdSpan, AdSpan u) { return 0.5 * (u[0] * u[0]); };
  p.endpoint_cost = [](AdSpan, AdSpan) { return AdScalar2(0.0); };
  p.boundary = [](AdSpan, AdSpan xT) { return AdVector{xT[0] - 1.0, xT[1]}; };
  p.initial_state = vec({0.0, 0.0});
  p.guess_start = *p.initial_state;
  p.guess_end = vec({1.0, 0.0});
  p.guess_control = vec({0.0});
  return p;
}

// Scalar stiff regulator x' = -50 x + u with a fast initial layer.
OcpProblem make_stiff_lq() {
  OcpProblem p;
  p.name = "stiff-lq";
  p.n = 1;
  p.m = 1;
  p.n_b = 0;
  p.horizon = 1.0;
  p.dynamics = [](const AdScalar2&, AdSpan x, AdSpan u) { return AdVector{-50.0 * x[0] + u[0]}; };
  p.running_cost = [](const AdScalar2&, AdSpan x, AdSpan u) {
    return 0.5 * (x[0] * x[0] + u[0] * u[0]);
  };
  p.endpoint_cost = [](AdSpan, AdSpan xT) { return 0.5 * (xT[0] * xT[0]); };
  p.initial_state = vec({1.0});
  p.guess_start = *p.initial_state;
  p.guess_end = vec({0.0});
  p.guess_control = vec({0.0});
  return p;
}

using Factory = OcpProblem (*)();

const std::map<std::string, Factory>& registry() {
  static const std::map<std::string, Factory> r{
      {"double-integrator-lq", &make_double_integrator_lq},
      {"double-integrator-transfer", &make_double_integrator_transfer},
      {"quadrotor", &make_quadrotor},
      {"stiff-lq", &make_stiff_lq},
  };
  return r;
}

}  // namespace

std::vector<std::string> builtin_problem_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

OcpProblem builtin_problem(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    std::string msg = "unknown problem '" + name + "'; available:";
    for (const auto& n : builtin_problem_names()) msg += " " + n;
    throw RegistryError(msg);
  }
  OcpProblem p = it->second();
  p.validate();
  return p;
}

}  // namespace ssoc
