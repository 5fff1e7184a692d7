#include <benchmark/benchmark.h>

#include <map>

#include "ssoc/certify.hpp"
#include "ssoc/constants.hpp"
#include "ssoc/model.hpp"
#include "ssoc/reconstruction.hpp"
#include "ssoc/residuals.hpp"
#include "ssoc/solver.hpp"

using namespace ssoc;

namespace {

struct Solved {
  OcpProblem prob;
  DiscreteKkt dkkt;
  Reconstruction rec;
};

const Solved& quadrotor_solution(int N) {
  static std::map<int, Solved> cache;
  auto it = cache.find(N);
  if (it == cache.end()) {
    Solved s;
    s.prob = builtin_problem("quadrotor");
    s.dkkt = solve(s.prob, Mesh::uniform(s.prob.horizon, N), Scheme::hermite_simpson()).first;
    s.rec = reconstruct(s.prob, s.dkkt);
    it = cache.emplace(N, std::move(s)).first;
  }
  return it->second;
}

void BM_PointDerivatives(benchmark::State& state) {
  const OcpProblem p = builtin_problem("quadrotor");
  Eigen::VectorXd x = Eigen::VectorXd::Constant(p.n, 0.1), u = Eigen::VectorXd::Constant(p.m, 4.9);
  for (auto _ : state) benchmark::DoNotOptimize(eval_point(p, 0.5, x, u));
}
BENCHMARK(BM_PointDerivatives);

void BM_EvaluateNlp(benchmark::State& state) {
  const Solved& s = quadrotor_solution(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_nlp(s.prob, s.dkkt.layout, s.dkkt.z, s.dkkt.y));
}
BENCHMARK(BM_EvaluateNlp)->Arg(10)->Arg(35)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_NewtonStep(benchmark::State& state) {
  const Solved& s = quadrotor_solution(static_cast<int>(state.range(0)));
  const NlpEvaluation ev = evaluate_nlp(s.prob, s.dkkt.layout, s.dkkt.z, s.dkkt.y);
  const DenseMatrix W(ev.hessian), J(ev.jacobian);
  for (auto _ : state) benchmark::DoNotOptimize(newton_step(W, J, ev.gradient, ev.constraints));
}
BENCHMARK(BM_NewtonStep)->Arg(10)->Arg(35)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SolveQuadrotor(benchmark::State& state) {
  const OcpProblem p = builtin_problem("quadrotor");
  const Mesh mesh = Mesh::uniform(p.horizon, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, mesh, Scheme::hermite_simpson()));
}
BENCHMARK(BM_SolveQuadrotor)->Arg(10)->Arg(35)->Unit(benchmark::kMillisecond);

void BM_Residuals(benchmark::State& state) {
  const Solved& s = quadrotor_solution(35);
  const int q = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_residuals(s.prob, s.rec, q));
}
BENCHMARK(BM_Residuals)->Arg(5)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_ReducedCurvature(benchmark::State& state) {
  const Solved& s = quadrotor_solution(static_cast<int>(state.range(0)));
  const NlpEvaluation ev = evaluate_nlp(s.prob, s.dkkt.layout, s.dkkt.z, s.dkkt.y);
  const DenseMatrix W(ev.hessian), J(ev.jacobian);
  const DenseMatrix M = variation_norm_weights(s.dkkt.layout).asDiagonal();
  for (auto _ : state) benchmark::DoNotOptimize(reduced_curvature(W, J, M));
}
BENCHMARK(BM_ReducedCurvature)->Arg(10)->Arg(35)->Unit(benchmark::kMillisecond);

void BM_EstimateConstants(benchmark::State& state) {
  const Solved& s = quadrotor_solution(35);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_constants(s.prob, s.dkkt, s.rec, TubeSpec{}));
}
BENCHMARK(BM_EstimateConstants)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
