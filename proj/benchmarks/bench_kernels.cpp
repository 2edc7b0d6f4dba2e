#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <memory>
#include <random>

#include "invex/matrix_kernels.hpp"
#include "invex/problems/dag.hpp"
#include "invex/problems/fair_lasso.hpp"
#include "invex/problems/mlr.hpp"

using namespace invex;

namespace {

Eigen::MatrixXd contraction_matrix(int d, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = gauss(rng);
  a *= radius / spectral_radius(a);
  return a;
}

Eigen::MatrixXd symmetric_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
  return 0.5 * (m + m.transpose());
}

void bm_matlog(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(d, d) - contraction_matrix(d, 0.6, 7);
  for (auto _ : state) benchmark::DoNotOptimize(matlog_near_identity(m));
}
BENCHMARK(bm_matlog)->Arg(20)->Arg(50);

void bm_matexp(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = contraction_matrix(d, 0.6, 8);
  for (auto _ : state) benchmark::DoNotOptimize(matexp(a));
}
BENCHMARK(bm_matexp)->Arg(20)->Arg(50);

void bm_spectral_radius(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = contraction_matrix(d, 0.8, 9);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(a));
}
BENCHMARK(bm_spectral_radius)->Arg(20)->Arg(50)->Arg(200);

void bm_psd_project(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd s = symmetric_matrix(n, 10);
  for (auto _ : state) benchmark::DoNotOptimize(psd_project(s));
}
BENCHMARK(bm_psd_project)->Arg(50)->Arg(200)->Arg(501);

void bm_dykstra_unitdiag(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd s =
      Eigen::MatrixXd::Identity(n, n) + 0.3 * symmetric_matrix(n, 11);
  for (auto _ : state) benchmark::DoNotOptimize(dykstra_psd_unitdiag(s));
}
BENCHMARK(bm_dykstra_unitdiag)->Arg(50)->Arg(200);

void bm_dag_step(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const dag::DagInstance inst = dag::generate(d, 1.5 / d, 0.9, true, 3);
  for (auto _ : state) benchmark::DoNotOptimize(dag::step(inst.weights, 1e-3));
}
BENCHMARK(bm_dag_step)->Arg(20)->Arg(50);

void bm_fair_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fairlasso::FairLassoInstance inst =
      fairlasso::generate(n, 20, 1.0, 4, 0.1, 0.1, 4);
  fairlasso::FairIterate p;
  p.w = Eigen::VectorXd::Zero(20);
  p.z = Eigen::MatrixXd::Identity(n + 1, n + 1);
  for (auto _ : state) benchmark::DoNotOptimize(fairlasso::step(p, 0.05, inst, true));
}
BENCHMARK(bm_fair_step)->Arg(60)->Arg(120);

void bm_mlr_step(benchmark::State& state) {
  const mlr::MlrInstance inst = mlr::generate(50, 10, 2.0, 0.1, 0.01, 0.01, 5);
  mlr::MlrIterate p;
  p.t = Eigen::VectorXd::Zero(50);
  p.w = Eigen::MatrixXd::Identity(11, 11);
  p.u = 1.1 * Eigen::MatrixXd::Identity(11, 11);
  p.u(10, 10) = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(mlr::step(p, 0.01, inst, true));
}
BENCHMARK(bm_mlr_step);

}  // namespace

BENCHMARK_MAIN();
