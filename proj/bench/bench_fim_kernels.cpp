// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against their OpenMP twins.

#include <benchmark/benchmark.h>

#include "uwbisac/experiments.hpp"
#include "uwbisac/kernels.hpp"

#include <random>

using namespace uwbisac;

namespace {

Eigen::MatrixXcd random_columns(Eigen::Index rows, Eigen::Index cols) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd c(rows, cols);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = {g(rng), g(rng)};
  return c;
}

ObservationModel model(int n_f) {
  auto sc = table1_defaults();
  sc.n_f = n_f;
  return observation_model(sc, ModulationConfig::ppm(n_f, Decoupling::Pilot, n_f / 2));
}

void BM_GramSerial(benchmark::State& st) {
  const auto c = random_columns(8000, st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(gram_real_serial(c, 1.0));
}

void BM_GramParallel(benchmark::State& st) {
  const auto c = random_columns(8000, st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(gram_real_parallel(c, 1.0));
}

void BM_FdColumnsSerial(benchmark::State& st) {
  const auto m = model(static_cast<int>(st.range(0)));
  const Eigen::VectorXd h = Eigen::VectorXd::Constant(m.eta.size(), 1e-13);
  for (auto _ : st) benchmark::DoNotOptimize(fd_columns_serial(m, h));
}

void BM_FdColumnsParallel(benchmark::State& st) {
  const auto m = model(static_cast<int>(st.range(0)));
  const Eigen::VectorXd h = Eigen::VectorXd::Constant(m.eta.size(), 1e-13);
  for (auto _ : st) benchmark::DoNotOptimize(fd_columns_parallel(m, h));
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(16)->Arg(48)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_GramParallel)->Arg(16)->Arg(48)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_FdColumnsSerial)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FdColumnsParallel)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
