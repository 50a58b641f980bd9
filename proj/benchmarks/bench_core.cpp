/*
 * Copyright 2026 The rrnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "rrnn/constraints.hpp"
#include "rrnn/model.hpp"
#include "rrnn/numkit.hpp"
#include "rrnn/predictor.hpp"
#include "rrnn/trainer.hpp"

namespace {

using namespace rrnn;

Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = d(rng);
  return m;
}

Dims BenchDims(std::size_t n) { return {6, 5, n, n}; }

void BM_Cholesky(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix g = RandomMatrix(n, n, 1);
  const SymmetricMatrix m =
      SymmetricMatrix::FromLower(g * g.transpose() + Matrix::Identity(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(Cholesky(m));
}
BENCHMARK(BM_Cholesky)->Arg(32)->Arg(128)->Arg(256);

void BM_Feasible(benchmark::State& state) {
  const Dims dims = BenchDims(static_cast<std::size_t>(state.range(0)));
  const TildeParams p = InitFeasible(dims, 20.0, 0.1, 2);
  const double margin = TrainingMargin(dims);
  for (auto _ : state) benchmark::DoNotOptimize(Feasible(p, margin));
}
BENCHMARK(BM_Feasible)->Arg(8)->Arg(64);

void BM_BarrierGradient(benchmark::State& state) {
  const TildeParams p =
      InitFeasible(BenchDims(static_cast<std::size_t>(state.range(0))), 20.0,
                   0.1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(BarrierGradient(p));
}
BENCHMARK(BM_BarrierGradient)->Arg(8)->Arg(64);

void BM_Simulate(benchmark::State& state) {
  const Dims dims = BenchDims(static_cast<std::size_t>(state.range(0)));
  const ExplicitParams e = RecoverExplicit(InitFeasible(dims, 20.0, 0.1, 4));
  const Matrix u = RandomMatrix(6, 900, 5);
  const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(dims.n_x));
  for (auto _ : state) benchmark::DoNotOptimize(Simulate(e, x0, u));
  state.SetItemsProcessed(state.iterations() * u.cols());
}
BENCHMARK(BM_Simulate)->Arg(8)->Arg(64);

void BM_Bptt(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const ModelSpec spec{kind, {6, 5, 32, 32}, 20.0, 1, 1, 0.1};
  const Predictor model = InitialPredictor(spec, 6);
  std::vector<Sample> batch;
  for (std::uint64_t i = 0; i < 16; ++i) {
    batch.push_back({Vector::Zero(32), RandomMatrix(6, 50, 10 + i),
                     RandomMatrix(5, 50, 100 + i)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(BpttGradients(model, batch, 1e-3));
  }
  state.SetLabel(std::string(KindName(kind)));
}
BENCHMARK(BM_Bptt)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
