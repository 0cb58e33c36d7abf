// Copyright 2026 The kpinsker Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include <benchmark/benchmark.h>

#include "kpinsker/pinsker.hpp"
#include "kpinsker/simulator.hpp"
#include "kpinsker/spectrum.hpp"

using namespace kpinsker;

namespace {

void BM_Eigenvalue(benchmark::State& state) {
  const KernelSpec rbf = KernelSpec::rbf();
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    for (unsigned k = 0; k <= 6; ++k) benchmark::DoNotOptimize(eigenvalue(rbf, d, k));
  }
}
BENCHMARK(BM_Eigenvalue)->Arg(10)->Arg(1000)->Arg(100000);

void BM_SolveKappa(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const SpectrumTable spectrum = build_spectrum(KernelSpec::rbf(), d, 12);
  const ProblemConfig config = ProblemConfig::make(d, Rational(5, 2), 1.0, Rational(1), 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_kappa(spectrum, config));
}
BENCHMARK(BM_SolveKappa)->Arg(30)->Arg(1000);

void BM_EmpiricalBlockStats(benchmark::State& state) {
  const int d = 30;
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const SpectrumTable spectrum = build_spectrum(KernelSpec::rbf(), d, 4);
  const RegressionFunction target = make_target(spectrum, 1.0, 1.0, {Allocation::uniform, {0, 1, 2}}, 7);
  const PointSet points = sample_sphere(n, d, 11);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = target.evaluate(points.point(i));
  const std::vector<unsigned> degrees{0, 1, 2};
  for (auto _ : state) benchmark::DoNotOptimize(empirical_block_stats(points, y, target, degrees));
}
BENCHMARK(BM_EmpiricalBlockStats)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
