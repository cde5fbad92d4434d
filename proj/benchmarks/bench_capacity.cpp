/*
 * Copyright 2026 The txcoop Authors
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
#include <txcoop/capacity.hpp>

#include "bench_support.hpp"

#include <benchmark/benchmark.h>

namespace txcoop {
namespace {

void BM_Waterfill(benchmark::State& state)
{
	auto const n = static_cast<Eigen::Index>(state.range(0));
	std::mt19937_64 rng(1);
	Matrix const h = bench::gaussian(rng, n, n);
	Matrix const noise = Matrix::Identity(n, n);
	for (auto _ : state)
	{
		benchmark::DoNotOptimize(waterfill(h, noise, 4.0).rate);
	}
}
BENCHMARK(BM_Waterfill)->Arg(2)->Arg(4)->Arg(8);

void BM_PerAntenna(benchmark::State& state)
{
	auto const n = static_cast<Eigen::Index>(state.range(0));
	std::mt19937_64 rng(2);
	Matrix const h = bench::gaussian(rng, n, n);
	Matrix const noise = Matrix::Identity(n, n);
	std::vector<double> const budgets(static_cast<std::size_t>(n), 1.0);
	for (auto _ : state)
	{
		benchmark::DoNotOptimize(maximize_per_antenna(h, noise, budgets).rate);
	}
}
BENCHMARK(BM_PerAntenna)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_ProjectPerAntenna(benchmark::State& state)
{
	auto const n = static_cast<Eigen::Index>(state.range(0));
	std::mt19937_64 rng(3);
	Matrix const a = bench::gaussian(rng, n, n);
	Matrix const m = a + a.transpose();
	std::vector<double> const budgets(static_cast<std::size_t>(n), 0.5);
	for (auto _ : state)
	{
		benchmark::DoNotOptimize(project_per_antenna(m, budgets));
	}
}
BENCHMARK(BM_ProjectPerAntenna)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

} // namespace
} // namespace txcoop
