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
#include <txcoop/equilibrium.hpp>

#include "bench_support.hpp"

#include <benchmark/benchmark.h>

namespace txcoop {
namespace {

void BM_NeSicSingletons(benchmark::State& state)
{
	int const k = static_cast<int>(state.range(0));
	Scenario const s = bench::random_scenario(k, 2, 2, PowerMode::sum, SicFixedReceiver{bench::identity_order(k)});
	Partition const t = Partition::singletons(k);
	for (auto _ : state)
	{
		benchmark::DoNotOptimize(ne_sic(s, t).utilities);
	}
}
BENCHMARK(BM_NeSicSingletons)->Arg(3)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_NeSudSingletons(benchmark::State& state)
{
	int const k = static_cast<int>(state.range(0));
	Scenario const s = bench::random_scenario(k, 2, 2, PowerMode::sum, SudReceiver{});
	Partition const t = Partition::singletons(k);
	for (auto _ : state)
	{
		benchmark::DoNotOptimize(ne_sud(s, t).utilities);
	}
}
BENCHMARK(BM_NeSudSingletons)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_UtilityTableSic(benchmark::State& state)
{
	int const k = static_cast<int>(state.range(0));
	Scenario const s = bench::random_scenario(k, 2, 1, PowerMode::sum, SicFixedReceiver{bench::identity_order(k)});
	for (auto _ : state)
	{
		benchmark::DoNotOptimize(utility_table(s, {}, 1).entry_count());
	}
	state.counters["partitions"] = static_cast<double>(count_partitions(k));
}
BENCHMARK(BM_UtilityTableSic)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

} // namespace
} // namespace txcoop
