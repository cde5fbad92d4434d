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
#include <txcoop/cores.hpp>
#include <txcoop/equilibrium.hpp>

#include "bench_support.hpp"

#include <benchmark/benchmark.h>

namespace txcoop {
namespace {

CoalitionalGame symmetric_game(int users)
{
	Scenario const s = symmetric_scenario(users, 1.0, SicFixedReceiver{bench::identity_order(users)});
	GameValues values(s);
	return demand_game(values, ExpectationModel::rational);
}

void BM_CheckCore(benchmark::State& state)
{
	CoalitionalGame const game = symmetric_game(static_cast<int>(state.range(0)));
	CoreOptions options;
	options.exact_check = state.range(1) != 0;
	for (auto _ : state)
	{
		benchmark::DoNotOptimize(check_core(game, options).verdict);
	}
}
BENCHMARK(BM_CheckCore)->Args({3, 0})->Args({4, 0})->Args({4, 1})->Args({6, 0})->Args({8, 0})
    ->Unit(benchmark::kMicrosecond);

void BM_LeastCore(benchmark::State& state)
{
	CoalitionalGame const game = symmetric_game(static_cast<int>(state.range(0)));
	for (auto _ : state)
	{
		benchmark::DoNotOptimize(least_core(game).epsilon_star);
	}
}
BENCHMARK(BM_LeastCore)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_RationalDemands(benchmark::State& state)
{
	int const k = static_cast<int>(state.range(0));
	Scenario const s = symmetric_scenario(k, 1.0, SicFixedReceiver{bench::identity_order(k)});
	for (auto _ : state)
	{
		GameValues values(s);
		benchmark::DoNotOptimize(demand_game(values, ExpectationModel::rational).grand_value());
	}
}
BENCHMARK(BM_RationalDemands)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

} // namespace
} // namespace txcoop
