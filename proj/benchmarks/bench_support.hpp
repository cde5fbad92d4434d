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
#ifndef TXCOOP_BENCHMARKS_BENCH_SUPPORT_HPP
#define TXCOOP_BENCHMARKS_BENCH_SUPPORT_HPP

#include <txcoop/game_model.hpp>

#include <random>
#include <vector>

namespace txcoop::bench {

/// Fixed-seed gaussian matrix so every run measures the same instances.
inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
	std::normal_distribution<double> normal(0.0, 1.0);
	Matrix m(rows, cols);
	for (Eigen::Index r = 0; r < rows; ++r)
	{
		for (Eigen::Index c = 0; c < cols; ++c)
		{
			m(r, c) = normal(rng);
		}
	}
	return m;
}

/// K users with `tx` antennas each and unit budgets facing an `rx`-antenna receiver.
inline Scenario random_scenario(int users, int rx, int tx, PowerMode mode, ReceiverModel receiver,
                                std::uint64_t seed = 7)
{
	std::mt19937_64 rng(seed);
	std::vector<UserSpec> specs;
	for (int k = 1; k <= users; ++k)
	{
		UserSpec u;
		u.id = k;
		u.antennas = tx;
		u.channel = gaussian(rng, rx, tx);
		u.power = mode == PowerMode::sum ? PowerConstraint::sum(1.0)
		                                 : PowerConstraint::per_antenna(std::vector<double>(static_cast<std::size_t>(tx), 1.0));
		specs.push_back(std::move(u));
	}
	return Scenario(std::move(specs), rx, 1.0, std::move(receiver));
}

inline std::vector<int> identity_order(int users)
{
	std::vector<int> order;
	for (int k = 1; k <= users; ++k)
	{
		order.push_back(k);
	}
	return order;
}

} // namespace txcoop::bench

#endif // TXCOOP_BENCHMARKS_BENCH_SUPPORT_HPP
