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
#include <txcoop/errors.hpp>

#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace txcoop {
namespace {

CoalitionalGame game_from(int users, std::function<double(Coalition)> const& v, double grand)
{
	std::vector<double> demands(std::size_t{1} << users, 0.0);
	for (std::uint32_t m = 1; m + 1 < demands.size(); ++m)
	{
		demands[m] = v(Coalition(m));
	}
	return CoalitionalGame(users, std::move(demands), grand);
}

CoalitionalGame random_game(gen::Rng& rng, int users)
{
	// Demands grow roughly with size so both verdicts occur.
	std::vector<double> demands(std::size_t{1} << users, 0.0);
	for (std::uint32_t m = 1; m + 1 < demands.size(); ++m)
	{
		demands[m] = Coalition(m).size() * gen::uniform_real(rng, 0.0, 1.0);
	}
	double const grand = users * gen::uniform_real(rng, 0.4, 1.1);
	return CoalitionalGame(users, std::move(demands), grand);
}

double max_excess(CoalitionalGame const& g, std::vector<double> const& x)
{
	double worst = -std::numeric_limits<double>::infinity();
	for (Coalition c : g.proper_coalitions())
	{
		double s = 0.0;
		for (int id : c.members())
		{
			s += x[static_cast<std::size_t>(id - 1)];
		}
		worst = std::max(worst, g.demand(c) - s);
	}
	return worst;
}

TEST(CoalitionalGame, ValidatesAndIndexes)
{
	EXPECT_THROW(CoalitionalGame(2, {0.0, 1.0}, 1.0), InvalidArgument);
	EXPECT_THROW(CoalitionalGame(2, {0.0, std::nan(""), 1.0, 0.0}, 1.0), InvalidArgument);
	CoalitionalGame const g(2, {0.0, 0.25, 0.5, 0.0}, 1.0);
	EXPECT_DOUBLE_EQ(g.demand(Coalition::of({2})), 0.5);
	EXPECT_THROW(g.demand(Coalition::of({1, 2})), InvalidArgument);
	EXPECT_EQ(g.proper_coalitions().size(), 2u);
	EXPECT_DOUBLE_EQ(g.with_grand_value(3.0).grand_value(), 3.0);
}

TEST(Names, ModelsAndVerdicts)
{
	EXPECT_EQ(parse_model("rational"), ExpectationModel::rational);
	EXPECT_EQ(parse_model("m"), ExpectationModel::merging);
	EXPECT_EQ(parse_model("c"), ExpectationModel::cautious);
	EXPECT_EQ(parse_model("singleton"), ExpectationModel::singleton);
	EXPECT_FALSE(parse_model("x").has_value());
	EXPECT_EQ(model_name(ExpectationModel::cautious), "cautious");
	EXPECT_EQ(verdict_name(Verdict::empty), "empty");
}

TEST(CheckCore, MajorityGameIsEmpty)
{
	auto const g = game_from(3, [](Coalition c) { return c.size() >= 2 ? 1.0 : 0.0; }, 1.0);
	auto const r = check_core(g);
	EXPECT_EQ(r.verdict, Verdict::empty);
	EXPECT_NEAR(r.slack, -1.0 / 3.0, 1e-12);
	ASSERT_TRUE(r.certificate.has_value());
	EXPECT_NEAR(r.certificate->margin, 0.5, 1e-12);
	auto cert = *r.certificate;
	EXPECT_TRUE(validate_certificate(g, cert));
	auto const lc = least_core(g);
	EXPECT_NEAR(lc.epsilon_star, 1.0 / 3.0, 1e-12);
	for (double xi : lc.allocation)
	{
		EXPECT_NEAR(xi, 1.0 / 3.0, 1e-12);
	}
}

TEST(CheckCore, AdditiveGameHasItsUniqueImputation)
{
	std::vector<double> const a{0.3, 1.2, 0.5, 0.9};
	auto const g = game_from(4,
	                         [&](Coalition c) {
		                         double s = 0.0;
		                         for (int id : c.members())
		                         {
			                         s += a[static_cast<std::size_t>(id - 1)];
		                         }
		                         return s;
	                         },
	                         2.9);
	auto const r = check_core(g);
	ASSERT_EQ(r.verdict, Verdict::nonempty);
	for (std::size_t i = 0; i < a.size(); ++i)
	{
		EXPECT_NEAR(r.allocation[i], a[i], 1e-9);
	}
	EXPECT_NEAR(least_core(g).epsilon_star, 0.0, 1e-12);
	EXPECT_FALSE(balancedness_certificate(g).has_value());
}

TEST(CheckCore, SinglePlayerIsTrivial)
{
	CoalitionalGame const g(1, {0.0, 0.0}, 2.5);
	auto const r = check_core(g);
	EXPECT_EQ(r.verdict, Verdict::nonempty);
	EXPECT_EQ(r.allocation, std::vector<double>{2.5});
	EXPECT_THROW(least_core(g), InvalidArgument);
}

TEST(LeastCore, MatchesGridSearchOracle)
{
	gen::Rng rng(41);
	for (int users : {2, 3, 4})
	{
		int const trials = users == 4 ? 3 : 10;
		for (int trial = 0; trial < trials; ++trial)
		{
			auto const g = random_game(rng, users);
			auto const lc = least_core(g);
			double const grid = oracle::least_core_grid(
			    users, [&](std::uint32_t m) { return g.demand(Coalition(m)); }, g.grand_value());
			// The grid optimum is a feasible allocation, so it cannot beat the LP.
			EXPECT_LE(lc.epsilon_star, grid + 1e-9);
			EXPECT_GE(lc.epsilon_star, grid - 2e-3 * users);
			// The reported allocation attains epsilon* and spends exactly v(K).
			EXPECT_NEAR(max_excess(g, lc.allocation), lc.epsilon_star, 1e-9);
			EXPECT_NEAR(std::accumulate(lc.allocation.begin(), lc.allocation.end(), 0.0), g.grand_value(), 1e-9);
		}
	}
}

TEST(CheckCore, VerdictAgreesWithBalancedness)
{
	gen::Rng rng(42);
	int empties = 0;
	int nonempties = 0;
	for (int trial = 0; trial < 200; ++trial)
	{
		int const users = gen::uniform_int(rng, 2, 6);
		auto const g = random_game(rng, users);
		auto const r = check_core(g);
		auto const cert = balancedness_certificate(g);
		if (r.verdict == Verdict::nonempty)
		{
			++nonempties;
			EXPECT_FALSE(cert.has_value());
			EXPECT_GE(r.slack, -1e-9);
			EXPECT_LE(max_excess(g, r.allocation), 1e-9);
			EXPECT_NEAR(std::accumulate(r.allocation.begin(), r.allocation.end(), 0.0), g.grand_value(), 1e-9);
			EXPECT_FALSE(r.certificate.has_value());
		}
		else
		{
			++empties;
			ASSERT_TRUE(r.certificate.has_value());
			auto copy = *r.certificate;
			EXPECT_TRUE(validate_certificate(g, copy));
			EXPECT_NEAR(copy.margin, r.certificate->margin, 1e-9);
			EXPECT_LT(r.slack, 0.0);
		}
	}
	EXPECT_GT(empties, 10);
	EXPECT_GT(nonempties, 10);
}

TEST(CheckCore, InvariantUnderConstraintOrder)
{
	gen::Rng rng(43);
	for (int trial = 0; trial < 40; ++trial)
	{
		int const users = gen::uniform_int(rng, 2, 5);
		auto const g = random_game(rng, users);
		CoreOptions shuffled;
		shuffled.constraint_order.resize(g.proper_coalitions().size());
		std::iota(shuffled.constraint_order.begin(), shuffled.constraint_order.end(), std::size_t{0});
		std::shuffle(shuffled.constraint_order.begin(), shuffled.constraint_order.end(), rng);
		EXPECT_EQ(check_core(g).verdict, check_core(g, shuffled).verdict);
		EXPECT_NEAR(least_core(g).epsilon_star, least_core(g, shuffled).epsilon_star, 1e-12);
	}
	CoreOptions bad;
	bad.constraint_order = {0, 0, 1, 2, 3, 4};
	EXPECT_THROW(check_core(game_from(3, [](Coalition) { return 0.0; }, 1.0), bad), InvalidArgument);
}

TEST(LeastCore, ScalesAndIsMonotoneInGrandValue)
{
	gen::Rng rng(44);
	for (int trial = 0; trial < 40; ++trial)
	{
		int const users = gen::uniform_int(rng, 2, 5);
		auto const g = random_game(rng, users);
		double const c = gen::uniform_real(rng, 0.1, 10.0);
		std::vector<double> scaled = g.demands();
		for (double& d : scaled)
		{
			d *= c;
		}
		CoalitionalGame const gc(users, scaled, c * g.grand_value());
		double const e = least_core(g).epsilon_star;
		EXPECT_NEAR(least_core(gc).epsilon_star, c * e, 1e-9 * (1.0 + c));
		EXPECT_LE(least_core(g.with_grand_value(g.grand_value() + 0.3)).epsilon_star, e + 1e-12);
	}
}

TEST(LeastCore, ExactCheckDoesNotChangeResults)
{
	gen::Rng rng(45);
	CoreOptions fast;
	fast.exact_check = false;
	for (int trial = 0; trial < 40; ++trial)
	{
		auto const g = random_game(rng, gen::uniform_int(rng, 2, 5));
		EXPECT_NEAR(least_core(g).epsilon_star, least_core(g, fast).epsilon_star, 1e-12);
	}
}

TEST(CoreRegion, UnitSimplex)
{
	auto const g = game_from(3, [](Coalition) { return 0.0; }, 1.0);
	auto const r = core_region_3user(g);
	ASSERT_EQ(r.size(), 3u);
	for (auto const& v : r)
	{
		EXPECT_NEAR(v[0] + v[1] + v[2], 1.0, 1e-12);
		EXPECT_NEAR(std::max({v[0], v[1], v[2]}), 1.0, 1e-12);
	}
	EXPECT_TRUE(core_region_3user(game_from(3, [](Coalition c) { return c.size() >= 2 ? 1.0 : 0.0; }, 1.0))
	                .empty());
	EXPECT_THROW(core_region_3user(game_from(2, [](Coalition) { return 0.0; }, 1.0)), InvalidArgument);
}

TEST(CoreRegion, VerticesAreFeasibleTightAndCounterClockwise)
{
	gen::Rng rng(46);
	int drawn = 0;
	for (int trial = 0; trial < 200; ++trial)
	{
		auto const g = random_game(rng, 3);
		auto const r = core_region_3user(g);
		EXPECT_EQ(r.empty(), check_core(g).verdict == Verdict::empty && check_core(g).slack < -1e-9);
		for (auto const& v : r)
		{
			std::vector<double> const x(v.begin(), v.end());
			EXPECT_LE(max_excess(g, x), 1e-9);
			EXPECT_NEAR(x[0] + x[1] + x[2], g.grand_value(), 1e-9);
			int tight = 0;
			for (Coalition c : g.proper_coalitions())
			{
				double s = 0.0;
				for (int id : c.members())
				{
					s += x[static_cast<std::size_t>(id - 1)];
				}
				tight += std::abs(s - g.demand(c)) <= 1e-9 ? 1 : 0;
			}
			EXPECT_GE(tight, 2);
		}
		if (r.size() >= 3)
		{
			++drawn;
			double area = 0.0;
			for (std::size_t i = 0; i < r.size(); ++i)
			{
				auto const& p = r[i];
				auto const& q = r[(i + 1) % r.size()];
				area += p[0] * q[1] - q[0] * p[1];
			}
			EXPECT_GT(area, 0.0);
		}
	}
	EXPECT_GT(drawn, 10);
}

TEST(Demands, PartitionsContainingCountIsBell)
{
	auto const bell = oracle::bell_numbers(8);
	for (int k = 2; k <= 7; ++k)
	{
		for (std::uint32_t m = 1; m + 1 < (1u << k); m += 3)
		{
			Coalition const c(m);
			auto const parts = partitions_containing(c, k);
			EXPECT_EQ(parts.size(), bell[static_cast<std::size_t>(k - c.size())]);
			for (Partition const& t : parts)
			{
				EXPECT_TRUE(t.find(c).has_value());
			}
		}
	}
	EXPECT_THROW(partitions_containing(Coalition::all(3), 3), InvalidArgument);
}

TEST(Demands, ModelsAgainstDirectEnumeration)
{
	gen::Rng rng(47);
	gen::ScenarioShape shape;
	shape.min_users = 3;
	shape.max_users = 4;
	for (int trial = 0; trial < 6; ++trial)
	{
		Scenario const s = gen::random_scenario(rng, shape, SicFixedReceiver{});
		int const k = s.user_count();
		GameValues values(s);
		for (std::uint32_t m = 1; m + 1 < (1u << k); ++m)
		{
			Coalition const c(m);
			double best_external = -std::numeric_limits<double>::infinity();
			double rational = 0.0;
			double cautious = std::numeric_limits<double>::infinity();
			double merging = 0.0;
			double singleton = 0.0;
			for (Partition const& t : enumerate_partitions(k))
			{
				auto const at = t.find(c);
				if (!at)
				{
					continue;
				}
				auto const u = ne_utilities(s, t);
				double const external = std::accumulate(u.begin(), u.end(), 0.0) - u[*at];
				if (external > best_external)
				{
					best_external = external;
					rational = u[*at];
				}
				cautious = std::min(cautious, u[*at]);
				if (t.size() == 2)
				{
					merging = u[*at];
				}
				if (t.size() == static_cast<std::size_t>(k - c.size() + 1))
				{
					singleton = u[*at];
				}
			}
			EXPECT_NEAR(coalition_demand(values, c, ExpectationModel::rational), rational, 1e-9);
			EXPECT_NEAR(coalition_demand(values, c, ExpectationModel::cautious), cautious, 1e-12);
			EXPECT_NEAR(coalition_demand(values, c, ExpectationModel::merging), merging, 1e-12);
			EXPECT_NEAR(coalition_demand(values, c, ExpectationModel::singleton), singleton, 1e-12);
		}
	}
}

TEST(Demands, CautiousIsTheSmallest)
{
	gen::Rng rng(48);
	gen::ScenarioShape shape;
	shape.min_users = 3;
	shape.max_users = 4;
	for (int trial = 0; trial < 6; ++trial)
	{
		Scenario const s = gen::random_scenario(rng, shape, SudReceiver{});
		GameValues values(s);
		auto const cautious = demand_game(values, ExpectationModel::cautious);
		for (ExpectationModel model :
		     {ExpectationModel::rational, ExpectationModel::merging, ExpectationModel::singleton})
		{
			auto const other = demand_game(values, model);
			for (Coalition c : cautious.proper_coalitions())
			{
				EXPECT_LE(cautious.demand(c), other.demand(c) + 1e-12);
			}
			// Lower demands can only make the core larger.
			EXPECT_LE(least_core(cautious).epsilon_star, least_core(other).epsilon_star + 1e-9);
		}
	}
}

TEST(Demands, ScenarioOverloadsMatchExplicitGame)
{
	Scenario const s = symmetric_scenario(3, 1.0, SicFixedReceiver{{1, 2, 3}});
	GameValues values(s);
	for (ExpectationModel model : {ExpectationModel::rational, ExpectationModel::cautious})
	{
		auto const g = demand_game(values, model);
		EXPECT_EQ(check_core(s, model).verdict, check_core(g).verdict);
		EXPECT_NEAR(least_core(s, model).epsilon_star, least_core(g).epsilon_star, 1e-12);
		EXPECT_EQ(balancedness_certificate(s, model).has_value(), balancedness_certificate(g).has_value());
	}
}

} // namespace
} // namespace txcoop
