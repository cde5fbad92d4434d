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
#include <txcoop/analysis.hpp>
#include <txcoop/errors.hpp>

#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace txcoop {
namespace {

TEST(Superadditivity, TwoUserClosedForm)
{
	// ln 5 >= ln 1.5 + ln 2.
	Scenario const s = symmetric_scenario(2, 1.0, SicFixedReceiver{{1, 2}});
	GameValues values(s);
	Partition const t = Partition::singletons(2);
	EXPECT_NEAR(values.value(t, Coalition::of({1})), std::log(1.5), 1e-12);
	EXPECT_NEAR(values.value(t, Coalition::of({2})), std::log(2.0), 1e-12);
	EXPECT_NEAR(values.grand_value(), std::log(5.0), 1e-12);
	auto const r = verify_superadditivity(s, 10, 1);
	EXPECT_TRUE(r.passed());
	EXPECT_EQ(r.checked, 10);
	EXPECT_NEAR(r.worst_margin, std::log(5.0) - std::log(3.0), 1e-12);
	EXPECT_EQ(r.cohesion_partitions, 2);
}

TEST(Superadditivity, HoldsOnSingleAntennaScenarios)
{
	gen::Rng rng(51);
	for (ReceiverModel rx : {ReceiverModel{SicFixedReceiver{}}, ReceiverModel{SudReceiver{}},
	                         ReceiverModel{SicTimeShareReceiver{}}})
	{
		for (PowerMode mode : {PowerMode::sum, PowerMode::per_antenna})
		{
			gen::ScenarioShape shape;
			shape.max_rx = 1;
			shape.max_users = 5;
			shape.power = mode;
			for (int trial = 0; trial < 4; ++trial)
			{
				Scenario const s = gen::random_scenario(rng, shape, rx);
				auto const r = verify_superadditivity(s, 40, 7 + trial);
				EXPECT_TRUE(r.passed()) << receiver_name(rx) << " worst " << r.worst_margin;
				EXPECT_EQ(r.checked + r.skipped, 40);
				EXPECT_GE(r.worst_margin, -1e-8);
				EXPECT_GE(r.worst_cohesion_margin, -1e-8);
				EXPECT_EQ(static_cast<std::uint64_t>(r.cohesion_partitions), count_partitions(s.user_count()));
			}
		}
	}
}

TEST(Superadditivity, DeterministicForSeed)
{
	gen::Rng rng(52);
	gen::ScenarioShape shape;
	shape.min_users = 4;
	shape.max_users = 4;
	Scenario const s = gen::random_scenario(rng, shape, SicFixedReceiver{});
	auto const a = verify_superadditivity(s, 30, 99);
	auto const b = verify_superadditivity(s, 30, 99);
	EXPECT_EQ(a.worst_margin, b.worst_margin);
	EXPECT_EQ(a.worst_cohesion_margin, b.worst_cohesion_margin);
	EXPECT_THROW(verify_superadditivity(s, 0, 1), InvalidArgument);
	EXPECT_THROW(verify_superadditivity(symmetric_scenario(1, 1.0, SudReceiver{}), 5, 1), InvalidArgument);
}

TEST(Externalities, SingleAntennaMergersHurtOutsiders)
{
	gen::Rng rng(53);
	for (ReceiverModel rx : {ReceiverModel{SicFixedReceiver{}}, ReceiverModel{SudReceiver{}}})
	{
		gen::ScenarioShape shape;
		shape.min_users = 3;
		shape.max_users = 5;
		shape.max_rx = 1;
		for (int trial = 0; trial < 5; ++trial)
		{
			Scenario const s = gen::random_scenario(rng, shape, rx);
			auto const v = classify_externalities(s, 40, 3 + trial);
			EXPECT_EQ(v.classification, Externality::negative);
			EXPECT_EQ(v.positive_count, 0);
			EXPECT_FALSE(v.witnesses.empty());
			for (MergeWitness const& w : v.witnesses)
			{
				EXPECT_LE(w.after_value, w.before_value + 1e-9);
			}
		}
	}
}

TEST(Externalities, ExternalChangeMatchesDirectEvaluation)
{
	Scenario const s = symmetric_scenario(3, 1.0, SicFixedReceiver{{3, 2, 1}});
	Partition const before = Partition::singletons(3);
	Partition const after(3, {Coalition::of({1, 2}), Coalition::of({3})});
	auto const w = external_change(s, before, after, Coalition::of({3}));
	EXPECT_DOUBLE_EQ(w.before_value, ne_utilities(s, before)[2]);
	EXPECT_DOUBLE_EQ(w.after_value, ne_utilities(s, after)[1]);
	// User 3 is decoded first in both: interference 2 before, coherent 4 after.
	EXPECT_NEAR(w.before_value, std::log(4.0 / 3.0), 1e-12);
	EXPECT_NEAR(w.after_value, std::log(6.0 / 5.0), 1e-12);
	EXPECT_THROW(classify_externalities(symmetric_scenario(2, 1.0, SudReceiver{}), 5, 1), InvalidArgument);
	EXPECT_EQ(externality_name(Externality::mixed), "mixed");
}

TEST(Externalities, MergingIsTheCautiousArrangementWithOneReceiveAntenna)
{
	gen::Rng rng(54);
	gen::ScenarioShape shape;
	shape.min_users = 3;
	shape.max_users = 5;
	shape.max_rx = 1;
	for (int trial = 0; trial < 6; ++trial)
	{
		Scenario const s = gen::random_scenario(rng, shape, trial % 2 == 0 ? ReceiverModel{SicFixedReceiver{}}
		                                                                   : ReceiverModel{SudReceiver{}});
		GameValues values(s);
		for (std::uint32_t m = 1; m + 1 < (1u << s.user_count()); ++m)
		{
			EXPECT_NEAR(coalition_demand(values, Coalition(m), ExpectationModel::cautious),
			            coalition_demand(values, Coalition(m), ExpectationModel::merging), 1e-9);
		}
	}
}

TEST(Snr, ConversionRoundTrip)
{
	EXPECT_DOUBLE_EQ(snr_db_to_noise(0.0), 1.0);
	EXPECT_NEAR(snr_db_to_noise(30.0), 1e-3, 1e-18);
	EXPECT_NEAR(noise_to_snr_db(1e4), -40.0, 1e-12);
	Scenario const s = symmetric_sic_scenario(4, 3.0, PowerMode::sum);
	EXPECT_NEAR(s.noise(), std::pow(10.0, -0.3), 1e-15);
	EXPECT_EQ(std::get<SicFixedReceiver>(s.receiver()).base_order, (std::vector<int>{1, 2, 3, 4}));
}

TEST(SnrBoundary, BisectionBracketsTheVerdictChange)
{
	SweepSpec spec;
	spec.users = {3, 4};
	spec.snr_db = {-30.0, -10.0, 0.0};
	spec.power = PowerMode::sum;
	spec.resolution_db = 0.25;
	auto const out = snr_boundary(spec, ExpectationModel::rational);
	ASSERT_EQ(out.size(), 2u);
	for (BoundaryResult const& r : out)
	{
		ASSERT_EQ(r.grid.size(), spec.snr_db.size());
		for (std::size_t i = 0; i < spec.snr_db.size(); ++i)
		{
			EXPECT_EQ(r.grid[i],
			          check_core(symmetric_sic_scenario(r.users, spec.snr_db[i], spec.power), ExpectationModel::rational)
			              .verdict);
		}
		for (Transition const& t : r.transitions)
		{
			EXPECT_LT(t.low_db, t.boundary_db);
			EXPECT_LT(t.boundary_db, t.high_db);
			double const half = 0.5 * spec.resolution_db;
			auto verdict = [&](double snr) {
				return check_core(symmetric_sic_scenario(r.users, snr, spec.power), ExpectationModel::rational).verdict;
			};
			EXPECT_EQ(verdict(t.boundary_db - half), t.low_verdict);
			EXPECT_EQ(verdict(t.boundary_db + half), t.high_verdict);
		}
		if (r.threshold_db)
		{
			EXPECT_TRUE(r.monotone);
			EXPECT_EQ(r.grid.front(), Verdict::nonempty);
			EXPECT_EQ(r.grid.back(), Verdict::empty);
		}
		else
		{
			EXPECT_FALSE(r.note.empty());
		}
	}
	EXPECT_EQ(out[1].grid.back(), Verdict::empty);
}

TEST(SnrBoundary, RejectsBadSpecs)
{
	SweepSpec spec;
	spec.users = {4};
	spec.snr_db = {0.0, -1.0};
	EXPECT_THROW(snr_boundary(spec, ExpectationModel::rational), InvalidArgument);
	spec.snr_db = {0.0};
	spec.users = {1};
	EXPECT_THROW(snr_boundary(spec, ExpectationModel::rational), InvalidArgument);
	spec.users = {};
	EXPECT_THROW(snr_boundary(spec, ExpectationModel::rational), InvalidArgument);
}

TEST(ApproxRatio, GrandCoalitionIsExact)
{
	Scenario const s = symmetric_scenario(3, 1.0, SicTimeShareReceiver{});
	auto const curve = approx_ratio(s, {-20.0, 0.0, 20.0, 40.0});
	ASSERT_EQ(curve.points.size(), 12u);
	for (RatioPoint const& p : curve.points)
	{
		EXPECT_GT(p.exact, 0.0);
		EXPECT_NEAR(p.ratio, p.approx / p.exact, 1e-15);
		if (p.size == 3)
		{
			EXPECT_NEAR(p.ratio, 1.0, 1e-12);
		}
	}
}

TEST(ApproxRatio, SingletonMatchesClosedForm)
{
	// One user against two singleton outsiders, uniform over 6 orders: the
	// user is decoded with 0, 1 or 2 later users with equal probability.
	Scenario const s = symmetric_scenario(3, 1.0, SicTimeShareReceiver{});
	double const snr_db = 10.0;
	double const n0 = snr_db_to_noise(snr_db);
	double const exact = (std::log((n0 + 3.0) / (n0 + 2.0)) + std::log((n0 + 2.0) / (n0 + 1.0))
	                      + std::log((n0 + 1.0) / n0))
	                     / 3.0;
	auto const curve = approx_ratio(s, {snr_db});
	ASSERT_EQ(curve.points.front().size, 1);
	EXPECT_NEAR(curve.points.front().exact, exact, 1e-12);
	EXPECT_NEAR(curve.points.front().approx, std::log1p(1.0 / n0) / 3.0, 1e-12);
}

TEST(ApproxRatio, Preconditions)
{
	EXPECT_THROW(approx_ratio(symmetric_scenario(3, 1.0, SudReceiver{}), {0.0}), InvalidArgument);
	EXPECT_THROW(approx_ratio(symmetric_scenario(3, 1.0, SicTimeShareReceiver{{0.5, 0.5}}), {0.0}),
	             InvalidArgument);
	gen::Rng rng(55);
	Scenario const asym = gen::random_scenario(rng, {.min_users = 3, .max_users = 3, .max_rx = 1},
	                                           SicTimeShareReceiver{});
	EXPECT_FALSE(is_symmetric(asym));
	EXPECT_THROW(approx_ratio(asym, {0.0}), InvalidArgument);
	EXPECT_TRUE(is_symmetric(symmetric_scenario(3, 1.0, SudReceiver{})));
}

} // namespace
} // namespace txcoop
