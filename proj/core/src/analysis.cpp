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

#include <txcoop/capacity.hpp>
#include <txcoop/errors.hpp>

#include <algorithm>
#include <numeric>
#include <random>

namespace txcoop {

namespace {

constexpr double merge_tolerance = 1e-8;
constexpr double externality_tolerance = 1e-9;
constexpr int max_cohesion_enumeration = 7;

/// Random set partition with at least min_blocks blocks: users draw block
/// labels uniformly, then labels are canonicalized.
Partition random_partition(std::mt19937_64& rng, int users, std::size_t min_blocks)
{
	std::uniform_int_distribution<int> label(0, users - 1);
	while (true)
	{
		std::vector<std::uint32_t> masks(static_cast<std::size_t>(users), 0);
		for (int id = 1; id <= users; ++id)
		{
			masks[static_cast<std::size_t>(label(rng))] |= 1u << (id - 1);
		}
		std::vector<Coalition> blocks;
		for (std::uint32_t m : masks)
		{
			if (m != 0)
			{
				blocks.emplace_back(m);
			}
		}
		if (blocks.size() >= min_blocks)
		{
			return Partition(users, std::move(blocks));
		}
	}
}

Coalition union_of(Partition const& p, std::span<std::size_t const> idx)
{
	std::uint32_t m = 0;
	for (std::size_t i : idx)
	{
		m |= p.block(i).mask();
	}
	return Coalition(m);
}

void check_cohesion(GameValues& values, Partition const& t, double grand, SuperadditivityReport& report)
{
	std::vector<double> const& u = values.utilities(t);
	double const margin = grand - std::accumulate(u.begin(), u.end(), 0.0);
	if (report.cohesion_partitions == 0 || margin < report.worst_cohesion_margin)
	{
		report.worst_cohesion_margin = margin;
	}
	++report.cohesion_partitions;
	if (margin < -merge_tolerance && !report.cohesion_counterexample)
	{
		report.cohesion_counterexample = t;
	}
}

} // namespace

SuperadditivityReport verify_superadditivity(Scenario const& scenario, int trials, std::uint64_t seed,
                                             SolverOptions const& options)
{
	if (trials < 1)
	{
		throw InvalidArgument("trials must be >= 1");
	}
	int const k = scenario.user_count();
	if (k < 2)
	{
		throw InvalidArgument("merges need at least 2 users");
	}
	GameValues values(scenario, options);
	std::mt19937_64 rng(seed);
	SuperadditivityReport report;
	report.trials = trials;
	double const grand = values.grand_value();

	for (int trial = 0; trial < trials; ++trial)
	{
		Partition const before = random_partition(rng, k, 2);
		std::vector<std::size_t> idx(before.size());
		std::iota(idx.begin(), idx.end(), std::size_t{0});
		std::shuffle(idx.begin(), idx.end(), rng);
		std::uniform_int_distribution<std::size_t> r_dist(2, before.size());
		idx.resize(r_dist(rng));
		std::ranges::sort(idx);
		try
		{
			Partition const after = before.merged(idx);
			Coalition const merged = union_of(before, idx);
			std::vector<double> const& u = values.utilities(before);
			double parts = 0.0;
			for (std::size_t i : idx)
			{
				parts += u[i];
			}
			double const whole = values.value(after, merged);
			double const margin = whole - parts;
			if (report.checked == 0 || margin < report.worst_margin)
			{
				report.worst_margin = margin;
			}
			++report.checked;
			if (margin < -merge_tolerance && !report.counterexample)
			{
				report.counterexample = MergeWitness{before, after, merged, parts, whole};
			}
			if (k > max_cohesion_enumeration)
			{
				check_cohesion(values, before, grand, report);
			}
		}
		catch (NonConvergence const&)
		{
			++report.skipped;
		}
	}
	if (k <= max_cohesion_enumeration)
	{
		for (Partition const& t : enumerate_partitions(k))
		{
			check_cohesion(values, t, grand, report);
		}
	}
	return report;
}

std::string_view externality_name(Externality e)
{
	switch (e)
	{
	case Externality::negative:
		return "negative";
	case Externality::positive:
		return "positive";
	case Externality::mixed:
		return "mixed";
	}
	return "unknown";
}

MergeWitness external_change(Scenario const& scenario, Partition const& before, Partition const& after,
                             Coalition coalition, SolverOptions const& options)
{
	GameValues values(scenario, options);
	return MergeWitness{before, after, coalition, values.value(before, coalition), values.value(after, coalition)};
}

ExternalityVerdict classify_externalities(Scenario const& scenario, int trials, std::uint64_t seed,
                                          SolverOptions const& options)
{
	if (trials < 1)
	{
		throw InvalidArgument("trials must be >= 1");
	}
	int const k = scenario.user_count();
	if (k < 3)
	{
		throw InvalidArgument("externalities need at least 3 users (a merge plus an outsider)");
	}
	GameValues values(scenario, options);
	std::mt19937_64 rng(seed);
	ExternalityVerdict verdict;
	for (int trial = 0; trial < trials; ++trial)
	{
		Partition const before = random_partition(rng, k, 3);
		std::vector<std::size_t> idx(before.size());
		std::iota(idx.begin(), idx.end(), std::size_t{0});
		std::shuffle(idx.begin(), idx.end(), rng);
		idx.resize(2);
		std::ranges::sort(idx);
		try
		{
			Partition const after = before.merged(idx);
			std::vector<double> const& u_before = values.utilities(before);
			std::vector<double> const& u_after = values.utilities(after);
			for (std::size_t b = 0; b < before.size(); ++b)
			{
				if (b == idx[0] || b == idx[1])
				{
					continue;
				}
				Coalition const outsider = before.block(b);
				double const x = u_before[b];
				double const y = u_after[*after.find(outsider)];
				if (y < x - externality_tolerance)
				{
					++verdict.negative_count;
				}
				else if (y > x + externality_tolerance)
				{
					++verdict.positive_count;
				}
				verdict.witnesses.push_back(MergeWitness{before, after, outsider, x, y});
			}
		}
		catch (NonConvergence const&)
		{
			++verdict.skipped;
		}
	}
	if (verdict.positive_count > 0 && verdict.negative_count > 0)
	{
		verdict.classification = Externality::mixed;
	}
	else if (verdict.positive_count > 0)
	{
		verdict.classification = Externality::positive;
	}
	else
	{
		verdict.classification = Externality::negative;
	}
	return verdict;
}

// ---------------------------------------------------------------------------

Scenario symmetric_sic_scenario(int users, double snr_db, PowerMode power)
{
	std::vector<int> order(static_cast<std::size_t>(users));
	std::iota(order.begin(), order.end(), 1);
	return symmetric_scenario(users, snr_db_to_noise(snr_db), SicFixedReceiver{order}, power);
}

std::vector<BoundaryResult> snr_boundary(SweepSpec const& spec, ExpectationModel model)
{
	if (spec.snr_db.empty() || spec.users.empty())
	{
		throw InvalidArgument("sweep needs at least one K and one SNR");
	}
	if (std::adjacent_find(spec.snr_db.begin(), spec.snr_db.end(), std::greater_equal<>()) != spec.snr_db.end())
	{
		throw InvalidArgument("SNR grid must be strictly increasing");
	}
	if (!(spec.resolution_db > 0.0))
	{
		throw InvalidArgument("bisection resolution must be positive");
	}

	std::vector<BoundaryResult> out;
	for (int k : spec.users)
	{
		if (k < 2 || k > 10)
		{
			throw InvalidArgument("sweep K must lie in 2..10");
		}
		auto verdict_at = [&](double snr) {
			return check_core(symmetric_sic_scenario(k, snr, spec.power), model, spec.solver, spec.core).verdict;
		};
		BoundaryResult res;
		res.users = k;
		for (double snr : spec.snr_db)
		{
			res.grid.push_back(verdict_at(snr));
		}
		for (std::size_t i = 0; i + 1 < res.grid.size(); ++i)
		{
			if (res.grid[i] == res.grid[i + 1])
			{
				continue;
			}
			Transition tr{spec.snr_db[i], spec.snr_db[i + 1], res.grid[i], res.grid[i + 1], 0.0};
			double lo = tr.low_db;
			double hi = tr.high_db;
			while (hi - lo > spec.resolution_db)
			{
				double const mid = 0.5 * (lo + hi);
				(verdict_at(mid) == tr.low_verdict ? lo : hi) = mid;
			}
			tr.boundary_db = 0.5 * (lo + hi);
			res.transitions.push_back(tr);
		}
		res.monotone = res.transitions.empty()
		               || (res.transitions.size() == 1 && res.transitions[0].low_verdict == Verdict::nonempty);
		if (res.transitions.empty())
		{
			res.note = std::string("no transition on the grid (all ") + std::string(verdict_name(res.grid.front()))
			           + "); boundary lies outside the grid";
		}
		else if (res.monotone)
		{
			res.threshold_db = res.transitions[0].boundary_db;
		}
		else
		{
			res.note = "verdict is not monotone in SNR; all transitions reported";
		}
		out.push_back(std::move(res));
	}
	return out;
}

// ---------------------------------------------------------------------------

bool is_symmetric(Scenario const& scenario)
{
	auto const& u = scenario.users();
	return std::ranges::all_of(u, [&](UserSpec const& x) {
		return x.antennas == u.front().antennas && x.channel == u.front().channel && x.power == u.front().power;
	});
}

RatioCurve approx_ratio(Scenario const& scenario, std::vector<double> const& snr_db, SolverOptions const& options)
{
	auto const* ts = std::get_if<SicTimeShareReceiver>(&scenario.receiver());
	if (ts == nullptr || !ts->weights.empty())
	{
		throw InvalidArgument("approximation ratio needs a uniform time-sharing receiver");
	}
	if (!is_symmetric(scenario))
	{
		throw InvalidArgument("approximation ratio needs a symmetric scenario");
	}
	int const k = scenario.user_count();
	if (k > 7)
	{
		throw InvalidArgument("approximation ratio is limited to K <= 7");
	}
	RatioCurve curve;
	std::vector<std::optional<RatioPoint>> previous(static_cast<std::size_t>(k) + 1);
	for (double snr : snr_db)
	{
		Scenario const s = scenario.with_noise(snr_db_to_noise(snr));
		for (int size = 1; size <= k; ++size)
		{
			Coalition const c(static_cast<std::uint32_t>((1u << size) - 1u));
			std::vector<Coalition> blocks{c};
			for (int id = size + 1; id <= k; ++id)
			{
				blocks.push_back(Coalition::singleton(id));
			}
			Partition const t(k, std::move(blocks));
			RatioPoint p;
			p.snr_db = snr;
			p.size = size;
			p.exact = ne_timeshare(s, t, options)[*t.find(c)];
			p.approx = timeshare_highsnr_utility(s, c, options.per_antenna);
			p.ratio = p.approx / p.exact;
			auto& prev = previous[static_cast<std::size_t>(size)];
			if (prev && snr > 20.0 && prev->snr_db > 20.0 && std::abs(p.ratio - 1.0) > std::abs(prev->ratio - 1.0))
			{
				curve.monotonicity_violations.push_back(p);
			}
			prev = p;
			curve.points.push_back(p);
		}
	}
	return curve;
}

} // namespace txcoop
