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

#include <txcoop/errors.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

namespace txcoop {

namespace {

struct BlockData
{
	std::vector<Matrix> channels;
	std::vector<PowerConstraint> powers;
};

BlockData block_data(Scenario const& scenario, Partition const& partition)
{
	BlockData d;
	for (Coalition const& c : partition.blocks())
	{
		d.channels.push_back(coalition_channel(scenario, c));
		d.powers.push_back(coalition_power(scenario, c));
	}
	return d;
}

Matrix received(Matrix const& h, Matrix const& q)
{
	Matrix r = h * q * h.transpose();
	return 0.5 * (r + r.transpose());
}

Matrix default_covariance(PowerConstraint const& power, Eigen::Index n)
{
	if (power.mode() == PowerMode::sum)
	{
		return Matrix::Identity(n, n) * (power.values().front() / static_cast<double>(n));
	}
	Vector const caps = Eigen::Map<Vector const>(power.values().data(), n);
	return caps.asDiagonal();
}

void require_permutation(std::span<std::size_t const> order, std::size_t n)
{
	if (order.size() != n)
	{
		throw InvalidArgument("decoding order must list every block once");
	}
	std::vector<bool> seen(n, false);
	for (std::size_t b : order)
	{
		if (b >= n || seen[b])
		{
			throw InvalidArgument("decoding order is not a permutation of block indices");
		}
		seen[b] = true;
	}
}

std::uint64_t factorial(std::size_t n)
{
	std::uint64_t f = 1;
	for (std::size_t i = 2; i <= n; ++i)
	{
		f *= i;
	}
	return f;
}

/// Blocks whose signal is still present when block n is decoded (n excluded).
std::vector<std::size_t> interferers(Scenario const& scenario, Partition const& partition, std::size_t n)
{
	std::vector<std::size_t> out;
	if (std::holds_alternative<SudReceiver>(scenario.receiver()))
	{
		for (std::size_t j = 0; j < partition.size(); ++j)
		{
			if (j != n)
			{
				out.push_back(j);
			}
		}
		return out;
	}
	auto const* sic = std::get_if<SicFixedReceiver>(&scenario.receiver());
	if (sic == nullptr)
	{
		throw InvalidArgument("gradient diagnostics are defined for SUD and fixed-order SIC receivers only");
	}
	auto const order = induced_order_indices(partition, sic->base_order);
	auto const pos = std::ranges::find(order, n);
	out.assign(std::next(pos), order.end());
	return out;
}

[[noreturn]] void rethrow_annotated(std::exception_ptr error, std::string const& prefix)
{
	try
	{
		std::rethrow_exception(error);
	}
	catch (NonConvergence const& e)
	{
		throw NonConvergence(prefix + e.what(), e.best_iterate(), e.history());
	}
	catch (NumericalFailure const& e)
	{
		throw NumericalFailure(prefix + e.what());
	}
	catch (InvalidCovariance const& e)
	{
		throw InvalidCovariance(prefix + e.what());
	}
	catch (InvalidArgument const& e)
	{
		throw InvalidArgument(prefix + e.what());
	}
	catch (std::exception const& e)
	{
		throw Error(prefix + e.what());
	}
}

} // namespace

void validate_profile(Scenario const& scenario, Partition const& partition, CovarianceProfile const& profile)
{
	if (profile.blocks.size() != partition.size())
	{
		throw InvalidCovariance("profile must hold one covariance per block");
	}
	for (std::size_t b = 0; b < partition.size(); ++b)
	{
		Coalition const c = partition.block(b);
		Matrix const& q = profile.blocks[b];
		Eigen::Index const n = coalition_antennas(scenario, c);
		std::string const who = "covariance of " + c.to_string();
		if (q.rows() != n || q.cols() != n)
		{
			throw InvalidCovariance(who + " must be " + std::to_string(n) + "x" + std::to_string(n));
		}
		require_psd(q, who.c_str());
		PowerConstraint const power = coalition_power(scenario, c);
		if (power.mode() == PowerMode::sum)
		{
			if (q.trace() > power.values().front() + 1e-9)
			{
				throw InvalidCovariance(who + " exceeds its sum-power budget");
			}
		}
		else
		{
			for (Eigen::Index i = 0; i < n; ++i)
			{
				if (q(i, i) > power.values()[static_cast<std::size_t>(i)] + 1e-9)
				{
					throw InvalidCovariance(who + " exceeds a per-antenna budget");
				}
			}
		}
	}
}

// ---------------------------------------------------------------------------

Equilibrium ne_sic_ordered(Scenario const& scenario, Partition const& partition,
                           std::span<std::size_t const> order, SolverOptions const& options)
{
	require_permutation(order, partition.size());
	if (options.initial)
	{
		validate_profile(scenario, partition, *options.initial);
	}
	BlockData const data = block_data(scenario, partition);
	Eigen::Index const m = scenario.rx_antennas();
	double const n0 = scenario.noise();

	Equilibrium eq;
	eq.order.assign(order.begin(), order.end());
	eq.profile.blocks.resize(partition.size());
	eq.utilities.resize(partition.size());

	// Block n only sees blocks decoded after it, so one sweep from the
	// last-decoded block backwards yields every best response exactly.
	Matrix interference = Matrix::Zero(m, m);
	for (std::size_t pos = order.size(); pos-- > 0;)
	{
		std::size_t const b = order[pos];
		Matrix const noise = n0 * Matrix::Identity(m, m) + interference;
		PerAntennaOptions pa = options.per_antenna;
		if (options.initial)
		{
			pa.initial = options.initial->blocks[b];
		}
		MaxRateResult best = maximize_rate(data.channels[b], noise, data.powers[b], pa);
		eq.utilities[b] = logdet_rate(n0, data.channels[b], best.cov, interference);
		interference += received(data.channels[b], best.cov);
		eq.profile.blocks[b] = std::move(best.cov);
	}
	return eq;
}

Equilibrium ne_sic(Scenario const& scenario, Partition const& partition, SolverOptions const& options)
{
	auto const* sic = std::get_if<SicFixedReceiver>(&scenario.receiver());
	if (sic == nullptr)
	{
		throw InvalidArgument("ne_sic requires a fixed-order SIC receiver");
	}
	auto const order = induced_order_indices(partition, sic->base_order);
	return ne_sic_ordered(scenario, partition, order, options);
}

Equilibrium ne_sud(Scenario const& scenario, Partition const& partition, SolverOptions const& options)
{
	BlockData const data = block_data(scenario, partition);
	std::size_t const nb = partition.size();
	Eigen::Index const m = scenario.rx_antennas();
	double const n0 = scenario.noise();
	Matrix const base = n0 * Matrix::Identity(m, m);

	Equilibrium eq;
	eq.utilities.assign(nb, 0.0);
	if (options.initial)
	{
		validate_profile(scenario, partition, *options.initial);
		eq.profile = *options.initial;
	}
	else
	{
		for (std::size_t b = 0; b < nb; ++b)
		{
			eq.profile.blocks.push_back(default_covariance(data.powers[b], data.channels[b].cols()));
		}
	}

	auto interference_for = [&](std::vector<Matrix> const& rx, std::size_t n) {
		Matrix j = Matrix::Zero(m, m);
		for (std::size_t k = 0; k < nb; ++k)
		{
			if (k != n)
			{
				j += rx[k];
			}
		}
		return j;
	};
	auto evaluate = [&](CovarianceProfile const& profile, std::vector<double>& out) {
		std::vector<Matrix> rx;
		for (std::size_t b = 0; b < nb; ++b)
		{
			rx.push_back(received(data.channels[b], profile.blocks[b]));
		}
		for (std::size_t b = 0; b < nb; ++b)
		{
			out[b] = rate_against(data.channels[b], profile.blocks[b], base + interference_for(rx, b));
		}
	};

	if (nb == 1)
	{
		MaxRateResult best = maximize_rate(data.channels[0], base, data.powers[0], options.per_antenna);
		eq.profile.blocks[0] = std::move(best.cov);
		eq.utilities[0] = best.rate;
		return eq;
	}

	evaluate(eq.profile, eq.utilities);
	std::vector<double> history;
	std::vector<double> next(nb);
	double const keep = options.sud_damping;
	for (int round = 1; round <= options.sud_max_rounds; ++round)
	{
		std::vector<Matrix> rx;
		for (std::size_t b = 0; b < nb; ++b)
		{
			rx.push_back(received(data.channels[b], eq.profile.blocks[b]));
		}
		std::vector<Matrix> responses(nb);
		for (std::size_t b = 0; b < nb; ++b)
		{
			PerAntennaOptions pa = options.per_antenna;
			pa.initial = eq.profile.blocks[b];
			responses[b] = maximize_rate(data.channels[b], base + interference_for(rx, b), data.powers[b], pa).cov;
		}
		for (std::size_t b = 0; b < nb; ++b)
		{
			eq.profile.blocks[b] = keep * eq.profile.blocks[b] + (1.0 - keep) * responses[b];
		}
		evaluate(eq.profile, next);
		double change = 0.0;
		for (std::size_t b = 0; b < nb; ++b)
		{
			change = std::max(change, std::abs(next[b] - eq.utilities[b]));
		}
		eq.utilities = next;
		eq.rounds = round;
		history.push_back(change);
		if (change < options.sud_tolerance)
		{
			return eq;
		}
	}
	std::vector<double> tail(history.end() - std::min<std::ptrdiff_t>(64, static_cast<std::ptrdiff_t>(history.size())),
	                         history.end());
	throw NonConvergence("ne_sud: damped best response did not converge for " + partition.to_string(),
	                     eq.profile.blocks, std::move(tail));
}

std::vector<double> ne_timeshare(Scenario const& scenario, Partition const& partition, SolverOptions const& options,
                                 std::span<double const> weights)
{
	std::size_t const nb = partition.size();
	if (nb > 7)
	{
		throw InvalidArgument("ne_timeshare: more than 7 blocks (N! > 5040 orders)");
	}
	if (weights.empty())
	{
		if (auto const* ts = std::get_if<SicTimeShareReceiver>(&scenario.receiver()))
		{
			weights = ts->weights;
		}
	}
	std::uint64_t const orders = factorial(nb);
	if (!weights.empty())
	{
		if (weights.size() != orders)
		{
			throw InvalidArgument("time-sharing weights have " + std::to_string(weights.size()) + " entries but "
			                      + partition.to_string() + " has " + std::to_string(orders) + " decoding orders");
		}
		double const total = std::accumulate(weights.begin(), weights.end(), 0.0);
		if (std::abs(total - 1.0) > 1e-12 || std::ranges::any_of(weights, [](double w) { return w < 0.0; }))
		{
			throw InvalidArgument("time-sharing weights must be a probability vector");
		}
	}

	std::vector<double> avg(nb, 0.0);
	std::vector<std::size_t> order(nb);
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::size_t rank = 0;
	do
	{
		double const w = weights.empty() ? 1.0 / static_cast<double>(orders) : weights[rank];
		if (w > 0.0)
		{
			auto const eq = ne_sic_ordered(scenario, partition, order, options);
			for (std::size_t b = 0; b < nb; ++b)
			{
				avg[b] += w * eq.utilities[b];
			}
		}
		++rank;
	} while (std::next_permutation(order.begin(), order.end()));
	return avg;
}

std::vector<double> ne_utilities(Scenario const& scenario, Partition const& partition, SolverOptions const& options)
{
	struct Visitor
	{
		Scenario const& s;
		Partition const& p;
		SolverOptions const& o;
		std::vector<double> operator()(SudReceiver const&) const { return ne_sud(s, p, o).utilities; }
		std::vector<double> operator()(SicFixedReceiver const&) const { return ne_sic(s, p, o).utilities; }
		std::vector<double> operator()(SicTimeShareReceiver const&) const { return ne_timeshare(s, p, o); }
	};
	return std::visit(Visitor{scenario, partition, options}, scenario.receiver());
}

// ---------------------------------------------------------------------------

Matrix utility_gradient(Scenario const& scenario, Partition const& partition, CovarianceProfile const& profile,
                        std::size_t block)
{
	Eigen::Index const m = scenario.rx_antennas();
	Matrix total = scenario.noise() * Matrix::Identity(m, m);
	Matrix const h = coalition_channel(scenario, partition.block(block));
	total += received(h, profile.blocks.at(block));
	for (std::size_t j : interferers(scenario, partition, block))
	{
		total += received(coalition_channel(scenario, partition.block(j)), profile.blocks.at(j));
	}
	Matrix g = h.transpose() * Eigen::LLT<Matrix>(total).solve(h);
	return 0.5 * (g + g.transpose());
}

DscReport dsc_diagnostic(Scenario const& scenario, Partition const& partition, CovarianceProfile const& a,
                         CovarianceProfile const& b)
{
	validate_profile(scenario, partition, a);
	validate_profile(scenario, partition, b);
	DscReport report;
	for (std::size_t n = 0; n < partition.size(); ++n)
	{
		Matrix const diff = a.blocks[n] - b.blocks[n];
		Matrix const dgrad = utility_gradient(scenario, partition, b, n) - utility_gradient(scenario, partition, a, n);
		double const c = diff.cwiseProduct(dgrad).sum();
		report.per_block.push_back(c);
		report.total += c;
	}
	return report;
}

// ---------------------------------------------------------------------------

UtilityTable::UtilityTable(int users, std::uint64_t fingerprint, std::vector<Partition> partitions,
                           std::vector<std::vector<double>> values)
: users_(users), fingerprint_(fingerprint), partitions_(std::move(partitions)), values_(std::move(values))
{
	if (partitions_.size() != values_.size())
	{
		throw InvalidArgument("utility table: partition/value count mismatch");
	}
	for (std::size_t i = 0; i < partitions_.size(); ++i)
	{
		if (partitions_[i].size() != values_[i].size())
		{
			throw InvalidArgument("utility table: one value per block required for " + partitions_[i].to_string());
		}
		for (double v : values_[i])
		{
			if (!(v >= 0.0))
			{
				throw InvalidArgument("utility table: utilities must be >= 0");
			}
		}
		index_.emplace(partitions_[i].key(), i);
	}
}

std::vector<double> const& UtilityTable::values(Partition const& partition) const
{
	auto const it = index_.find(partition.key());
	if (it == index_.end())
	{
		throw InvalidArgument("partition " + partition.to_string() + " not in utility table");
	}
	return values_[it->second];
}

double UtilityTable::value(Partition const& partition, Coalition coalition) const
{
	auto const b = partition.find(coalition);
	if (!b)
	{
		throw InvalidArgument(coalition.to_string() + " is not a block of " + partition.to_string());
	}
	return values(partition)[*b];
}

std::size_t UtilityTable::entry_count() const noexcept
{
	std::size_t n = 0;
	for (auto const& v : values_)
	{
		n += v.size();
	}
	return n;
}

UtilityTable utility_table(Scenario const& scenario, SolverOptions const& options, unsigned threads)
{
	int const k = scenario.user_count();
	if (std::holds_alternative<SicTimeShareReceiver>(scenario.receiver()) && k > 8)
	{
		throw InvalidArgument("utility_table: time-share receiver limited to K <= 8");
	}
	std::vector<Partition> partitions = enumerate_partitions(k);
	std::vector<std::vector<double>> values(partitions.size());
	std::vector<std::exception_ptr> errors(partitions.size());

	if (threads == 0)
	{
		threads = std::max(1u, std::thread::hardware_concurrency());
	}
	threads = static_cast<unsigned>(std::min<std::size_t>(threads, partitions.size()));

	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (std::size_t i = next++; i < partitions.size(); i = next++)
		{
			try
			{
				values[i] = ne_utilities(scenario, partitions[i], options);
			}
			catch (...)
			{
				errors[i] = std::current_exception();
			}
		}
	};
	if (threads <= 1)
	{
		worker();
	}
	else
	{
		std::vector<std::jthread> pool;
		for (unsigned t = 0; t < threads; ++t)
		{
			pool.emplace_back(worker);
		}
	}
	for (std::size_t i = 0; i < partitions.size(); ++i)
	{
		if (errors[i])
		{
			rethrow_annotated(errors[i], "partition " + partitions[i].to_string() + ": ");
		}
	}
	return UtilityTable(k, scenario.fingerprint(), std::move(partitions), std::move(values));
}

// ---------------------------------------------------------------------------

GameValues::GameValues(Scenario scenario, SolverOptions options)
: scenario_(std::move(scenario)), options_(std::move(options))
{
}

GameValues::GameValues(Scenario scenario, UtilityTable const& table) : scenario_(std::move(scenario))
{
	if (table.fingerprint() != scenario_.fingerprint())
	{
		throw InvalidArgument("utility table was computed for a different scenario");
	}
	for (std::size_t i = 0; i < table.partitions().size(); ++i)
	{
		cache_.emplace(table.partitions()[i].key(), table.values(i));
	}
}

std::vector<double> const& GameValues::utilities(Partition const& partition)
{
	std::uint64_t const key = partition.key();
	{
		std::lock_guard lock(mutex_);
		if (auto it = cache_.find(key); it != cache_.end())
		{
			return it->second;
		}
	}
	std::vector<double> v;
	try
	{
		v = ne_utilities(scenario_, partition, options_);
	}
	catch (...)
	{
		rethrow_annotated(std::current_exception(), "partition " + partition.to_string() + ": ");
	}
	std::lock_guard lock(mutex_);
	return cache_.emplace(key, std::move(v)).first->second;
}

double GameValues::value(Partition const& partition, Coalition coalition)
{
	auto const b = partition.find(coalition);
	if (!b)
	{
		throw InvalidArgument(coalition.to_string() + " is not a block of " + partition.to_string());
	}
	return utilities(partition)[*b];
}

double GameValues::grand_value()
{
	return utilities(Partition::grand(scenario_.user_count())).front();
}

std::size_t GameValues::evaluated() const
{
	std::lock_guard lock(mutex_);
	return cache_.size();
}

} // namespace txcoop
