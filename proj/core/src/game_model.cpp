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
#include <txcoop/game_model.hpp>

#include <txcoop/errors.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace txcoop {

namespace {

class Fnv1a
{
public:
	void bytes(void const* data, std::size_t n)
	{
		auto const* p = static_cast<unsigned char const*>(data);
		for (std::size_t i = 0; i < n; ++i)
		{
			hash_ ^= p[i];
			hash_ *= 0x100000001b3ULL;
		}
	}

	void u64(std::uint64_t v) { bytes(&v, sizeof v); }
	void real(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
	std::uint64_t value() const { return hash_; }

private:
	std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

} // namespace

// ---------------------------------------------------------------------------

PowerConstraint::PowerConstraint(PowerMode mode, std::vector<double> values)
: mode_(mode), values_(std::move(values))
{
	for (double v : values_)
	{
		if (!(v >= 0.0) || !std::isfinite(v))
		{
			throw InvalidArgument("power budgets must be finite and nonnegative");
		}
	}
}

PowerConstraint PowerConstraint::sum(double budget)
{
	return PowerConstraint(PowerMode::sum, {budget});
}

PowerConstraint PowerConstraint::per_antenna(std::vector<double> budgets)
{
	if (budgets.empty())
	{
		throw InvalidArgument("per-antenna constraint needs at least one budget");
	}
	return PowerConstraint(PowerMode::per_antenna, std::move(budgets));
}

double PowerConstraint::total() const noexcept
{
	return std::accumulate(values_.begin(), values_.end(), 0.0);
}

PowerConstraint PowerConstraint::joined(PowerConstraint const& other) const
{
	if (mode_ != other.mode_)
	{
		throw InvalidArgument("cannot join sum-power and per-antenna constraints");
	}
	if (mode_ == PowerMode::sum)
	{
		return sum(values_.front() + other.values_.front());
	}
	std::vector<double> v = values_;
	v.insert(v.end(), other.values_.begin(), other.values_.end());
	return per_antenna(std::move(v));
}

// ---------------------------------------------------------------------------

std::string receiver_name(ReceiverModel const& receiver)
{
	struct Visitor
	{
		std::string operator()(SudReceiver const&) const { return "sud"; }
		std::string operator()(SicFixedReceiver const&) const { return "sic_fixed"; }
		std::string operator()(SicTimeShareReceiver const&) const { return "sic_timeshare"; }
	};
	return std::visit(Visitor{}, receiver);
}

Scenario::Scenario(std::vector<UserSpec> users, int rx_antennas, double noise, ReceiverModel receiver)
: users_(std::move(users)), rx_antennas_(rx_antennas), noise_(noise), receiver_(std::move(receiver))
{
	int const k = user_count();
	if (k < 1 || k > max_users)
	{
		throw InvalidArgument("number of users must be in 1.." + std::to_string(max_users));
	}
	if (rx_antennas_ < 1)
	{
		throw InvalidArgument("rx_antennas must be >= 1");
	}
	if (!(noise_ > 0.0) || !std::isfinite(noise_))
	{
		throw InvalidArgument("noise N0 must be finite and > 0");
	}
	for (int i = 0; i < k; ++i)
	{
		UserSpec const& u = users_[static_cast<std::size_t>(i)];
		std::string const who = "user " + std::to_string(i + 1);
		if (u.id != i + 1)
		{
			throw InvalidArgument("user ids must be exactly 1..K in order (" + who + " has id "
			                      + std::to_string(u.id) + ")");
		}
		if (u.antennas < 1)
		{
			throw InvalidArgument(who + ": antennas must be >= 1");
		}
		if (u.channel.rows() != rx_antennas_ || u.channel.cols() != u.antennas)
		{
			throw InvalidArgument(who + ": channel must be " + std::to_string(rx_antennas_) + "x"
			                      + std::to_string(u.antennas));
		}
		if (!u.channel.allFinite())
		{
			throw InvalidArgument(who + ": channel entries must be finite");
		}
		if (u.power.mode() == PowerMode::per_antenna
		    && static_cast<int>(u.power.values().size()) != u.antennas)
		{
			throw InvalidArgument(who + ": per-antenna budget count must equal antennas");
		}
		if (u.power.mode() != users_.front().power.mode())
		{
			throw InvalidArgument("all users must share one power-constraint mode");
		}
	}

	if (auto const* sic = std::get_if<SicFixedReceiver>(&receiver_))
	{
		validate_base_order(sic->base_order, k);
	}
	else if (auto const* ts = std::get_if<SicTimeShareReceiver>(&receiver_))
	{
		if (!ts->weights.empty())
		{
			double total = 0.0;
			for (double w : ts->weights)
			{
				if (!(w >= 0.0))
				{
					throw InvalidArgument("time-sharing weights must be nonnegative");
				}
				total += w;
			}
			if (std::abs(total - 1.0) > 1e-12)
			{
				throw InvalidArgument("time-sharing weights must sum to 1");
			}
		}
	}
}

Scenario Scenario::with_noise(double noise) const
{
	return Scenario(users_, rx_antennas_, noise, receiver_);
}

Scenario Scenario::with_receiver(ReceiverModel receiver) const
{
	return Scenario(users_, rx_antennas_, noise_, std::move(receiver));
}

std::uint64_t Scenario::fingerprint() const
{
	Fnv1a h;
	h.u64(users_.size());
	h.u64(static_cast<std::uint64_t>(rx_antennas_));
	h.real(noise_);
	for (UserSpec const& u : users_)
	{
		h.u64(static_cast<std::uint64_t>(u.id));
		h.u64(static_cast<std::uint64_t>(u.antennas));
		for (Eigen::Index r = 0; r < u.channel.rows(); ++r)
		{
			for (Eigen::Index c = 0; c < u.channel.cols(); ++c)
			{
				h.real(u.channel(r, c));
			}
		}
		h.u64(static_cast<std::uint64_t>(u.power.mode()));
		for (double v : u.power.values())
		{
			h.real(v);
		}
	}
	h.u64(receiver_.index());
	if (auto const* sic = std::get_if<SicFixedReceiver>(&receiver_))
	{
		for (int id : sic->base_order)
		{
			h.u64(static_cast<std::uint64_t>(id));
		}
	}
	else if (auto const* ts = std::get_if<SicTimeShareReceiver>(&receiver_))
	{
		for (double w : ts->weights)
		{
			h.real(w);
		}
	}
	return h.value();
}

Scenario symmetric_scenario(int users, double noise, ReceiverModel receiver, PowerMode mode)
{
	std::vector<UserSpec> specs;
	for (int k = 1; k <= users; ++k)
	{
		UserSpec u;
		u.id = k;
		u.antennas = 1;
		u.channel = Matrix::Ones(1, 1);
		u.power = mode == PowerMode::sum ? PowerConstraint::sum(1.0) : PowerConstraint::per_antenna({1.0});
		specs.push_back(std::move(u));
	}
	return Scenario(std::move(specs), 1, noise, std::move(receiver));
}

// ---------------------------------------------------------------------------

Coalition::Coalition(std::uint32_t mask) : mask_(mask)
{
	if (mask_ == 0)
	{
		throw InvalidArgument("coalition must be nonempty");
	}
	if (mask_ >> max_users)
	{
		throw InvalidArgument("coalition member id out of range");
	}
}

Coalition Coalition::of(std::initializer_list<int> ids)
{
	return of(std::span<int const>(ids.begin(), ids.size()));
}

Coalition Coalition::of(std::span<int const> ids)
{
	std::uint32_t mask = 0;
	for (int id : ids)
	{
		if (id < 1 || id > max_users)
		{
			throw InvalidArgument("coalition member id out of range: " + std::to_string(id));
		}
		mask |= 1u << (id - 1);
	}
	return Coalition(mask);
}

Coalition Coalition::singleton(int id)
{
	return of({id});
}

Coalition Coalition::all(int users)
{
	if (users < 1 || users > max_users)
	{
		throw InvalidArgument("number of users out of range");
	}
	return Coalition((1u << users) - 1u);
}

int Coalition::size() const noexcept
{
	return std::popcount(mask_);
}

bool Coalition::contains(int id) const noexcept
{
	return id >= 1 && id <= max_users && ((mask_ >> (id - 1)) & 1u);
}

int Coalition::smallest() const noexcept
{
	return std::countr_zero(mask_) + 1;
}

int Coalition::largest() const noexcept
{
	return 32 - std::countl_zero(mask_);
}

std::vector<int> Coalition::members() const
{
	std::vector<int> ids;
	for (std::uint32_t m = mask_; m != 0; m &= m - 1)
	{
		ids.push_back(std::countr_zero(m) + 1);
	}
	return ids;
}

std::string Coalition::to_string() const
{
	std::string s = "{";
	bool first = true;
	for (int id : members())
	{
		if (!first)
		{
			s += ',';
		}
		s += std::to_string(id);
		first = false;
	}
	return s + "}";
}

// ---------------------------------------------------------------------------

Partition::Partition(int users, std::vector<Coalition> blocks) : users_(users), blocks_(std::move(blocks))
{
	if (users_ < 1 || users_ > max_users)
	{
		throw InvalidArgument("number of users out of range");
	}
	std::uint32_t seen = 0;
	for (Coalition const& c : blocks_)
	{
		if (!c.subset_of(Coalition::all(users_)))
		{
			throw InvalidArgument("partition block " + c.to_string() + " is not a subset of the user set");
		}
		if (seen & c.mask())
		{
			throw InvalidArgument("partition blocks must be pairwise disjoint");
		}
		seen |= c.mask();
	}
	if (seen != Coalition::all(users_).mask())
	{
		throw InvalidArgument("partition blocks must cover every user");
	}
	std::ranges::sort(blocks_, {}, &Coalition::smallest);
}

Partition Partition::from_rgs(std::span<std::uint8_t const> rgs)
{
	int const k = static_cast<int>(rgs.size());
	std::vector<std::uint32_t> masks;
	for (int i = 0; i < k; ++i)
	{
		std::size_t const b = rgs[static_cast<std::size_t>(i)];
		if (b > masks.size())
		{
			throw InvalidArgument("not a restricted growth string");
		}
		if (b == masks.size())
		{
			masks.push_back(0);
		}
		masks[b] |= 1u << i;
	}
	std::vector<Coalition> blocks;
	blocks.reserve(masks.size());
	for (std::uint32_t m : masks)
	{
		blocks.emplace_back(m);
	}
	return Partition(k, std::move(blocks));
}

Partition Partition::singletons(int users)
{
	std::vector<Coalition> blocks;
	for (int k = 1; k <= users; ++k)
	{
		blocks.push_back(Coalition::singleton(k));
	}
	return Partition(users, std::move(blocks));
}

Partition Partition::grand(int users)
{
	return Partition(users, {Coalition::all(users)});
}

std::size_t Partition::block_of(int id) const
{
	for (std::size_t i = 0; i < blocks_.size(); ++i)
	{
		if (blocks_[i].contains(id))
		{
			return i;
		}
	}
	throw InvalidArgument("user " + std::to_string(id) + " not in partition");
}

std::optional<std::size_t> Partition::find(Coalition c) const
{
	for (std::size_t i = 0; i < blocks_.size(); ++i)
	{
		if (blocks_[i] == c)
		{
			return i;
		}
	}
	return std::nullopt;
}

std::vector<std::uint8_t> Partition::rgs() const
{
	std::vector<std::uint8_t> out(static_cast<std::size_t>(users_));
	for (std::size_t b = 0; b < blocks_.size(); ++b)
	{
		for (int id : blocks_[b].members())
		{
			out[static_cast<std::size_t>(id - 1)] = static_cast<std::uint8_t>(b);
		}
	}
	return out;
}

std::uint64_t Partition::key() const
{
	std::uint64_t key = static_cast<std::uint64_t>(users_);
	auto const r = rgs();
	for (std::size_t i = 0; i < r.size(); ++i)
	{
		key |= static_cast<std::uint64_t>(r[i]) << (4 * (i + 1));
	}
	return key;
}

Partition Partition::merged(std::span<std::size_t const> indices) const
{
	if (indices.empty())
	{
		return *this;
	}
	std::uint32_t mask = 0;
	std::vector<bool> drop(blocks_.size(), false);
	for (std::size_t i : indices)
	{
		mask |= block(i).mask();
		drop[i] = true;
	}
	std::vector<Coalition> out;
	for (std::size_t i = 0; i < blocks_.size(); ++i)
	{
		if (!drop[i])
		{
			out.push_back(blocks_[i]);
		}
	}
	out.emplace_back(mask);
	return Partition(users_, std::move(out));
}

std::string Partition::to_string() const
{
	std::string s;
	for (Coalition const& c : blocks_)
	{
		s += c.to_string();
	}
	return s;
}

// ---------------------------------------------------------------------------

PartitionGenerator::PartitionGenerator(int users)
{
	if (users < 1 || users > max_users)
	{
		throw InvalidArgument("partition enumeration requires 1 <= K <= " + std::to_string(max_users));
	}
	rgs_.assign(static_cast<std::size_t>(users), 0);
	prefix_max_.assign(static_cast<std::size_t>(users), 0);
}

bool PartitionGenerator::advance()
{
	// Increment the rightmost position that may grow, reset the tail to zero.
	std::size_t const k = rgs_.size();
	for (std::size_t i = k; i-- > 1;)
	{
		if (rgs_[i] <= prefix_max_[i - 1])
		{
			++rgs_[i];
			prefix_max_[i] = std::max(prefix_max_[i - 1], rgs_[i]);
			for (std::size_t j = i + 1; j < k; ++j)
			{
				rgs_[j] = 0;
				prefix_max_[j] = prefix_max_[i];
			}
			return true;
		}
	}
	return false;
}

std::vector<Partition> enumerate_partitions(int users)
{
	PartitionGenerator gen(users);
	std::vector<Partition> out;
	do
	{
		out.push_back(gen.partition());
	} while (gen.advance());
	return out;
}

std::uint64_t count_partitions(int users)
{
	PartitionGenerator gen(users);
	std::uint64_t n = 1;
	while (gen.advance())
	{
		++n;
	}
	return n;
}

void validate_base_order(std::span<int const> order, int users)
{
	if (static_cast<int>(order.size()) != users)
	{
		throw InvalidArgument("base order must list each of the " + std::to_string(users) + " users once");
	}
	std::vector<bool> seen(static_cast<std::size_t>(users) + 1, false);
	for (int id : order)
	{
		if (id < 1 || id > users || seen[static_cast<std::size_t>(id)])
		{
			throw InvalidArgument("base order is not a permutation of 1..K");
		}
		seen[static_cast<std::size_t>(id)] = true;
	}
}

std::vector<std::size_t> induced_order_indices(Partition const& partition, std::span<int const> base_order)
{
	int const k = partition.user_count();
	validate_base_order(base_order, k);
	std::vector<int> slot(static_cast<std::size_t>(k) + 1);
	for (std::size_t pos = 0; pos < base_order.size(); ++pos)
	{
		slot[static_cast<std::size_t>(base_order[pos])] = static_cast<int>(pos);
	}
	std::vector<int> latest(partition.size(), -1);
	for (std::size_t b = 0; b < partition.size(); ++b)
	{
		for (int id : partition.block(b).members())
		{
			latest[b] = std::max(latest[b], slot[static_cast<std::size_t>(id)]);
		}
	}
	std::vector<std::size_t> order(partition.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::ranges::sort(order, {}, [&](std::size_t b) { return latest[b]; });
	return order;
}

std::vector<Coalition> induced_order(Partition const& partition, std::span<int const> base_order)
{
	std::vector<Coalition> out;
	for (std::size_t b : induced_order_indices(partition, base_order))
	{
		out.push_back(partition.block(b));
	}
	return out;
}

Matrix coalition_channel(Scenario const& scenario, Coalition coalition)
{
	if (!coalition.subset_of(Coalition::all(scenario.user_count())))
	{
		throw InvalidArgument("coalition " + coalition.to_string() + " not valid for scenario");
	}
	Matrix h(scenario.rx_antennas(), coalition_antennas(scenario, coalition));
	Eigen::Index col = 0;
	for (int id : coalition.members())
	{
		Matrix const& g = scenario.user(id).channel;
		h.middleCols(col, g.cols()) = g;
		col += g.cols();
	}
	return h;
}

PowerConstraint coalition_power(Scenario const& scenario, Coalition coalition)
{
	auto const ids = coalition.members();
	PowerConstraint p = scenario.user(ids.front()).power;
	for (std::size_t i = 1; i < ids.size(); ++i)
	{
		p = p.joined(scenario.user(ids[i]).power);
	}
	return p;
}

int coalition_antennas(Scenario const& scenario, Coalition coalition)
{
	int n = 0;
	for (int id : coalition.members())
	{
		n += scenario.user(id).antennas;
	}
	return n;
}

} // namespace txcoop
