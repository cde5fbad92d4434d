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
#ifndef TXCOOP_GAME_MODEL_HPP
#define TXCOOP_GAME_MODEL_HPP

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace txcoop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest supported number of transmitters.
inline constexpr int max_users = 12;

// ---------------------------------------------------------------------------
// Power constraints

enum class PowerMode
{
	sum,
	per_antenna
};

/// Either a single sum-power budget or one budget per transmit antenna (watts).
class PowerConstraint
{
public:
	static PowerConstraint sum(double budget);
	static PowerConstraint per_antenna(std::vector<double> budgets);

	PowerMode mode() const noexcept { return mode_; }

	/// Sum mode: one entry. Per-antenna mode: one entry per antenna.
	std::vector<double> const& values() const noexcept { return values_; }

	/// Total power budget in either mode.
	double total() const noexcept;

	/// Concatenation of two constraints of the same mode (coalition stacking).
	PowerConstraint joined(PowerConstraint const& other) const;

	bool operator==(PowerConstraint const&) const = default;

private:
	PowerConstraint(PowerMode mode, std::vector<double> values);

	PowerMode mode_;
	std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Users, receiver, scenario

struct UserSpec
{
	int id = 0;              ///< 1..K
	int antennas = 0;        ///< n_k
	Matrix channel;          ///< M x n_k gain matrix G_k
	PowerConstraint power = PowerConstraint::sum(0.0);
};

struct SudReceiver
{
	bool operator==(SudReceiver const&) const = default;
};

/// Successive cancellation with a fixed user-level decoding order. Earlier
/// entries are decoded first and therefore see the most interference.
struct SicFixedReceiver
{
	std::vector<int> base_order;

	bool operator==(SicFixedReceiver const&) const = default;
};

/// Time sharing between block decoding orders of the evaluated partition.
/// Empty weights mean uniform. Explicit weights are indexed by the
/// lexicographic permutation rank of block indices and only apply to
/// partitions with exactly weights.size() == N! orders.
struct SicTimeShareReceiver
{
	std::vector<double> weights;

	bool operator==(SicTimeShareReceiver const&) const = default;
};

using ReceiverModel = std::variant<SudReceiver, SicFixedReceiver, SicTimeShareReceiver>;

std::string receiver_name(ReceiverModel const& receiver);

/// A complete game instance. Immutable once constructed; the constructor
/// validates every invariant and throws InvalidArgument on violation.
class Scenario
{
public:
	Scenario(std::vector<UserSpec> users, int rx_antennas, double noise, ReceiverModel receiver);

	int user_count() const noexcept { return static_cast<int>(users_.size()); }
	int rx_antennas() const noexcept { return rx_antennas_; }
	double noise() const noexcept { return noise_; }
	ReceiverModel const& receiver() const noexcept { return receiver_; }
	std::vector<UserSpec> const& users() const noexcept { return users_; }
	UserSpec const& user(int id) const { return users_.at(static_cast<std::size_t>(id - 1)); }
	PowerMode power_mode() const noexcept { return users_.front().power.mode(); }

	Scenario with_noise(double noise) const;
	Scenario with_receiver(ReceiverModel receiver) const;

	/// Stable 64-bit hash of every input field.
	std::uint64_t fingerprint() const;

private:
	std::vector<UserSpec> users_;
	int rx_antennas_;
	double noise_;
	ReceiverModel receiver_;
};

/// K users with unit gain, one antenna each, unit power and a single
/// receive antenna.
Scenario symmetric_scenario(int users, double noise, ReceiverModel receiver,
                            PowerMode mode = PowerMode::sum);

// ---------------------------------------------------------------------------
// Coalitions and partitions

/// Nonempty set of users stored as a bitmask (bit i-1 for user i).
class Coalition
{
public:
	explicit Coalition(std::uint32_t mask);

	static Coalition of(std::initializer_list<int> ids);
	static Coalition of(std::span<int const> ids);
	static Coalition singleton(int id);
	static Coalition all(int users);

	std::uint32_t mask() const noexcept { return mask_; }
	int size() const noexcept;
	bool contains(int id) const noexcept;
	int smallest() const noexcept;
	int largest() const noexcept;
	bool subset_of(Coalition other) const noexcept { return (mask_ & ~other.mask_) == 0; }
	bool disjoint(Coalition other) const noexcept { return (mask_ & other.mask_) == 0; }

	/// Member ids in ascending order.
	std::vector<int> members() const;

	Coalition operator|(Coalition other) const noexcept { return Coalition(mask_ | other.mask_); }

	/// "{1,3}"
	std::string to_string() const;

	friend bool operator==(Coalition, Coalition) = default;
	friend auto operator<=>(Coalition a, Coalition b) { return a.mask_ <=> b.mask_; }

private:
	std::uint32_t mask_;
};

/// A set partition of 1..K. Blocks are kept sorted by smallest member.
class Partition
{
public:
	Partition(int users, std::vector<Coalition> blocks);

	/// Build from a restricted growth string (entry i is the block of user i+1).
	static Partition from_rgs(std::span<std::uint8_t const> rgs);
	static Partition singletons(int users);
	static Partition grand(int users);

	int user_count() const noexcept { return users_; }
	std::size_t size() const noexcept { return blocks_.size(); }
	std::vector<Coalition> const& blocks() const noexcept { return blocks_; }
	Coalition const& block(std::size_t i) const { return blocks_.at(i); }

	/// Index of the block containing user id.
	std::size_t block_of(int id) const;
	std::optional<std::size_t> find(Coalition c) const;

	std::vector<std::uint8_t> rgs() const;

	/// Packed restricted growth string; unique per partition for K <= 12.
	std::uint64_t key() const;

	/// Replace the blocks at the given indices by their union.
	Partition merged(std::span<std::size_t const> indices) const;

	/// "{1,3}{2}{4}"
	std::string to_string() const;

	bool operator==(Partition const&) const = default;

private:
	int users_;
	std::vector<Coalition> blocks_;
};

/// Lazy generator over all partitions of 1..K in lexicographic
/// restricted-growth-string order.
class PartitionGenerator
{
public:
	explicit PartitionGenerator(int users);

	/// Current restricted growth string; valid until the next advance().
	std::span<std::uint8_t const> current() const noexcept { return rgs_; }
	Partition partition() const { return Partition::from_rgs(rgs_); }

	/// Moves to the next partition. Returns false once exhausted.
	bool advance();

private:
	std::vector<std::uint8_t> rgs_;
	std::vector<std::uint8_t> prefix_max_;
};

/// All partitions of 1..K, 1 <= K <= 12, in restricted-growth-string order.
std::vector<Partition> enumerate_partitions(int users);

/// Number of partitions of 1..K counted by the generator.
std::uint64_t count_partitions(int users);

/// Checks that order is a permutation of 1..K.
void validate_base_order(std::span<int const> order, int users);

/// Block decoding order induced by a user-level base order: each block is
/// decoded at the base-order slot of its latest-decoded member. Returns block
/// indices into partition.blocks(), first-decoded first.
std::vector<std::size_t> induced_order_indices(Partition const& partition, std::span<int const> base_order);

std::vector<Coalition> induced_order(Partition const& partition, std::span<int const> base_order);

/// Members' channel matrices stacked horizontally in ascending id order.
Matrix coalition_channel(Scenario const& scenario, Coalition coalition);

/// Members' power budgets joined in ascending id order.
PowerConstraint coalition_power(Scenario const& scenario, Coalition coalition);

/// Total transmit dimension of a coalition.
int coalition_antennas(Scenario const& scenario, Coalition coalition);

} // namespace txcoop

#endif // TXCOOP_GAME_MODEL_HPP
