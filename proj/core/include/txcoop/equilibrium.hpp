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
#ifndef TXCOOP_EQUILIBRIUM_HPP
#define TXCOOP_EQUILIBRIUM_HPP

#include <txcoop/capacity.hpp>
#include <txcoop/game_model.hpp>

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace txcoop {

/// Transmit covariance per block, aligned with Partition::blocks().
struct CovarianceProfile
{
	std::vector<Matrix> blocks;
};

/// Throws InvalidCovariance unless every block is PSD (1e-10) and within its
/// power constraint (+1e-9).
void validate_profile(Scenario const& scenario, Partition const& partition, CovarianceProfile const& profile);

struct SolverOptions
{
	PerAntennaOptions per_antenna{.stationarity_tol = 1e-8,
	                              .max_iterations = 20000,
	                              .projection_tol = 1e-10,
	                              .projection_max_iterations = 100000,
	                              .initial = std::nullopt};
	double sud_tolerance = 1e-9;  ///< max utility change between rounds
	int sud_max_rounds = 10000;
	double sud_damping = 0.5;     ///< weight kept on the previous covariance
	/// Starting profile: per-antenna warm starts for SIC, initial iterate for SUD.
	std::optional<CovarianceProfile> initial;
};

struct Equilibrium
{
	CovarianceProfile profile;
	std::vector<double> utilities;         ///< nats, aligned with blocks
	std::vector<std::size_t> order;        ///< decoding order (SIC), first-decoded first
	int rounds = 0;                        ///< best-response rounds (SUD)
};

/// NE under successive cancellation with the scenario's fixed base order.
Equilibrium ne_sic(Scenario const& scenario, Partition const& partition, SolverOptions const& options = {});

/// NE under successive cancellation for an explicit block order.
Equilibrium ne_sic_ordered(Scenario const& scenario, Partition const& partition,
                           std::span<std::size_t const> order, SolverOptions const& options = {});

/// NE under single-user decoding by damped simultaneous best response.
/// Throws NonConvergence with the last iterate when the round cap is hit.
Equilibrium ne_sud(Scenario const& scenario, Partition const& partition, SolverOptions const& options = {});

/// Exact time-shared utilities: weighted average of ne_sic over all N! block
/// orders. weights override the receiver's (empty = uniform).
std::vector<double> ne_timeshare(Scenario const& scenario, Partition const& partition,
                                 SolverOptions const& options = {}, std::span<double const> weights = {});

/// NE utilities for whichever receiver the scenario carries.
std::vector<double> ne_utilities(Scenario const& scenario, Partition const& partition,
                                 SolverOptions const& options = {});

/// Gradient of block n's utility with respect to its own covariance.
Matrix utility_gradient(Scenario const& scenario, Partition const& partition, CovarianceProfile const& profile,
                        std::size_t block);

struct DscReport
{
	std::vector<double> per_block;  ///< C_n
	double total = 0.0;             ///< C
};

/// C_n = tr[(A_n - B_n)(grad v_n(B) - grad v_n(A))] for SUD and fixed-order SIC.
DscReport dsc_diagnostic(Scenario const& scenario, Partition const& partition, CovarianceProfile const& a,
                         CovarianceProfile const& b);

/// NE utility v(S;T) for every block of every partition of the scenario.
class UtilityTable
{
public:
	UtilityTable(int users, std::uint64_t fingerprint, std::vector<Partition> partitions,
	             std::vector<std::vector<double>> values);

	int user_count() const noexcept { return users_; }
	std::uint64_t fingerprint() const noexcept { return fingerprint_; }
	std::vector<Partition> const& partitions() const noexcept { return partitions_; }
	std::vector<double> const& values(std::size_t index) const { return values_.at(index); }
	std::vector<double> const& values(Partition const& partition) const;
	double value(Partition const& partition, Coalition coalition) const;

	/// Number of (partition, coalition) entries.
	std::size_t entry_count() const noexcept;

private:
	int users_;
	std::uint64_t fingerprint_;
	std::vector<Partition> partitions_;
	std::vector<std::vector<double>> values_;
	std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Tabulates every partition. threads = 0 picks hardware concurrency. Errors
/// are rethrown with the offending partition in the message.
UtilityTable utility_table(Scenario const& scenario, SolverOptions const& options = {}, unsigned threads = 0);

/// Memoizing NE-utility oracle over partitions of one scenario.
class GameValues
{
public:
	explicit GameValues(Scenario scenario, SolverOptions options = {});
	explicit GameValues(Scenario scenario, UtilityTable const& table);

	Scenario const& scenario() const noexcept { return scenario_; }
	SolverOptions const& options() const noexcept { return options_; }

	std::vector<double> const& utilities(Partition const& partition);
	double value(Partition const& partition, Coalition coalition);

	/// v(K; {K})
	double grand_value();

	std::size_t evaluated() const;

private:
	Scenario scenario_;
	SolverOptions options_;
	mutable std::mutex mutex_;
	std::unordered_map<std::uint64_t, std::vector<double>> cache_;
};

} // namespace txcoop

#endif // TXCOOP_EQUILIBRIUM_HPP
