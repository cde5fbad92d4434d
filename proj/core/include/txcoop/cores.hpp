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
#ifndef TXCOOP_CORES_HPP
#define TXCOOP_CORES_HPP

#include <txcoop/equilibrium.hpp>
#include <txcoop/game_model.hpp>

#include <array>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace txcoop {

/// What a deviating coalition assumes the outsiders will do.
enum class ExpectationModel
{
	rational,   ///< outsiders form the partition maximizing their own sum
	merging,    ///< outsiders merge into one block
	cautious,   ///< worst case for the deviator
	singleton   ///< outsiders stay alone
};

std::string_view model_name(ExpectationModel model);

/// Accepts "rational", "merging", "cautious", "singleton" (or r/m/c/s).
std::optional<ExpectationModel> parse_model(std::string_view text);

enum class Verdict
{
	nonempty,
	empty
};

std::string_view verdict_name(Verdict verdict);

/// Characteristic-form view of the partition form game under one
/// expectation model: a demand per proper coalition and the grand value.
class CoalitionalGame
{
public:
	/// demands is indexed by coalition mask (size 2^K); entries 0 and 2^K-1
	/// are ignored.
	CoalitionalGame(int users, std::vector<double> demands, double grand_value);

	int user_count() const noexcept { return users_; }
	double grand_value() const noexcept { return grand_; }
	double demand(Coalition coalition) const;
	std::vector<double> const& demands() const noexcept { return demands_; }

	/// Proper nonempty coalitions in ascending mask order.
	std::vector<Coalition> proper_coalitions() const;

	CoalitionalGame with_grand_value(double grand_value) const;

private:
	int users_;
	std::vector<double> demands_;
	double grand_;
};

struct BalancedCertificate
{
	std::vector<std::pair<Coalition, double>> weights;  ///< lambda_S > 0 only
	double margin = 0.0;                                ///< sum lambda_S v_S - v(K)
};

struct CoreResult
{
	Verdict verdict = Verdict::empty;
	std::vector<double> allocation;                  ///< nonempty only
	std::optional<BalancedCertificate> certificate;  ///< empty only
	double slack = 0.0;                              ///< min over S of x(S) - v_S
};

struct LeastCoreResult
{
	double epsilon_star = 0.0;
	std::vector<double> allocation;
};

struct CoreOptions
{
	double lp_tolerance = 1e-9;
	/// Enable the exact rational cross-check (used for K <= 5 only).
	bool exact_check = true;
	/// Optional permutation of proper_coalitions() giving the order in which
	/// constraints are handed to the LP.
	std::vector<std::size_t> constraint_order;
};

/// Partitions of 1..K that contain coalition as a block, in
/// restricted-growth-string order of the outsiders.
std::vector<Partition> partitions_containing(Coalition coalition, int users);

/// Demand v_S of a proper coalition under the given expectation.
double coalition_demand(GameValues& values, Coalition coalition, ExpectationModel model);

/// Demands of every proper coalition plus v(K;{K}).
CoalitionalGame demand_game(GameValues& values, ExpectationModel model);

CoreResult check_core(CoalitionalGame const& game, CoreOptions const& options = {});
CoreResult check_core(Scenario const& scenario, ExpectationModel model, SolverOptions const& solver = {},
                      CoreOptions const& options = {});

LeastCoreResult least_core(CoalitionalGame const& game, CoreOptions const& options = {});
LeastCoreResult least_core(Scenario const& scenario, ExpectationModel model, SolverOptions const& solver = {},
                           CoreOptions const& options = {});

/// Bondareva-Shapley weights proving emptiness; nullopt when the core is nonempty.
std::optional<BalancedCertificate> balancedness_certificate(CoalitionalGame const& game,
                                                            CoreOptions const& options = {});
std::optional<BalancedCertificate> balancedness_certificate(Scenario const& scenario, ExpectationModel model,
                                                            SolverOptions const& solver = {},
                                                            CoreOptions const& options = {});

/// True when the weights are balanced within tol and the margin recomputed
/// from the game exceeds tol. Fills margin with the recomputed value.
bool validate_certificate(CoalitionalGame const& game, BalancedCertificate& certificate, double tol = 1e-9);

using Allocation3 = std::array<double, 3>;

/// Vertices of the core polygon of a 3-player game on the plane sum(x) = v(K),
/// counterclockwise in the (x1, x2) projection. Empty when the core is empty.
std::vector<Allocation3> core_region_3user(CoalitionalGame const& game, double tol = 1e-9);

} // namespace txcoop

#endif // TXCOOP_CORES_HPP
