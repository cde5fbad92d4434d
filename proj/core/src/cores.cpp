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
#include <txcoop/simplex.hpp>

#include "simplex_impl.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace txcoop {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Outsiders whose arrangements are enumerated; B_8 = 4140 partitions.
constexpr int max_enumerated_outsiders = 8;
constexpr int max_core_users = 10;
constexpr int max_exact_users = 5;

// External sums closer than this are treated as tied.
constexpr double tie_tolerance = 1e-9;

std::uint32_t full_mask(int users) { return (users == 32) ? ~0u : ((1u << users) - 1u); }

void require_proper(Coalition coalition, int users)
{
	std::uint32_t const all = full_mask(users);
	if ((coalition.mask() & ~all) != 0 || coalition.mask() == all)
	{
		throw InvalidArgument(coalition.to_string() + " is not a proper coalition of " + std::to_string(users)
		                      + " users");
	}
}

/// Coalitions in the order the LP receives them.
std::vector<Coalition> ordered_coalitions(CoalitionalGame const& game, CoreOptions const& options)
{
	std::vector<Coalition> all = game.proper_coalitions();
	if (options.constraint_order.empty())
	{
		return all;
	}
	if (options.constraint_order.size() != all.size())
	{
		throw InvalidArgument("constraint_order must permute all " + std::to_string(all.size()) + " coalitions");
	}
	std::vector<bool> seen(all.size(), false);
	std::vector<Coalition> out;
	out.reserve(all.size());
	for (std::size_t i : options.constraint_order)
	{
		if (i >= all.size() || seen[i])
		{
			throw InvalidArgument("constraint_order is not a permutation");
		}
		seen[i] = true;
		out.push_back(all[i]);
	}
	return out;
}

/// Dual of the least-core LP:
///   max sum_S lambda_S v_S - mu v(K)
///   s.t. sum_{S contains i} lambda_S - mu = 0 for each i,  sum_S lambda_S = 1.
/// Its optimum is epsilon*, and the row multipliers are an optimal allocation
/// (first K) and epsilon* (last).
template <class T>
BasicLinearProgram<T> least_core_dual(int users, std::vector<Coalition> const& coalitions, std::vector<T> const& v,
                                      T const& grand)
{
	std::size_t const n = coalitions.size();
	BasicLinearProgram<T> lp;
	lp.variables = n + 1;
	lp.free_variable.assign(n + 1, false);
	lp.free_variable[n] = true;
	lp.rows.assign(static_cast<std::size_t>(users) + 1, std::vector<T>(n + 1, T(0)));
	for (std::size_t s = 0; s < n; ++s)
	{
		for (int i = 0; i < users; ++i)
		{
			if (coalitions[s].contains(i + 1))
			{
				lp.rows[static_cast<std::size_t>(i)][s] = T(1);
			}
		}
		lp.rows[static_cast<std::size_t>(users)][s] = T(1);
	}
	for (int i = 0; i < users; ++i)
	{
		lp.rows[static_cast<std::size_t>(i)][n] = T(-1);
	}
	lp.sense.assign(lp.rows.size(), RowSense::equal);
	lp.rhs.assign(lp.rows.size(), T(0));
	lp.rhs.back() = T(1);
	lp.objective = v;
	lp.objective.push_back(-grand);
	return lp;
}

struct LeastCoreSolve
{
	double epsilon;
	std::vector<double> allocation;
};

double min_slack(CoalitionalGame const& game, std::vector<double> const& x)
{
	double slack = std::numeric_limits<double>::infinity();
	for (Coalition c : game.proper_coalitions())
	{
		double sum = 0.0;
		for (int id : c.members())
		{
			sum += x[static_cast<std::size_t>(id - 1)];
		}
		slack = std::min(slack, sum - game.demand(c));
	}
	return slack;
}

bool allocation_ok(CoalitionalGame const& game, std::vector<double> const& x, double epsilon, double tol)
{
	double const total = std::accumulate(x.begin(), x.end(), 0.0);
	return std::abs(total - game.grand_value()) <= tol && min_slack(game, x) >= -epsilon - tol;
}

LeastCoreSolve solve_primal(CoalitionalGame const& game, std::vector<Coalition> const& coalitions)
{
	// max t  s.t. x(S) - t >= v_S,  sum x = v(K);  x, t free.
	int const k = game.user_count();
	LinearProgram lp;
	lp.variables = static_cast<std::size_t>(k) + 1;
	lp.free_variable.assign(lp.variables, true);
	for (Coalition c : coalitions)
	{
		std::vector<double> row(lp.variables, 0.0);
		for (int id : c.members())
		{
			row[static_cast<std::size_t>(id - 1)] = 1.0;
		}
		row.back() = -1.0;
		lp.rows.push_back(std::move(row));
		lp.sense.push_back(RowSense::greater_equal);
		lp.rhs.push_back(game.demand(c));
	}
	std::vector<double> eff(lp.variables, 1.0);
	eff.back() = 0.0;
	lp.rows.push_back(std::move(eff));
	lp.sense.push_back(RowSense::equal);
	lp.rhs.push_back(game.grand_value());
	lp.objective.assign(lp.variables, 0.0);
	lp.objective.back() = 1.0;
	LpSolution const sol = solve_lp(lp);
	if (sol.status != LpStatus::optimal)
	{
		throw NumericalFailure("least-core primal LP ended with status " + std::string(lp_status_name(sol.status)));
	}
	return {-sol.value, std::vector<double>(sol.x.begin(), sol.x.end() - 1)};
}

LeastCoreSolve solve_least_core(CoalitionalGame const& game, CoreOptions const& options)
{
	int const k = game.user_count();
	if (k < 2)
	{
		throw InvalidArgument("least core needs at least 2 players");
	}
	if (k > max_core_users)
	{
		throw InvalidArgument("core LPs are limited to K <= " + std::to_string(max_core_users));
	}
	std::vector<Coalition> const coalitions = ordered_coalitions(game, options);
	std::vector<double> v;
	v.reserve(coalitions.size());
	for (Coalition c : coalitions)
	{
		v.push_back(game.demand(c));
	}

	LpSolution const sol = solve_lp(least_core_dual(k, coalitions, v, game.grand_value()));
	LeastCoreSolve out{0.0, {}};
	bool ok = false;
	if (sol.status == LpStatus::optimal)
	{
		out.epsilon = sol.value;
		out.allocation.assign(sol.duals.begin(), sol.duals.begin() + k);
		ok = allocation_ok(game, out.allocation, out.epsilon, options.lp_tolerance);
	}
	if (!ok)
	{
		// Multipliers drifted (or the dual solve stalled): solve the primal.
		out = solve_primal(game, coalitions);
		if (!allocation_ok(game, out.allocation, out.epsilon, options.lp_tolerance))
		{
			throw NumericalFailure("least-core allocation violates its own constraints by "
			                       + std::to_string(-out.epsilon - min_slack(game, out.allocation)));
		}
	}

	if (options.exact_check && k <= max_exact_users)
	{
		auto to_grid = [](double x) {
			return Rational(static_cast<long long>(std::llround(x * 1e12))) / Rational(1000000000000LL);
		};
		std::vector<Rational> vq;
		for (double d : v)
		{
			vq.push_back(to_grid(d));
		}
		auto const exact =
		    detail::simplex(least_core_dual(k, coalitions, vq, to_grid(game.grand_value())), detail::SimplexTolerances<Rational>{});
		if (exact.status != LpStatus::optimal)
		{
			throw NumericalFailure("exact least-core LP ended with status " + std::string(lp_status_name(exact.status)));
		}
		double const eps_exact = exact.value.convert_to<double>();
		if (std::abs(eps_exact - out.epsilon) > options.lp_tolerance)
		{
			throw NumericalFailure("floating-point least core " + std::to_string(out.epsilon)
			                       + " disagrees with exact value " + std::to_string(eps_exact));
		}
	}
	return out;
}

} // namespace

std::string_view model_name(ExpectationModel model)
{
	switch (model)
	{
	case ExpectationModel::rational:
		return "rational";
	case ExpectationModel::merging:
		return "merging";
	case ExpectationModel::cautious:
		return "cautious";
	case ExpectationModel::singleton:
		return "singleton";
	}
	return "unknown";
}

std::optional<ExpectationModel> parse_model(std::string_view text)
{
	for (auto m : {ExpectationModel::rational, ExpectationModel::merging, ExpectationModel::cautious,
	               ExpectationModel::singleton})
	{
		if (text == model_name(m) || (text.size() == 1 && text[0] == model_name(m)[0]))
		{
			return m;
		}
	}
	return std::nullopt;
}

std::string_view verdict_name(Verdict verdict) { return verdict == Verdict::nonempty ? "nonempty" : "empty"; }

// ---------------------------------------------------------------------------

CoalitionalGame::CoalitionalGame(int users, std::vector<double> demands, double grand_value)
: users_(users), demands_(std::move(demands)), grand_(grand_value)
{
	if (users < 1 || users > max_users)
	{
		throw InvalidArgument("coalitional game needs 1.." + std::to_string(max_users) + " players");
	}
	if (demands_.size() != (std::size_t{1} << users))
	{
		throw InvalidArgument("demand table must have 2^K entries");
	}
	for (std::size_t m = 1; m + 1 < demands_.size(); ++m)
	{
		if (!std::isfinite(demands_[m]))
		{
			throw InvalidArgument("demand of " + Coalition(static_cast<std::uint32_t>(m)).to_string()
			                      + " is not finite");
		}
	}
	if (!std::isfinite(grand_))
	{
		throw InvalidArgument("grand-coalition value is not finite");
	}
}

double CoalitionalGame::demand(Coalition coalition) const
{
	require_proper(coalition, users_);
	return demands_[coalition.mask()];
}

std::vector<Coalition> CoalitionalGame::proper_coalitions() const
{
	std::vector<Coalition> out;
	for (std::uint32_t m = 1; m < full_mask(users_); ++m)
	{
		out.emplace_back(m);
	}
	return out;
}

CoalitionalGame CoalitionalGame::with_grand_value(double grand_value) const
{
	return CoalitionalGame(users_, demands_, grand_value);
}

// ---------------------------------------------------------------------------

std::vector<Partition> partitions_containing(Coalition coalition, int users)
{
	require_proper(coalition, users);
	std::vector<int> outsiders;
	for (int id = 1; id <= users; ++id)
	{
		if (!coalition.contains(id))
		{
			outsiders.push_back(id);
		}
	}
	std::vector<Partition> out;
	PartitionGenerator gen(static_cast<int>(outsiders.size()));
	do
	{
		auto const rgs = gen.current();
		std::uint8_t const blocks = static_cast<std::uint8_t>(*std::ranges::max_element(rgs) + 1);
		std::vector<std::uint32_t> masks(blocks, 0);
		for (std::size_t i = 0; i < rgs.size(); ++i)
		{
			masks[rgs[i]] |= 1u << (outsiders[i] - 1);
		}
		std::vector<Coalition> parts{coalition};
		for (std::uint32_t m : masks)
		{
			parts.emplace_back(m);
		}
		out.emplace_back(users, std::move(parts));
	} while (gen.advance());
	return out;
}

double coalition_demand(GameValues& values, Coalition coalition, ExpectationModel model)
{
	int const k = values.scenario().user_count();
	require_proper(coalition, k);
	std::uint32_t const rest = full_mask(k) & ~coalition.mask();

	switch (model)
	{
	case ExpectationModel::merging:
		return values.value(Partition(k, {coalition, Coalition(rest)}), coalition);
	case ExpectationModel::singleton: {
		std::vector<Coalition> parts{coalition};
		for (int id = 1; id <= k; ++id)
		{
			if ((rest >> (id - 1)) & 1u)
			{
				parts.push_back(Coalition::singleton(id));
			}
		}
		return values.value(Partition(k, std::move(parts)), coalition);
	}
	case ExpectationModel::rational:
	case ExpectationModel::cautious:
		break;
	}

	if (k - coalition.size() > max_enumerated_outsiders)
	{
		throw InvalidArgument("demand of " + coalition.to_string() + " would enumerate more than "
		                      + std::to_string(max_enumerated_outsiders) + " outsiders");
	}
	double best_external = -std::numeric_limits<double>::infinity();
	double chosen = 0.0;
	double worst = std::numeric_limits<double>::infinity();
	for (Partition const& t : partitions_containing(coalition, k))
	{
		std::vector<double> const& u = values.utilities(t);
		std::size_t const own = *t.find(coalition);
		double external = 0.0;
		for (std::size_t b = 0; b < u.size(); ++b)
		{
			if (b != own)
			{
				external += u[b];
			}
		}
		worst = std::min(worst, u[own]);
		if (external > best_external + tie_tolerance)
		{
			best_external = external;
			chosen = u[own];
		}
		else if (external >= best_external - tie_tolerance)
		{
			best_external = std::max(best_external, external);
			chosen = std::min(chosen, u[own]);
		}
	}
	return model == ExpectationModel::cautious ? worst : chosen;
}

CoalitionalGame demand_game(GameValues& values, ExpectationModel model)
{
	int const k = values.scenario().user_count();
	std::vector<double> demands(std::size_t{1} << k, 0.0);
	for (std::uint32_t m = 1; m < full_mask(k); ++m)
	{
		demands[m] = coalition_demand(values, Coalition(m), model);
	}
	return CoalitionalGame(k, std::move(demands), values.grand_value());
}

// ---------------------------------------------------------------------------

LeastCoreResult least_core(CoalitionalGame const& game, CoreOptions const& options)
{
	LeastCoreSolve s = solve_least_core(game, options);
	return {s.epsilon, std::move(s.allocation)};
}

std::optional<BalancedCertificate> balancedness_certificate(CoalitionalGame const& game, CoreOptions const& options)
{
	int const k = game.user_count();
	if (k < 2)
	{
		return std::nullopt;
	}
	if (k > max_core_users)
	{
		throw InvalidArgument("core LPs are limited to K <= " + std::to_string(max_core_users));
	}
	std::vector<Coalition> const coalitions = ordered_coalitions(game, options);
	LinearProgram lp;
	lp.variables = coalitions.size();
	lp.rows.assign(static_cast<std::size_t>(k), std::vector<double>(coalitions.size(), 0.0));
	for (std::size_t s = 0; s < coalitions.size(); ++s)
	{
		for (int id : coalitions[s].members())
		{
			lp.rows[static_cast<std::size_t>(id - 1)][s] = 1.0;
		}
		lp.objective.push_back(game.demand(coalitions[s]));
	}
	lp.sense.assign(lp.rows.size(), RowSense::equal);
	lp.rhs.assign(lp.rows.size(), 1.0);
	LpSolution const sol = solve_lp(lp);
	if (sol.status != LpStatus::optimal)
	{
		throw NumericalFailure("balancedness LP ended with status " + std::string(lp_status_name(sol.status)));
	}
	if (sol.value - game.grand_value() <= options.lp_tolerance)
	{
		return std::nullopt;
	}
	BalancedCertificate cert;
	for (std::size_t s = 0; s < coalitions.size(); ++s)
	{
		if (sol.x[s] > 0.0)
		{
			cert.weights.emplace_back(coalitions[s], std::min(sol.x[s], 1.0));
		}
	}
	std::ranges::sort(cert.weights, {}, [](auto const& w) { return w.first; });
	if (!validate_certificate(game, cert, options.lp_tolerance))
	{
		throw NumericalFailure("balancedness certificate failed validation (margin "
		                       + std::to_string(cert.margin) + ")");
	}
	return cert;
}

bool validate_certificate(CoalitionalGame const& game, BalancedCertificate& certificate, double tol)
{
	int const k = game.user_count();
	std::vector<double> cover(static_cast<std::size_t>(k), 0.0);
	double total = 0.0;
	for (auto const& [c, w] : certificate.weights)
	{
		if (!(w >= 0.0 && w <= 1.0))
		{
			return false;
		}
		for (int id : c.members())
		{
			cover[static_cast<std::size_t>(id - 1)] += w;
		}
		total += w * game.demand(c);
	}
	certificate.margin = total - game.grand_value();
	bool const balanced = std::ranges::all_of(cover, [tol](double s) { return std::abs(s - 1.0) <= tol; });
	return balanced && certificate.margin > tol;
}

CoreResult check_core(CoalitionalGame const& game, CoreOptions const& options)
{
	CoreResult result;
	if (game.user_count() == 1)
	{
		result.verdict = Verdict::nonempty;
		result.allocation = {game.grand_value()};
		return result;
	}
	LeastCoreSolve lc = solve_least_core(game, options);
	if (lc.epsilon <= options.lp_tolerance)
	{
		result.verdict = Verdict::nonempty;
		result.slack = min_slack(game, lc.allocation);
		result.allocation = std::move(lc.allocation);
		return result;
	}
	result.certificate = balancedness_certificate(game, options);
	if (!result.certificate)
	{
		throw NumericalFailure("least core is positive (" + std::to_string(lc.epsilon)
		                       + ") but no balanced collection violates the grand value");
	}
	result.verdict = Verdict::empty;
	result.slack = -lc.epsilon;
	return result;
}

namespace {

CoalitionalGame scenario_game(Scenario const& scenario, ExpectationModel model, SolverOptions const& solver)
{
	if (scenario.user_count() > max_core_users)
	{
		throw InvalidArgument("core LPs are limited to K <= " + std::to_string(max_core_users));
	}
	GameValues values(scenario, solver);
	return demand_game(values, model);
}

} // namespace

CoreResult check_core(Scenario const& scenario, ExpectationModel model, SolverOptions const& solver,
                      CoreOptions const& options)
{
	return check_core(scenario_game(scenario, model, solver), options);
}

LeastCoreResult least_core(Scenario const& scenario, ExpectationModel model, SolverOptions const& solver,
                           CoreOptions const& options)
{
	return least_core(scenario_game(scenario, model, solver), options);
}

std::optional<BalancedCertificate> balancedness_certificate(Scenario const& scenario, ExpectationModel model,
                                                            SolverOptions const& solver, CoreOptions const& options)
{
	return balancedness_certificate(scenario_game(scenario, model, solver), options);
}

// ---------------------------------------------------------------------------

std::vector<Allocation3> core_region_3user(CoalitionalGame const& game, double tol)
{
	if (game.user_count() != 3)
	{
		throw InvalidArgument("core region is only drawn for 3 players");
	}
	double const g = game.grand_value();
	auto v = [&](std::initializer_list<int> ids) { return game.demand(Coalition::of(ids)); };

	// Half-planes a . (x1, x2) >= b with x3 = v(K) - x1 - x2.
	struct HalfPlane
	{
		double a1, a2, b;
	};
	std::array<HalfPlane, 6> const h{{
	    {1.0, 0.0, v({1})},
	    {0.0, 1.0, v({2})},
	    {-1.0, -1.0, v({3}) - g},
	    {1.0, 1.0, v({1, 2})},
	    {0.0, -1.0, v({1, 3}) - g},
	    {-1.0, 0.0, v({2, 3}) - g},
	}};

	std::vector<std::array<double, 2>> pts;
	for (std::size_t i = 0; i < h.size(); ++i)
	{
		for (std::size_t j = i + 1; j < h.size(); ++j)
		{
			double const det = h[i].a1 * h[j].a2 - h[i].a2 * h[j].a1;
			if (std::abs(det) < 1e-12)
			{
				continue;
			}
			double const x1 = (h[i].b * h[j].a2 - h[i].a2 * h[j].b) / det;
			double const x2 = (h[i].a1 * h[j].b - h[i].b * h[j].a1) / det;
			bool const inside = std::ranges::all_of(h, [&](HalfPlane const& p) {
				return p.a1 * x1 + p.a2 * x2 >= p.b - tol;
			});
			if (!inside)
			{
				continue;
			}
			bool const dup = std::ranges::any_of(pts, [&](auto const& q) {
				return std::abs(q[0] - x1) <= tol && std::abs(q[1] - x2) <= tol;
			});
			if (!dup)
			{
				pts.push_back({x1, x2});
			}
		}
	}
	if (pts.size() > 2)
	{
		double cx = 0.0;
		double cy = 0.0;
		for (auto const& p : pts)
		{
			cx += p[0];
			cy += p[1];
		}
		cx /= static_cast<double>(pts.size());
		cy /= static_cast<double>(pts.size());
		std::ranges::sort(pts, {}, [&](auto const& p) { return std::atan2(p[1] - cy, p[0] - cx); });
	}
	std::vector<Allocation3> out;
	for (auto const& p : pts)
	{
		out.push_back({p[0], p[1], g - p[0] - p[1]});
	}
	return out;
}

} // namespace txcoop
