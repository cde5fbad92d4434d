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
#ifndef TXCOOP_SIMPLEX_IMPL_HPP
#define TXCOOP_SIMPLEX_IMPL_HPP

// Tableau simplex shared by the floating-point solver and the exact
// rational cross-check. T needs field arithmetic and ordering only.

#include <txcoop/errors.hpp>
#include <txcoop/simplex.hpp>

#include <cstddef>
#include <limits>
#include <vector>

namespace txcoop::detail {

template <class T>
struct SimplexTolerances
{
	T pivot{};        ///< entries with |a| <= pivot are treated as zero
	T feasibility{};  ///< phase-one residual accepted as feasible
	int max_iterations = 200000;
};

template <class T>
class Tableau
{
public:
	Tableau(BasicLinearProgram<T> const& lp, SimplexTolerances<T> const& tol) : lp_(lp), tol_(tol) { build(); }

	BasicLpSolution<T> solve()
	{
		BasicLpSolution<T> out;
		// Phase one: drive the artificial variables to zero.
		std::vector<T> phase1(cols_, T(0));
		for (std::size_t j = artificial_begin_; j < cols_; ++j)
		{
			phase1[j] = T(-1);
		}
		set_costs(phase1);
		LpStatus status = iterate(out.iterations);
		if (status == LpStatus::iteration_limit)
		{
			out.status = status;
			return out;
		}
		if (-cost_[cols_] < -tol_.feasibility)
		{
			out.status = LpStatus::infeasible;
			return out;
		}
		expel_artificials();

		std::vector<T> phase2(cols_, T(0));
		for (std::size_t v = 0; v < lp_.variables; ++v)
		{
			phase2[pos_[v]] = lp_.objective[v];
			if (neg_[v] != npos)
			{
				phase2[neg_[v]] = -lp_.objective[v];
			}
		}
		set_costs(phase2);
		status = iterate(out.iterations);
		out.status = status;
		if (status != LpStatus::optimal)
		{
			return out;
		}

		std::vector<T> xs(cols_, T(0));
		for (std::size_t i = 0; i < rows_; ++i)
		{
			xs[basis_[i]] = at(i, cols_);
		}
		out.x.assign(lp_.variables, T(0));
		for (std::size_t v = 0; v < lp_.variables; ++v)
		{
			out.x[v] = xs[pos_[v]];
			if (neg_[v] != npos)
			{
				out.x[v] -= xs[neg_[v]];
			}
		}
		out.value = -cost_[cols_];
		out.duals.resize(rows_);
		for (std::size_t i = 0; i < rows_; ++i)
		{
			// The starting basic column of row i is B^-1 e_i now; its reduced
			// cost is 0 - y_i.
			T const y = -cost_[initial_column_[i]];
			out.duals[i] = flipped_[i] ? T(-y) : y;
		}
		return out;
	}

private:
	static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

	T& at(std::size_t i, std::size_t j) { return cells_[i * (cols_ + 1) + j]; }

	static T magnitude(T const& v) { return v < T(0) ? T(-v) : v; }

	void build()
	{
		std::size_t const m = lp_.rows.size();
		if (lp_.sense.size() != m || lp_.rhs.size() != m || lp_.objective.size() != lp_.variables
		    || (!lp_.free_variable.empty() && lp_.free_variable.size() != lp_.variables))
		{
			throw InvalidArgument("linear program dimensions are inconsistent");
		}
		rows_ = m;
		std::size_t col = 0;
		pos_.resize(lp_.variables);
		neg_.assign(lp_.variables, npos);
		for (std::size_t v = 0; v < lp_.variables; ++v)
		{
			pos_[v] = col++;
			if (!lp_.free_variable.empty() && lp_.free_variable[v])
			{
				neg_[v] = col++;
			}
		}
		flipped_.resize(m);
		std::vector<RowSense> sense(m);
		std::size_t slacks = 0;
		std::size_t artificials = 0;
		for (std::size_t i = 0; i < m; ++i)
		{
			if (lp_.rows[i].size() != lp_.variables)
			{
				throw InvalidArgument("linear program row has the wrong length");
			}
			flipped_[i] = lp_.rhs[i] < T(0);
			sense[i] = lp_.sense[i];
			if (flipped_[i] && sense[i] != RowSense::equal)
			{
				sense[i] = sense[i] == RowSense::less_equal ? RowSense::greater_equal : RowSense::less_equal;
			}
			slacks += sense[i] != RowSense::equal ? 1 : 0;
			artificials += sense[i] != RowSense::less_equal ? 1 : 0;
		}
		std::size_t slack_col = col;
		artificial_begin_ = col + slacks;
		cols_ = artificial_begin_ + artificials;
		cells_.assign(rows_ * (cols_ + 1), T(0));
		basis_.resize(m);
		initial_column_.resize(m);
		std::size_t art_col = artificial_begin_;
		for (std::size_t i = 0; i < m; ++i)
		{
			T const s = flipped_[i] ? T(-1) : T(1);
			for (std::size_t v = 0; v < lp_.variables; ++v)
			{
				T const a = s * lp_.rows[i][v];
				at(i, pos_[v]) = a;
				if (neg_[v] != npos)
				{
					at(i, neg_[v]) = -a;
				}
			}
			at(i, cols_) = s * lp_.rhs[i];
			switch (sense[i])
			{
			case RowSense::less_equal:
				at(i, slack_col) = T(1);
				basis_[i] = initial_column_[i] = slack_col++;
				break;
			case RowSense::greater_equal:
				at(i, slack_col++) = T(-1);
				[[fallthrough]];
			case RowSense::equal:
				at(i, art_col) = T(1);
				basis_[i] = initial_column_[i] = art_col++;
				break;
			}
		}
	}

	void set_costs(std::vector<T> const& c)
	{
		cost_.assign(cols_ + 1, T(0));
		for (std::size_t j = 0; j < cols_; ++j)
		{
			cost_[j] = c[j];
		}
		for (std::size_t i = 0; i < rows_; ++i)
		{
			T const cb = c[basis_[i]];
			if (cb == T(0))
			{
				continue;
			}
			for (std::size_t j = 0; j <= cols_; ++j)
			{
				cost_[j] -= cb * at(i, j);
			}
		}
	}

	void pivot(std::size_t r, std::size_t c)
	{
		T const p = at(r, c);
		for (std::size_t j = 0; j <= cols_; ++j)
		{
			at(r, j) /= p;
		}
		at(r, c) = T(1);
		for (std::size_t i = 0; i < rows_; ++i)
		{
			if (i == r)
			{
				continue;
			}
			T const f = at(i, c);
			if (f == T(0))
			{
				continue;
			}
			for (std::size_t j = 0; j <= cols_; ++j)
			{
				at(i, j) -= f * at(r, j);
			}
			at(i, c) = T(0);
		}
		T const f = cost_[c];
		for (std::size_t j = 0; j <= cols_; ++j)
		{
			cost_[j] -= f * at(r, j);
		}
		cost_[c] = T(0);
		basis_[r] = c;
	}

	LpStatus iterate(int& iterations)
	{
		while (true)
		{
			std::size_t enter = npos;
			for (std::size_t j = 0; j < entering_limit_(); ++j)
			{
				if (cost_[j] > tol_.pivot)
				{
					enter = j;
					break;
				}
			}
			if (enter == npos)
			{
				return LpStatus::optimal;
			}
			if (iterations >= tol_.max_iterations)
			{
				return LpStatus::iteration_limit;
			}
			std::size_t leave = npos;
			T best{};
			for (std::size_t i = 0; i < rows_; ++i)
			{
				T const a = at(i, enter);
				if (!(a > tol_.pivot))
				{
					continue;
				}
				T const ratio = at(i, cols_) / a;
				if (leave == npos || ratio < best - tol_.pivot
				    || (magnitude(ratio - best) <= tol_.pivot && basis_[i] < basis_[leave]))
				{
					leave = i;
					best = ratio;
				}
			}
			if (leave == npos)
			{
				return LpStatus::unbounded;
			}
			pivot(leave, enter);
			++iterations;
		}
	}

	std::size_t entering_limit_() const { return phase_two_ ? artificial_begin_ : cols_; }

	void expel_artificials()
	{
		phase_two_ = true;
		for (std::size_t i = 0; i < rows_; ++i)
		{
			if (basis_[i] < artificial_begin_)
			{
				continue;
			}
			std::size_t best = npos;
			for (std::size_t j = 0; j < artificial_begin_; ++j)
			{
				if (magnitude(at(i, j)) > tol_.pivot && (best == npos || magnitude(at(i, j)) > magnitude(at(i, best))))
				{
					best = j;
				}
			}
			// A row without such an entry is redundant; its artificial stays
			// basic at zero and can never re-enter.
			if (best != npos)
			{
				pivot(i, best);
			}
		}
	}

	BasicLinearProgram<T> const& lp_;
	SimplexTolerances<T> tol_;
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::size_t artificial_begin_ = 0;
	bool phase_two_ = false;
	std::vector<T> cells_;
	std::vector<T> cost_;
	std::vector<std::size_t> basis_;
	std::vector<std::size_t> initial_column_;
	std::vector<std::size_t> pos_;
	std::vector<std::size_t> neg_;
	std::vector<bool> flipped_;
};

template <class T>
BasicLpSolution<T> simplex(BasicLinearProgram<T> const& lp, SimplexTolerances<T> const& tol)
{
	return Tableau<T>(lp, tol).solve();
}

} // namespace txcoop::detail

#endif // TXCOOP_SIMPLEX_IMPL_HPP
