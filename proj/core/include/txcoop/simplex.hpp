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
#ifndef TXCOOP_SIMPLEX_HPP
#define TXCOOP_SIMPLEX_HPP

#include <cstddef>
#include <string_view>
#include <vector>

namespace txcoop {

enum class RowSense
{
	less_equal,
	equal,
	greater_equal
};

enum class LpStatus
{
	optimal,
	infeasible,
	unbounded,
	iteration_limit
};

std::string_view lp_status_name(LpStatus status);

/// maximize c'x subject to rows (a_i' x  sense_i  b_i); x >= 0 unless marked free.
template <class T>
struct BasicLinearProgram
{
	std::size_t variables = 0;
	std::vector<std::vector<T>> rows;
	std::vector<RowSense> sense;
	std::vector<T> rhs;
	std::vector<T> objective;
	std::vector<bool> free_variable;  ///< empty = all nonnegative
};

template <class T>
struct BasicLpSolution
{
	LpStatus status = LpStatus::iteration_limit;
	std::vector<T> x;
	T value{};
	/// Row multipliers y with value = b'y at optimum: y >= 0 on <= rows,
	/// y <= 0 on >= rows, free on equalities.
	std::vector<T> duals;
	int iterations = 0;
};

using LinearProgram = BasicLinearProgram<double>;
using LpSolution = BasicLpSolution<double>;

struct SimplexOptions
{
	double pivot_tolerance = 1e-11;
	double feasibility_tolerance = 1e-9;
	int max_iterations = 200000;
};

/// Dense two-phase primal simplex with Bland's rule (no cycling).
LpSolution solve_lp(LinearProgram const& lp, SimplexOptions const& options = {});

} // namespace txcoop

#endif // TXCOOP_SIMPLEX_HPP
