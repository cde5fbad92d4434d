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
#include <txcoop/simplex.hpp>

#include "simplex_impl.hpp"

namespace txcoop {

std::string_view lp_status_name(LpStatus status)
{
	switch (status)
	{
	case LpStatus::optimal:
		return "optimal";
	case LpStatus::infeasible:
		return "infeasible";
	case LpStatus::unbounded:
		return "unbounded";
	case LpStatus::iteration_limit:
		return "iteration_limit";
	}
	return "unknown";
}

LpSolution solve_lp(LinearProgram const& lp, SimplexOptions const& options)
{
	detail::SimplexTolerances<double> tol;
	tol.pivot = options.pivot_tolerance;
	tol.feasibility = options.feasibility_tolerance;
	tol.max_iterations = options.max_iterations;
	return detail::simplex(lp, tol);
}

} // namespace txcoop
