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
#ifndef TXCOOP_ERRORS_HPP
#define TXCOOP_ERRORS_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace txcoop {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied data failed.
class InvalidArgument : public Error
{
public:
	using Error::Error;
};

/// A covariance matrix is not PSD or violates its power constraint.
class InvalidCovariance : public Error
{
public:
	using Error::Error;
};

/// Ill-conditioned input or a failed linear-algebra / LP step.
class NumericalFailure : public Error
{
public:
	using Error::Error;
};

/// An iterative solver hit its iteration cap. Carries the best iterate
/// so callers can inspect or reuse it.
class NonConvergence : public Error
{
public:
	NonConvergence(std::string const& what,
	               std::vector<Eigen::MatrixXd> best_iterate,
	               std::vector<double> history = {})
	: Error(what),
	  best_iterate_(std::move(best_iterate)),
	  history_(std::move(history))
	{
	}

	std::vector<Eigen::MatrixXd> const& best_iterate() const noexcept { return best_iterate_; }

	/// Per-iteration convergence measure (tail only for long runs).
	std::vector<double> const& history() const noexcept { return history_; }

private:
	std::vector<Eigen::MatrixXd> best_iterate_;
	std::vector<double> history_;
};

} // namespace txcoop

#endif // TXCOOP_ERRORS_HPP
