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
#ifndef TXCOOP_CAPACITY_HPP
#define TXCOOP_CAPACITY_HPP

#include <txcoop/game_model.hpp>

#include <optional>
#include <span>
#include <vector>

namespace txcoop {

/// Default PSD tolerance for covariance inputs.
inline constexpr double psd_tolerance = 1e-10;

/// Throws InvalidCovariance unless m is square, symmetric and PSD within tol
/// (relative to max(1, largest |eigenvalue|)).
void require_psd(Matrix const& m, char const* what, double tol = psd_tolerance);

/// log det(N0 I + H Q H' + J) - log det(N0 I + J), natural log, clamped at 0.
double logdet_rate(double noise, Matrix const& channel, Matrix const& cov, Matrix const& interference);

/// log det(noise_cov + H Q H') - log det(noise_cov).
double rate_against(Matrix const& channel, Matrix const& cov, Matrix const& noise_cov);

struct WaterfillResult
{
	Matrix cov;                 ///< optimal transmit covariance
	double rate = 0.0;          ///< nats
	double water_level = 0.0;   ///< mu
	Vector mode_gains;          ///< whitened eigenmode gains, descending
	Vector mode_powers;         ///< power per mode, aligned with mode_gains
};

/// Maximizes the rate against noise_cov subject to trace(Q) <= budget.
/// Throws NumericalFailure when noise_cov is singular or indefinite.
WaterfillResult waterfill(Matrix const& channel, Matrix const& noise_cov, double budget);

struct PerAntennaOptions
{
	double stationarity_tol = 1e-6;
	int max_iterations = 20000;
	double projection_tol = 1e-10;
	int projection_max_iterations = 100000;
	std::optional<Matrix> initial;  ///< projected onto the feasible set first
};

struct PerAntennaResult
{
	Matrix cov;
	double rate = 0.0;
	double stationarity = 0.0;     ///< ||Q - Proj(Q + grad)||_F at exit
	int iterations = 0;
	std::vector<double> objective_trace;  ///< rate per accepted iterate
};

/// Euclidean projection onto {Q PSD, diag(Q) <= budgets} (Dykstra), returned
/// exactly feasible.
Matrix project_per_antenna(Matrix const& m, std::span<double const> budgets, double tol = 1e-10,
                           int max_iterations = 100000);

/// Maximizes the rate against noise_cov subject to Q PSD and diag(Q) <= budgets,
/// by projected gradient ascent with backtracking. Throws NonConvergence
/// carrying the best iterate when the iteration cap is hit.
PerAntennaResult maximize_per_antenna(Matrix const& channel, Matrix const& noise_cov,
                                      std::span<double const> budgets,
                                      PerAntennaOptions const& options = {});

struct MaxRateResult
{
	Matrix cov;
	double rate = 0.0;
};

/// Dispatches to waterfill or maximize_per_antenna.
MaxRateResult maximize_rate(Matrix const& channel, Matrix const& noise_cov, PowerConstraint const& power,
                            PerAntennaOptions const& options = {});

/// Closed-form utilities for a single receive antenna, aligned with
/// partition.blocks(). order lists the partition's blocks first-decoded first.
std::vector<double> single_antenna_utilities(Scenario const& scenario, Partition const& partition,
                                             std::span<Coalition const> order);

/// Effective received power of a coalition with a single receive antenna
/// (the squared beamforming gain of the closed forms).
double single_antenna_gain(Scenario const& scenario, Coalition coalition);

/// sigma_max(H)^2 P / N0.
double low_snr_utility(Matrix const& channel, double budget, double noise);

/// Interference-free maximum rate of coalition S under its own constraint.
double interference_free_rate(Scenario const& scenario, Coalition coalition,
                              PerAntennaOptions const& options = {});

/// (|S|/K) times the interference-free rate; requires a uniform time-share receiver.
double timeshare_highsnr_utility(Scenario const& scenario, Coalition coalition,
                                 PerAntennaOptions const& options = {});

} // namespace txcoop

#endif // TXCOOP_CAPACITY_HPP
