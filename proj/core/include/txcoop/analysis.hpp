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
#ifndef TXCOOP_ANALYSIS_HPP
#define TXCOOP_ANALYSIS_HPP

#include <txcoop/cores.hpp>
#include <txcoop/equilibrium.hpp>
#include <txcoop/game_model.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace txcoop {

/// One observed merge: blocks of `before` were merged into `after`.
struct MergeWitness
{
	Partition before;
	Partition after;
	Coalition coalition;       ///< coalition whose utility is compared
	double before_value = 0.0;  ///< sum of the merged parts, or the outsider's utility
	double after_value = 0.0;
};

struct SuperadditivityReport
{
	int trials = 0;
	int checked = 0;
	int skipped = 0;                      ///< solver non-convergence
	double worst_margin = 0.0;            ///< min over merges of merged - sum(parts)
	std::optional<MergeWitness> counterexample;
	int cohesion_partitions = 0;          ///< partitions tested for cohesiveness
	double worst_cohesion_margin = 0.0;   ///< min over T of v(K) - sum_S v(S;T)
	std::optional<Partition> cohesion_counterexample;

	bool passed() const noexcept { return !counterexample && !cohesion_counterexample; }
};

/// Samples random partitions and random merges of r >= 2 of their blocks,
/// checking merged utility >= sum of the parts - 1e-8; also checks
/// cohesiveness on every partition (K <= 7) or on every sampled one.
SuperadditivityReport verify_superadditivity(Scenario const& scenario, int trials, std::uint64_t seed,
                                             SolverOptions const& options = {});

enum class Externality
{
	negative,
	positive,
	mixed
};

std::string_view externality_name(Externality e);

struct ExternalityVerdict
{
	Externality classification = Externality::negative;
	std::vector<MergeWitness> witnesses;  ///< every compared outsider
	int negative_count = 0;               ///< after < before - 1e-9
	int positive_count = 0;               ///< after > before + 1e-9
	int skipped = 0;
};

/// Merges two random blocks of random partitions with at least three blocks
/// and compares every outsider's utility before and after. Needs K >= 3.
ExternalityVerdict classify_externalities(Scenario const& scenario, int trials, std::uint64_t seed,
                                          SolverOptions const& options = {});

/// Utility of `coalition` in `before` and in `after`.
MergeWitness external_change(Scenario const& scenario, Partition const& before, Partition const& after,
                             Coalition coalition, SolverOptions const& options = {});

inline double snr_db_to_noise(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }
inline double noise_to_snr_db(double noise) { return -10.0 * std::log10(noise); }

struct SweepSpec
{
	std::vector<int> users;           ///< K values
	std::vector<double> snr_db;       ///< strictly increasing, SNR = 1/N0
	PowerMode power = PowerMode::per_antenna;
	double resolution_db = 0.01;
	std::uint64_t seed = 0;           ///< recorded; the symmetric template is deterministic
	SolverOptions solver;
	CoreOptions core;
};

struct Transition
{
	double low_db = 0.0;
	double high_db = 0.0;
	Verdict low_verdict = Verdict::nonempty;
	Verdict high_verdict = Verdict::empty;
	double boundary_db = 0.0;  ///< bisected to within resolution_db
};

struct BoundaryResult
{
	int users = 0;
	std::vector<Verdict> grid;  ///< verdict per grid SNR
	std::vector<Transition> transitions;
	bool monotone = true;       ///< at most one nonempty -> empty transition
	/// Boundary SNR when monotone with exactly one transition.
	std::optional<double> threshold_db;
	std::string note;
};

/// Core verdict of the symmetric fixed-order SIC game over an SNR grid, with
/// bisection of every verdict change.
std::vector<BoundaryResult> snr_boundary(SweepSpec const& spec, ExpectationModel model);

/// Symmetric fixed-order SIC scenario used by the sweeps.
Scenario symmetric_sic_scenario(int users, double snr_db, PowerMode power);

struct RatioPoint
{
	double snr_db = 0.0;
	int size = 0;         ///< |S|
	double approx = 0.0;  ///< (|S|/K) times interference-free rate
	double exact = 0.0;   ///< time-shared NE utility of S
	double ratio = 0.0;   ///< approx / exact
};

struct RatioCurve
{
	std::vector<RatioPoint> points;  ///< ordered by (snr, size)
	/// Points above 20 dB where the ratio moved away from 1 compared with the
	/// previous grid SNR (reported, not enforced).
	std::vector<RatioPoint> monotonicity_violations;
};

/// approx/exact utility of S = {1..s} for every s, outsiders as singletons,
/// over the SNR list. Requires a symmetric time-share scenario with uniform
/// weights; the scenario's noise is replaced by each grid SNR.
RatioCurve approx_ratio(Scenario const& scenario, std::vector<double> const& snr_db,
                        SolverOptions const& options = {});

/// True when every user has the same antennas, channel and power.
bool is_symmetric(Scenario const& scenario);

} // namespace txcoop

#endif // TXCOOP_ANALYSIS_HPP
