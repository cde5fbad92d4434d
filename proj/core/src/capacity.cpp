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
#include <txcoop/capacity.hpp>

#include <txcoop/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace txcoop {

namespace {

Matrix symmetrized(Matrix const& m)
{
	return 0.5 * (m + m.transpose());
}

double logdet_pd(Matrix const& m, char const* what)
{
	Eigen::LLT<Matrix> llt(symmetrized(m));
	if (llt.info() != Eigen::Success)
	{
		throw NumericalFailure(std::string(what) + " is not positive definite");
	}
	Matrix const& l = llt.matrixLLT();
	double sum = 0.0;
	for (Eigen::Index i = 0; i < l.rows(); ++i)
	{
		sum += std::log(l(i, i));
	}
	return 2.0 * sum;
}

Matrix project_psd(Matrix const& m)
{
	Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m));
	Vector d = eig.eigenvalues().cwiseMax(0.0);
	return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

void clamp_diagonal(Matrix& m, std::span<double const> budgets)
{
	for (Eigen::Index i = 0; i < m.rows(); ++i)
	{
		m(i, i) = std::min(m(i, i), budgets[static_cast<std::size_t>(i)]);
	}
}

double rate_with_gram(Matrix const& channel, Matrix const& cov, Matrix const& noise_cov, double logdet_noise)
{
	return logdet_pd(noise_cov + channel * cov * channel.transpose(), "received covariance") - logdet_noise;
}

} // namespace

void require_psd(Matrix const& m, char const* what, double tol)
{
	if (m.rows() != m.cols())
	{
		throw InvalidCovariance(std::string(what) + " must be square");
	}
	if (m.size() == 0)
	{
		return;
	}
	if (!m.allFinite())
	{
		throw InvalidCovariance(std::string(what) + " has non-finite entries");
	}
	Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m), Eigen::EigenvaluesOnly);
	double const scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
	if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale)
	{
		throw InvalidCovariance(std::string(what) + " is not symmetric");
	}
	if (eig.eigenvalues().minCoeff() < -tol * scale)
	{
		throw InvalidCovariance(std::string(what) + " is not positive semidefinite (min eigenvalue "
		                        + std::to_string(eig.eigenvalues().minCoeff()) + ")");
	}
}

double logdet_rate(double noise, Matrix const& channel, Matrix const& cov, Matrix const& interference)
{
	if (!(noise > 0.0))
	{
		throw InvalidArgument("noise must be > 0");
	}
	if (cov.rows() != channel.cols() || interference.rows() != channel.rows())
	{
		throw InvalidArgument("logdet_rate: inconsistent dimensions");
	}
	require_psd(cov, "transmit covariance");
	require_psd(interference, "interference covariance");
	Matrix const base = noise * Matrix::Identity(channel.rows(), channel.rows()) + interference;
	return rate_against(channel, cov, base);
}

double rate_against(Matrix const& channel, Matrix const& cov, Matrix const& noise_cov)
{
	double const r = rate_with_gram(channel, cov, noise_cov, logdet_pd(noise_cov, "noise covariance"));
	return std::max(0.0, r);
}

// ---------------------------------------------------------------------------

WaterfillResult waterfill(Matrix const& channel, Matrix const& noise_cov, double budget)
{
	if (!(budget >= 0.0))
	{
		throw InvalidArgument("waterfill: power budget must be >= 0");
	}
	if (noise_cov.rows() != channel.rows() || noise_cov.cols() != channel.rows())
	{
		throw InvalidArgument("waterfill: noise covariance dimension mismatch");
	}
	Matrix const noise = symmetrized(noise_cov);
	Eigen::SelfAdjointEigenSolver<Matrix> noise_eig(noise, Eigen::EigenvaluesOnly);
	double const lmax = noise_eig.eigenvalues().maxCoeff();
	if (!(lmax > 0.0) || noise_eig.eigenvalues().minCoeff() < 1e-12 * lmax)
	{
		throw NumericalFailure("waterfill: noise covariance is singular or indefinite");
	}
	Eigen::LLT<Matrix> llt(noise);
	if (llt.info() != Eigen::Success)
	{
		throw NumericalFailure("waterfill: Cholesky of noise covariance failed");
	}
	Matrix const whitened = llt.matrixL().solve(channel);
	Eigen::SelfAdjointEigenSolver<Matrix> eig(whitened.transpose() * whitened);

	Eigen::Index const n = channel.cols();
	std::vector<Eigen::Index> modes(static_cast<std::size_t>(n));
	std::iota(modes.begin(), modes.end(), Eigen::Index{0});
	// Descending gain; equal gains keep ascending mode index.
	std::ranges::stable_sort(modes, [&](Eigen::Index a, Eigen::Index b) {
		return eig.eigenvalues()(a) > eig.eigenvalues()(b);
	});

	WaterfillResult out;
	out.mode_gains.resize(n);
	out.mode_powers = Vector::Zero(n);
	Matrix basis(n, n);
	for (Eigen::Index i = 0; i < n; ++i)
	{
		out.mode_gains(i) = std::max(0.0, eig.eigenvalues()(modes[static_cast<std::size_t>(i)]));
		basis.col(i) = eig.eigenvectors().col(modes[static_cast<std::size_t>(i)]);
	}

	double const gmax = n > 0 ? out.mode_gains(0) : 0.0;
	Eigen::Index usable = 0;
	while (usable < n && out.mode_gains(usable) > 1e-14 * gmax && out.mode_gains(usable) > 0.0)
	{
		++usable;
	}

	if (usable > 0 && budget > 0.0)
	{
		// Largest active set whose weakest mode still sits below the water level.
		double inv_sum = 0.0;
		for (Eigen::Index m = 0; m < usable; ++m)
		{
			inv_sum += 1.0 / out.mode_gains(m);
		}
		for (Eigen::Index m = usable; m >= 1; --m)
		{
			double const mu = (budget + inv_sum) / static_cast<double>(m);
			if (mu > 1.0 / out.mode_gains(m - 1))
			{
				out.water_level = mu;
				for (Eigen::Index i = 0; i < m; ++i)
				{
					out.mode_powers(i) = mu - 1.0 / out.mode_gains(i);
				}
				break;
			}
			inv_sum -= 1.0 / out.mode_gains(m - 1);
		}
	}
	else if (usable > 0)
	{
		out.water_level = 1.0 / out.mode_gains(0);
	}

	out.cov = basis * out.mode_powers.asDiagonal() * basis.transpose();
	out.cov = symmetrized(out.cov);
	out.rate = 0.0;
	for (Eigen::Index i = 0; i < n; ++i)
	{
		out.rate += std::log1p(out.mode_gains(i) * out.mode_powers(i));
	}
	return out;
}

// ---------------------------------------------------------------------------

Matrix project_per_antenna(Matrix const& m, std::span<double const> budgets, double tol, int max_iterations)
{
	if (static_cast<Eigen::Index>(budgets.size()) != m.rows() || m.rows() != m.cols())
	{
		throw InvalidArgument("project_per_antenna: dimension mismatch");
	}
	// Dykstra between the PSD cone and the diagonal box.
	Matrix x = symmetrized(m);
	Matrix p = Matrix::Zero(m.rows(), m.cols());
	Matrix q = Matrix::Zero(m.rows(), m.cols());
	Matrix y = x;
	for (int it = 0; it < max_iterations; ++it)
	{
		y = project_psd(x + p);
		p = x + p - y;
		Matrix next = y + q;
		clamp_diagonal(next, budgets);
		q = y + q - next;
		double const change = (next - x).norm();
		double const gap = (next - y).norm();
		x = std::move(next);
		if (change <= tol && gap <= tol)
		{
			break;
		}
	}
	// y is PSD; rescale rows/columns whose diagonal still exceeds its budget.
	Vector scale = Vector::Ones(y.rows());
	for (Eigen::Index i = 0; i < y.rows(); ++i)
	{
		double const b = budgets[static_cast<std::size_t>(i)];
		if (y(i, i) > b)
		{
			scale(i) = y(i, i) > 0.0 ? std::sqrt(b / y(i, i)) : 0.0;
		}
	}
	Matrix out = scale.asDiagonal() * y * scale.asDiagonal();
	return symmetrized(out);
}

PerAntennaResult maximize_per_antenna(Matrix const& channel, Matrix const& noise_cov,
                                      std::span<double const> budgets, PerAntennaOptions const& options)
{
	Eigen::Index const n = channel.cols();
	if (static_cast<Eigen::Index>(budgets.size()) != n)
	{
		throw InvalidArgument("maximize_per_antenna: one budget per transmit antenna required");
	}
	for (double b : budgets)
	{
		if (!(b >= 0.0))
		{
			throw InvalidArgument("maximize_per_antenna: budgets must be >= 0");
		}
	}
	if (noise_cov.rows() != channel.rows() || noise_cov.cols() != channel.rows())
	{
		throw InvalidArgument("maximize_per_antenna: noise covariance dimension mismatch");
	}

	Matrix const noise = symmetrized(noise_cov);
	double const logdet_noise = logdet_pd(noise, "noise covariance");
	auto objective = [&](Matrix const& q) { return rate_with_gram(channel, q, noise, logdet_noise); };
	auto gradient = [&](Matrix const& q) -> Matrix {
		Matrix const s = noise + channel * q * channel.transpose();
		return symmetrized(channel.transpose() * Eigen::LLT<Matrix>(symmetrized(s)).solve(channel));
	};
	auto project = [&](Matrix const& m) {
		return project_per_antenna(m, budgets, options.projection_tol, options.projection_max_iterations);
	};

	Vector const caps = Eigen::Map<Vector const>(budgets.data(), n);
	Matrix q = options.initial ? project(*options.initial) : Matrix(caps.asDiagonal());

	PerAntennaResult out;
	double f = objective(q);
	out.objective_trace.push_back(f);
	double step = 1.0;
	constexpr double armijo = 1e-4;

	for (int it = 0; it < options.max_iterations; ++it)
	{
		Matrix const g = gradient(q);
		double const residual = (q - project(q + g)).norm();
		out.stationarity = residual;
		out.iterations = it;
		if (residual <= options.stationarity_tol)
		{
			out.cov = q;
			out.rate = std::max(0.0, f);
			return out;
		}

		step = std::min(step * 4.0, 1e8);
		bool accepted = false;
		while (step > 1e-14)
		{
			Matrix candidate = project(q + step * g);
			double const lin = (g.cwiseProduct(candidate - q)).sum();
			double const fc = objective(candidate);
			if (fc >= f + armijo * lin && fc >= f)
			{
				q = std::move(candidate);
				f = fc;
				accepted = true;
				break;
			}
			step *= 0.5;
		}
		out.objective_trace.push_back(f);
		if (!accepted)
		{
			// No ascent representable in floating point: stationary to machine precision.
			out.cov = q;
			out.rate = std::max(0.0, f);
			if (residual <= 1e3 * options.stationarity_tol)
			{
				return out;
			}
			break;
		}
	}
	std::vector<double> tail(out.objective_trace.end()
	                             - std::min<std::ptrdiff_t>(32, static_cast<std::ptrdiff_t>(out.objective_trace.size())),
	                         out.objective_trace.end());
	throw NonConvergence("maximize_per_antenna: no convergence (stationarity "
	                         + std::to_string(out.stationarity) + ")",
	                     {q}, std::move(tail));
}

MaxRateResult maximize_rate(Matrix const& channel, Matrix const& noise_cov, PowerConstraint const& power,
                            PerAntennaOptions const& options)
{
	if (power.mode() == PowerMode::sum)
	{
		auto wf = waterfill(channel, noise_cov, power.values().front());
		return {std::move(wf.cov), wf.rate};
	}
	auto pa = maximize_per_antenna(channel, noise_cov, power.values(), options);
	return {std::move(pa.cov), pa.rate};
}

// ---------------------------------------------------------------------------

double single_antenna_gain(Scenario const& scenario, Coalition coalition)
{
	if (scenario.rx_antennas() != 1)
	{
		throw InvalidArgument("closed-form utilities require a single receive antenna");
	}
	if (scenario.power_mode() == PowerMode::sum)
	{
		double gain = 0.0;
		double power = 0.0;
		for (int id : coalition.members())
		{
			UserSpec const& u = scenario.user(id);
			gain += u.channel.squaredNorm();
			power += u.power.values().front();
		}
		return gain * power;
	}
	double amplitude = 0.0;
	for (int id : coalition.members())
	{
		UserSpec const& u = scenario.user(id);
		for (Eigen::Index j = 0; j < u.channel.cols(); ++j)
		{
			amplitude += std::abs(u.channel(0, j)) * std::sqrt(u.power.values()[static_cast<std::size_t>(j)]);
		}
	}
	return amplitude * amplitude;
}

std::vector<double> single_antenna_utilities(Scenario const& scenario, Partition const& partition,
                                             std::span<Coalition const> order)
{
	if (scenario.rx_antennas() != 1)
	{
		throw InvalidArgument("single_antenna_utilities requires M = 1");
	}
	if (order.size() != partition.size())
	{
		throw InvalidArgument("decoding order must list every block once");
	}
	std::vector<std::size_t> index;
	std::vector<bool> seen(partition.size(), false);
	for (Coalition c : order)
	{
		auto const b = partition.find(c);
		if (!b || seen[*b])
		{
			throw InvalidArgument("decoding order is not a permutation of the partition's blocks");
		}
		seen[*b] = true;
		index.push_back(*b);
	}

	double const n0 = scenario.noise();
	std::vector<double> out(partition.size());
	double undecoded = 0.0;  // power of blocks decoded after the current one
	for (std::size_t pos = order.size(); pos-- > 0;)
	{
		double const gain = single_antenna_gain(scenario, order[pos]);
		out[index[pos]] = std::log((n0 + undecoded + gain) / (n0 + undecoded));
		undecoded += gain;
	}
	return out;
}

double low_snr_utility(Matrix const& channel, double budget, double noise)
{
	if (!(noise > 0.0) || !(budget >= 0.0))
	{
		throw InvalidArgument("low_snr_utility: need N0 > 0 and P >= 0");
	}
	if (channel.size() == 0)
	{
		return 0.0;
	}
	Eigen::JacobiSVD<Matrix> svd(channel);
	double const smax = svd.singularValues()(0);
	return smax * smax * budget / noise;
}

double interference_free_rate(Scenario const& scenario, Coalition coalition, PerAntennaOptions const& options)
{
	Matrix const h = coalition_channel(scenario, coalition);
	Matrix const noise = scenario.noise() * Matrix::Identity(h.rows(), h.rows());
	return maximize_rate(h, noise, coalition_power(scenario, coalition), options).rate;
}

double timeshare_highsnr_utility(Scenario const& scenario, Coalition coalition, PerAntennaOptions const& options)
{
	auto const* ts = std::get_if<SicTimeShareReceiver>(&scenario.receiver());
	if (ts == nullptr)
	{
		throw InvalidArgument("timeshare_highsnr_utility requires a time-share receiver");
	}
	if (!ts->weights.empty())
	{
		double const w0 = ts->weights.front();
		for (double w : ts->weights)
		{
			if (std::abs(w - w0) > 1e-12)
			{
				throw InvalidArgument("high-SNR time-share approximation is defined only for uniform weights");
			}
		}
	}
	double const share = static_cast<double>(coalition.size()) / scenario.user_count();
	return share * interference_free_rate(scenario, coalition, options);
}

} // namespace txcoop
