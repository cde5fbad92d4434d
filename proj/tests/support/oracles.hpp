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
#ifndef TXCOOP_TESTS_ORACLES_HPP
#define TXCOOP_TESTS_ORACLES_HPP

// Independent reference computations used only by the tests. None of these
// call into the library's numerical kernels: determinants are expanded by
// cofactors, optima are found by exhaustive search, and closed forms are
// written out longhand.

#include <txcoop/game_model.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace txcoop::oracle {

/// Laplace expansion along the first row.
inline double cofactor_det(Matrix const& m)
{
	Eigen::Index const n = m.rows();
	if (n == 1)
	{
		return m(0, 0);
	}
	if (n == 2)
	{
		return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
	}
	double det = 0.0;
	for (Eigen::Index j = 0; j < n; ++j)
	{
		Matrix minor(n - 1, n - 1);
		for (Eigen::Index r = 1; r < n; ++r)
		{
			for (Eigen::Index c = 0, cc = 0; c < n; ++c)
			{
				if (c != j)
				{
					minor(r - 1, cc++) = m(r, c);
				}
			}
		}
		det += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * cofactor_det(minor);
	}
	return det;
}

/// log det(N0 I + H Q H' + J) - log det(N0 I + J) by cofactor determinants.
inline double rate(double n0, Matrix const& h, Matrix const& q, Matrix const& j)
{
	Eigen::Index const m = h.rows();
	Matrix base = n0 * Matrix::Identity(m, m) + j;
	Matrix full = base;
	for (Eigen::Index a = 0; a < m; ++a)
	{
		for (Eigen::Index b = 0; b < m; ++b)
		{
			double s = 0.0;
			for (Eigen::Index x = 0; x < q.rows(); ++x)
			{
				for (Eigen::Index y = 0; y < q.cols(); ++y)
				{
					s += h(a, x) * q(x, y) * h(b, y);
				}
			}
			full(a, b) += s;
		}
	}
	return std::log(cofactor_det(full) / cofactor_det(base));
}

/// Bell numbers from the recurrence B_{n+1} = sum_k C(n,k) B_k.
inline std::vector<std::uint64_t> bell_numbers(int up_to)
{
	std::vector<std::uint64_t> b{1};
	for (int n = 0; n < up_to; ++n)
	{
		std::uint64_t next = 0;
		std::uint64_t binom = 1;
		for (int k = 0; k <= n; ++k)
		{
			next += binom * b[static_cast<std::size_t>(k)];
			binom = binom * static_cast<std::uint64_t>(n - k) / static_cast<std::uint64_t>(k + 1);
		}
		b.push_back(next);
	}
	return b;
}

/// Received power of a coalition at a single receive antenna when its members
/// beamform coherently: sum power uses (sum h^2)(sum P), per-antenna uses
/// (sum |h| sqrt(p))^2.
inline double coherent_gain(Scenario const& s, Coalition c)
{
	double h2 = 0.0;
	double p = 0.0;
	double amp = 0.0;
	for (int id : c.members())
	{
		UserSpec const& u = s.user(id);
		for (Eigen::Index a = 0; a < u.channel.cols(); ++a)
		{
			double const h = u.channel(0, a);
			h2 += h * h;
			if (u.power.mode() == PowerMode::per_antenna)
			{
				amp += std::abs(h) * std::sqrt(u.power.values()[static_cast<std::size_t>(a)]);
			}
		}
		if (u.power.mode() == PowerMode::sum)
		{
			p += u.power.values().front();
		}
	}
	return s.power_mode() == PowerMode::sum ? h2 * p : amp * amp;
}

/// Latest-member decoding order written out directly: block slot is the
/// maximum base-order position over its members.
inline std::vector<std::size_t> latest_member_order(Partition const& t, std::vector<int> const& base)
{
	std::vector<int> slot(base.size() + 1);
	for (std::size_t i = 0; i < base.size(); ++i)
	{
		slot[static_cast<std::size_t>(base[i])] = static_cast<int>(i);
	}
	std::vector<std::pair<int, std::size_t>> keyed;
	for (std::size_t b = 0; b < t.size(); ++b)
	{
		int latest = -1;
		for (int id : t.block(b).members())
		{
			latest = std::max(latest, slot[static_cast<std::size_t>(id)]);
		}
		keyed.emplace_back(latest, b);
	}
	std::sort(keyed.begin(), keyed.end());
	std::vector<std::size_t> out;
	for (auto const& [_, b] : keyed)
	{
		out.push_back(b);
	}
	return out;
}

/// Closed-form single-receive-antenna SIC utilities for a block order
/// (first-decoded first), aligned with t.blocks().
inline std::vector<double> single_antenna_sic(Scenario const& s, Partition const& t,
                                              std::vector<std::size_t> const& order)
{
	std::vector<double> out(t.size());
	for (std::size_t pos = 0; pos < order.size(); ++pos)
	{
		double later = 0.0;
		for (std::size_t q = pos + 1; q < order.size(); ++q)
		{
			later += coherent_gain(s, t.block(order[q]));
		}
		double const own = coherent_gain(s, t.block(order[pos]));
		out[order[pos]] = std::log((s.noise() + own + later) / (s.noise() + later));
	}
	return out;
}

/// Maximum of log det(I + W Q W') over 2x2 Q with diag(Q) = p, by scanning the
/// correlation on a fine grid and refining the bracket by ternary search (the
/// objective is concave in the off-diagonal entry). W is the whitened channel.
inline double per_antenna_2x2_grid(Matrix const& h, Matrix const& noise_cov, double p1, double p2)
{
	auto objective = [&](double rho) {
		Matrix q(2, 2);
		double const off = rho * std::sqrt(p1 * p2);
		q << p1, off, off, p2;
		Matrix const full = noise_cov + h * q * h.transpose();
		return std::log(cofactor_det(full) / cofactor_det(noise_cov));
	};
	int const steps = 20000;
	double best = -std::numeric_limits<double>::infinity();
	int arg = 0;
	for (int i = 0; i <= steps; ++i)
	{
		double const v = objective(-1.0 + 2.0 * i / steps);
		if (v > best)
		{
			best = v;
			arg = i;
		}
	}
	double lo = -1.0 + 2.0 * std::max(0, arg - 1) / steps;
	double hi = -1.0 + 2.0 * std::min(steps, arg + 1) / steps;
	for (int it = 0; it < 200; ++it)
	{
		double const a = lo + (hi - lo) / 3.0;
		double const b = hi - (hi - lo) / 3.0;
		if (objective(a) < objective(b))
		{
			lo = a;
		}
		else
		{
			hi = b;
		}
	}
	return std::max(best, objective(0.5 * (lo + hi)));
}

/// Search over the whole feasible set {PSD, q11 <= p1, q22 <= p2}, written as
/// (q11, q22, r) with q12 = r sqrt(q11 q22): a coarse grid followed by
/// repeated zooming around the incumbent. Does not assume that the optimum
/// saturates the diagonal.
inline double per_antenna_2x2_search(Matrix const& h, Matrix const& noise_cov, double p1, double p2)
{
	double const base = cofactor_det(noise_cov);
	auto objective = [&](double a, double d, double r) {
		Matrix q(2, 2);
		double const off = r * std::sqrt(a * d);
		q << a, off, off, d;
		return std::log(cofactor_det(noise_cov + h * q * h.transpose()) / base);
	};
	double ca = 0.5 * p1;
	double cd = 0.5 * p2;
	double cr = 0.0;
	double wa = 0.5 * p1;
	double wd = 0.5 * p2;
	double wr = 1.0;
	double best = objective(ca, cd, cr);
	int n = 20;
	for (int round = 0; round < 60; ++round)
	{
		double ba = ca;
		double bd = cd;
		double br = cr;
		for (int i = -n; i <= n; ++i)
		{
			double const a = std::clamp(ca + wa * i / n, 0.0, p1);
			for (int j = -n; j <= n; ++j)
			{
				double const d = std::clamp(cd + wd * j / n, 0.0, p2);
				for (int k = -n; k <= n; ++k)
				{
					double const r = std::clamp(cr + wr * k / n, -1.0, 1.0);
					double const v = objective(a, d, r);
					if (v > best)
					{
						best = v;
						ba = a;
						bd = d;
						br = r;
					}
				}
			}
		}
		ca = ba;
		cd = bd;
		cr = br;
		wa *= 0.6;
		wd *= 0.6;
		wr *= 0.6;
		n = 5;
	}
	return best;
}

/// Least core by coarse-to-fine grid search of
///   min over x with sum x = v(K) of max_S (v_S - x(S)).
/// demand(mask) gives v_S; returns the minimax value.
inline double least_core_grid(int users, std::function<double(std::uint32_t)> const& demand, double grand,
                              double final_step = 1e-3)
{
	std::uint32_t const full = (1u << users) - 1u;
	auto excess = [&](std::vector<double> const& x) {
		double worst = -std::numeric_limits<double>::infinity();
		for (std::uint32_t m = 1; m < full; ++m)
		{
			double s = 0.0;
			for (int i = 0; i < users; ++i)
			{
				if ((m >> i) & 1u)
				{
					s += x[static_cast<std::size_t>(i)];
				}
			}
			worst = std::max(worst, demand(m) - s);
		}
		return worst;
	};
	// Free coordinates x_1..x_{K-1}; x_K closes the budget.
	std::size_t const free = static_cast<std::size_t>(users - 1);
	std::vector<double> centre(free, grand / users);
	double half = grand;  // search window half-width
	double step = 0.05;
	double best = std::numeric_limits<double>::infinity();
	while (true)
	{
		int const n = static_cast<int>(std::ceil(half / step));
		std::vector<int> idx(free, -n);
		std::vector<double> best_x = centre;
		while (true)
		{
			std::vector<double> x(static_cast<std::size_t>(users));
			double used = 0.0;
			for (std::size_t i = 0; i < free; ++i)
			{
				x[i] = centre[i] + idx[i] * step;
				used += x[i];
			}
			x.back() = grand - used;
			double const e = excess(x);
			if (e < best)
			{
				best = e;
				best_x.assign(x.begin(), x.end() - 1);
			}
			std::size_t d = 0;
			while (d < free && ++idx[d] > n)
			{
				idx[d++] = -n;
			}
			if (d == free)
			{
				break;
			}
		}
		centre = best_x;
		if (step <= final_step * 1.0000001)
		{
			return best;
		}
		half = 2.0 * step;
		step = std::max(final_step, step / 10.0);
	}
}

} // namespace txcoop::oracle

#endif // TXCOOP_TESTS_ORACLES_HPP
