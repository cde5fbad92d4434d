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
#ifndef TXCOOP_SCENARIO_IO_HPP
#define TXCOOP_SCENARIO_IO_HPP

#include <txcoop/game_model.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace txcoop {

/// Library version, "major.minor.patch".
std::string_view library_version();

/// Parses a scenario document (JSON). Errors are InvalidArgument naming the
/// source, and either the line and column (syntax) or the field path
/// (e.g. "/users/1/channel").
Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");

/// Reads and parses a file.
Scenario load_scenario(std::string const& path);

/// Canonical form: sorted keys, two-space indent, trailing newline.
/// Parsing the output reproduces the scenario (same fingerprint), and a
/// canonical document round-trips byte for byte.
std::string serialize_scenario(Scenario const& scenario);

/// "%.12g"
std::string format_number(double value);

/// 16 lower-case hex digits.
std::string format_fingerprint(std::uint64_t fingerprint);

/// Column-named table written as CSV behind a "# key: value" comment header.
class ResultTable
{
public:
	using Cell = std::variant<double, long long, std::string>;

	explicit ResultTable(std::vector<std::string> columns);

	void add_header(std::string key, std::string value);
	void add_row(std::vector<Cell> row);

	std::vector<std::string> const& columns() const noexcept { return columns_; }
	std::vector<std::vector<Cell>> const& rows() const noexcept { return rows_; }
	std::vector<std::pair<std::string, std::string>> const& header() const noexcept { return header_; }

	void write_csv(std::ostream& out) const;
	std::string to_csv() const;

private:
	std::vector<std::string> columns_;
	std::vector<std::pair<std::string, std::string>> header_;
	std::vector<std::vector<Cell>> rows_;
};

/// Content of the summary document. Absent fields are written as null.
struct Summary
{
	std::optional<std::string> verdict;
	std::optional<double> epsilon_star;
	std::optional<std::vector<double>> allocation;
	/// (coalition label, weight) pairs plus margin.
	std::optional<std::vector<std::pair<std::string, double>>> certificate;
	std::optional<double> certificate_margin;
	/// (phase, seconds); only filled when timings are requested, so that
	/// default output stays byte-reproducible.
	std::optional<std::vector<std::pair<std::string, double>>> timings;
};

/// JSON object with exactly the keys verdict, epsilon_star, allocation,
/// certificate, timings; numbers rounded to 12 significant digits.
std::string serialize_summary(Summary const& summary);

} // namespace txcoop

#endif // TXCOOP_SCENARIO_IO_HPP
