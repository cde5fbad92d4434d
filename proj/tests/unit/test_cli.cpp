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
#include "cli.hpp"

#include <txcoop/scenario_io.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace txcoop::cli {
namespace {

std::string const scenario_dir = TXCOOP_SCENARIO_DIR;

struct Invocation
{
	int code = -1;
	std::string out;
	std::string err;
};

Invocation run(std::vector<std::string> const& args)
{
	std::ostringstream out;
	std::ostringstream err;
	Invocation r;
	r.code = run_command(args, out, err);
	r.out = out.str();
	r.err = err.str();
	return r;
}

std::string read_file(std::filesystem::path const& path)
{
	std::ifstream f(path, std::ios::binary);
	std::ostringstream s;
	s << f.rdbuf();
	return s.str();
}

std::vector<std::string> lines_of(std::string const& text)
{
	std::vector<std::string> lines;
	std::istringstream in(text);
	for (std::string line; std::getline(in, line);)
	{
		lines.push_back(line);
	}
	return lines;
}

// Splits one CSV record, honouring double-quoted cells.
std::vector<std::string> split_csv(std::string const& line)
{
	std::vector<std::string> cells(1);
	bool quoted = false;
	for (std::size_t i = 0; i < line.size(); ++i)
	{
		char const c = line[i];
		if (quoted)
		{
			if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
			{
				cells.back() += '"';
				++i;
			}
			else if (c == '"')
			{
				quoted = false;
			}
			else
			{
				cells.back() += c;
			}
		}
		else if (c == '"')
		{
			quoted = true;
		}
		else if (c == ',')
		{
			cells.emplace_back();
		}
		else
		{
			cells.back() += c;
		}
	}
	return cells;
}

/// Data rows of the table whose column line is `columns`.
std::vector<std::vector<std::string>> table_rows(std::string const& text, std::string const& columns)
{
	std::vector<std::vector<std::string>> rows;
	bool in_rows = false;
	for (std::string const& line : lines_of(text))
	{
		if (line == columns)
		{
			in_rows = true;
			continue;
		}
		if (in_rows && (line.empty() || line[0] == '#'))
		{
			break;
		}
		if (in_rows)
		{
			rows.push_back(split_csv(line));
		}
	}
	return rows;
}

TEST(Cli, PartitionCount)
{
	Invocation const r = run({"partitions", "--k", "4", "--count-only"});
	EXPECT_EQ(r.code, exit_success) << r.err;
	EXPECT_EQ(r.out, "15\n");
	Invocation const full = run({"partitions", "--k", "3"});
	EXPECT_EQ(full.code, exit_success);
	EXPECT_NE(full.out.find("index,blocks,partition"), std::string::npos) << full.out;
	EXPECT_NE(full.out.find("{1,2,3}"), std::string::npos) << full.out;
	EXPECT_NE(full.out.find("{1}{2}{3}"), std::string::npos) << full.out;
}

TEST(Cli, UsageErrorsExitWithOne)
{
	Invocation const unknown = run({"frobnicate"});
	EXPECT_EQ(unknown.code, exit_user_error);
	EXPECT_NE(unknown.err.find("partitions"), std::string::npos) << unknown.err;

	Invocation const flag = run({"partitions", "--k", "3", "--no-such-flag"});
	EXPECT_EQ(flag.code, exit_user_error);
	EXPECT_FALSE(flag.err.empty());

	Invocation const none = run({});
	EXPECT_EQ(none.code, exit_user_error);

	Invocation const range = run({"partitions", "--k", "0"});
	EXPECT_EQ(range.code, exit_user_error);
	EXPECT_NE(range.err.find("error: --k"), std::string::npos) << range.err;

	Invocation const model = run({"core", "--scenario", scenario_dir + "/sym4.cfg", "--model", "optimistic"});
	EXPECT_EQ(model.code, exit_user_error);
	EXPECT_NE(model.err.find("unknown --model"), std::string::npos) << model.err;
}

TEST(Cli, MissingScenarioFile)
{
	Invocation const r = run({"core", "--scenario", scenario_dir + "/does-not-exist.cfg"});
	EXPECT_EQ(r.code, exit_user_error);
	EXPECT_NE(r.err.find("does-not-exist.cfg"), std::string::npos) << r.err;
	EXPECT_TRUE(r.out.empty());
}

TEST(Cli, Version)
{
	Invocation const r = run({"--version"});
	EXPECT_EQ(r.code, exit_success);
	EXPECT_NE(r.out.find(std::string(library_version())), std::string::npos) << r.out;
}

TEST(Cli, CoreReportsBalancedCertificateForFourSymmetricUsers)
{
	Invocation const r = run({"core", "--scenario", scenario_dir + "/sym4.cfg", "--model", "rational"});
	ASSERT_EQ(r.code, exit_success) << r.err;
	EXPECT_NE(r.out.find("\"verdict\": \"empty\""), std::string::npos) << r.out;
	EXPECT_NE(r.out.find("# table: certificate"), std::string::npos) << r.out;
	EXPECT_NE(r.out.find("coalition,lambda,demand"), std::string::npos) << r.out;
	EXPECT_NE(r.out.find("# units: nats"), std::string::npos) << r.out;
	// The certificate weights are balanced: every player is covered with total weight one.
	std::array<double, 4> cover{};
	auto const rows = table_rows(r.out, "coalition,lambda,demand");
	ASSERT_FALSE(rows.empty()) << r.out;
	for (auto const& row : rows)
	{
		ASSERT_EQ(row.size(), 3u);
		double const lambda = std::stod(row[1]);
		EXPECT_GT(lambda, 0.0);
		auto const members = split_csv(row[0].substr(1, row[0].size() - 2));
		for (auto const& m : members)
		{
			cover[static_cast<std::size_t>(std::stoi(m) - 1)] += lambda;
		}
	}
	for (double c : cover)
	{
		EXPECT_NEAR(c, 1.0, 1e-9);
	}
}

TEST(Cli, RegionContainsTheEqualSplit)
{
	Invocation const r = run({"region", "--scenario", scenario_dir + "/sym3_ts_3db.cfg"});
	ASSERT_EQ(r.code, exit_success) << r.err;
	EXPECT_NE(r.out.find("\"verdict\": \"nonempty\""), std::string::npos) << r.out;
	std::vector<std::array<double, 3>> vertices;
	for (auto const& cells : table_rows(r.out, "vertex,x1,x2,x3"))
	{
		ASSERT_EQ(cells.size(), 4u);
		vertices.push_back({std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])});
	}
	ASSERT_GE(vertices.size(), 3u);
	// Three unit-gain users at noise 0.5 cooperate coherently: ln(1 + 9 / 0.5).
	double const share = std::log(19.0) / 3.0;
	ASSERT_NEAR(share, 0.98148, 1e-5);
	for (auto const& v : vertices)
	{
		EXPECT_NEAR(v[0] + v[1] + v[2], std::log(19.0), 1e-9);
	}
	// Point-in-polygon in the (x1, x2) projection; vertices are ordered around the boundary.
	double sign = 0.0;
	for (std::size_t i = 0; i < vertices.size(); ++i)
	{
		auto const& a = vertices[i];
		auto const& b = vertices[(i + 1) % vertices.size()];
		double const cross = (b[0] - a[0]) * (share - a[1]) - (b[1] - a[1]) * (share - a[0]);
		if (std::abs(cross) < 1e-12)
		{
			continue;
		}
		if (sign == 0.0)
		{
			sign = cross;
		}
		EXPECT_GT(cross * sign, 0.0) << "edge " << i;
	}
}

TEST(Cli, RepeatRunsAreByteIdentical)
{
	std::vector<std::vector<std::string>> const commands = {
	    {"core", "--scenario", scenario_dir + "/sym4.cfg"},
	    {"least-core", "--scenario", scenario_dir + "/sym4.cfg", "--model", "merging"},
	    {"utilities", "--scenario", scenario_dir + "/sym3_ts_3db.cfg", "--bits"},
	    {"properties", "--scenario", scenario_dir + "/sym4.cfg", "--trials", "20", "--seed", "5"},
	    {"externalities", "--scenario", scenario_dir + "/sym4.cfg", "--trials", "20", "--seed", "5"},
	    {"sweep", "--k", "3", "--snr", "-10,0", "--power", "sum"},
	    {"ratio", "--scenario", scenario_dir + "/sym3_ts_3db.cfg", "--snr", "0,20"},
	};
	for (auto const& args : commands)
	{
		Invocation const a = run(args);
		Invocation const b = run(args);
		EXPECT_EQ(a.code, exit_success) << args.front() << ": " << a.err;
		EXPECT_FALSE(a.out.empty()) << args.front();
		EXPECT_EQ(a.out, b.out) << args.front();
	}
}

TEST(Cli, TimingsAreOptIn)
{
	Invocation const plain = run({"core", "--scenario", scenario_dir + "/sym4.cfg"});
	EXPECT_NE(plain.out.find("\"timings\": null"), std::string::npos) << plain.out;
	Invocation const timed = run({"core", "--scenario", scenario_dir + "/sym4.cfg", "--timings"});
	EXPECT_EQ(timed.out.find("\"timings\": null"), std::string::npos) << timed.out;
	EXPECT_NE(timed.out.find("demands"), std::string::npos) << timed.out;
}

TEST(Cli, OutDirectoryReceivesFiles)
{
	auto const dir = std::filesystem::temp_directory_path() / "txcoop_cli_test_out";
	std::filesystem::remove_all(dir);
	Invocation const r = run({"core", "--scenario", scenario_dir + "/sym4.cfg", "--out", dir.string()});
	ASSERT_EQ(r.code, exit_success) << r.err;
	Invocation const stdout_run = run({"core", "--scenario", scenario_dir + "/sym4.cfg"});
	std::string joined;
	for (std::string const name : {"summary.json", "demands.csv", "certificate.csv"})
	{
		auto const path = dir / name;
		ASSERT_TRUE(std::filesystem::exists(path)) << path;
		EXPECT_NE(r.out.find(path.string()), std::string::npos) << r.out;
		joined += (joined.empty() ? "" : "\n") + read_file(path);
	}
	EXPECT_EQ(joined, stdout_run.out);
	std::filesystem::remove_all(dir);
}

TEST(Cli, ShippedScenariosAreCanonical)
{
	for (std::string const name : {"sym4.cfg", "sym3_ts_3db.cfg"})
	{
		std::string const text = read_file(scenario_dir + "/" + name);
		ASSERT_FALSE(text.empty()) << name;
		EXPECT_EQ(serialize_scenario(parse_scenario(text, name)), text) << name;
	}
}

} // namespace
} // namespace txcoop::cli
