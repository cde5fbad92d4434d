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

#include <txcoop/analysis.hpp>
#include <txcoop/cores.hpp>
#include <txcoop/equilibrium.hpp>
#include <txcoop/errors.hpp>
#include <txcoop/scenario_io.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace txcoop::cli {

namespace {

struct Options
{
	std::string scenario;
	std::string model = "rational";
	std::string out;
	int k = 0;
	std::vector<int> users;
	bool count_only = false;
	std::uint64_t seed = 1;
	double tol_lp = 1e-9;
	double tol_solver = 1e-8;
	bool bits = false;
	bool timings = false;
	int trials = 500;
	std::vector<double> snr;
	double snr_min = -30.0;
	double snr_max = 10.0;
	double snr_step = 1.0;
	std::string power = "per_antenna";
};

/// Named outputs of one command, emitted to stdout or to files.
struct Outputs
{
	std::vector<std::pair<std::string, std::string>> items;

	void add(std::string name, std::string content) { items.emplace_back(std::move(name), std::move(content)); }
};

class Stopwatch
{
public:
	void lap(std::string phase)
	{
		auto const now = std::chrono::steady_clock::now();
		laps_.emplace_back(std::move(phase), std::chrono::duration<double>(now - last_).count());
		last_ = now;
	}
	std::vector<std::pair<std::string, double>> const& laps() const { return laps_; }

private:
	std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
	std::vector<std::pair<std::string, double>> laps_;
};

SolverOptions solver_options(Options const& o)
{
	if (!(o.tol_solver > 0.0))
	{
		throw InvalidArgument("--tol-solver must be positive");
	}
	SolverOptions s;
	s.per_antenna.stationarity_tol = o.tol_solver;
	return s;
}

CoreOptions core_options(Options const& o)
{
	if (!(o.tol_lp > 0.0))
	{
		throw InvalidArgument("--tol-lp must be positive");
	}
	CoreOptions c;
	c.lp_tolerance = o.tol_lp;
	return c;
}

ExpectationModel model_of(Options const& o)
{
	auto m = parse_model(o.model);
	if (!m)
	{
		throw InvalidArgument("unknown --model \"" + o.model + "\" (rational, merging, cautious, singleton)");
	}
	return *m;
}

PowerMode power_of(Options const& o)
{
	if (o.power == "sum")
	{
		return PowerMode::sum;
	}
	if (o.power == "per_antenna")
	{
		return PowerMode::per_antenna;
	}
	throw InvalidArgument("unknown --power \"" + o.power + "\" (sum, per_antenna)");
}

/// Presentation scale for utilities.
double unit(Options const& o) { return o.bits ? 1.0 / std::numbers::ln2 : 1.0; }
std::string unit_name(Options const& o) { return o.bits ? "bits" : "nats"; }

ResultTable table(std::string const& command, Options const& o, std::optional<Scenario> const& scenario,
                  std::vector<std::string> columns)
{
	ResultTable t(std::move(columns));
	t.add_header("tool", "txcoop " + std::string(library_version()));
	t.add_header("table", command);
	if (scenario)
	{
		t.add_header("scenario_fingerprint", format_fingerprint(scenario->fingerprint()));
	}
	t.add_header("seed", std::to_string(o.seed));
	t.add_header("tol_lp", format_number(o.tol_lp));
	t.add_header("tol_solver", format_number(o.tol_solver));
	t.add_header("units", unit_name(o));
	return t;
}

Scenario require_scenario(Options const& o)
{
	if (o.scenario.empty())
	{
		throw InvalidArgument("--scenario is required");
	}
	return load_scenario(o.scenario);
}

void finish_summary(Summary& s, Options const& o, Stopwatch const& watch)
{
	if (o.timings)
	{
		s.timings = watch.laps();
	}
}

// --- subcommands ------------------------------------------------------------

Outputs cmd_partitions(Options const& o)
{
	if (o.k < 1 || o.k > max_users)
	{
		throw InvalidArgument("--k must lie in 1.." + std::to_string(max_users));
	}
	Outputs out;
	if (o.count_only)
	{
		out.add("count.txt", std::to_string(count_partitions(o.k)) + "\n");
		return out;
	}
	ResultTable t = table("partitions", o, std::nullopt, {"index", "blocks", "partition"});
	long long index = 0;
	PartitionGenerator gen(o.k);
	do
	{
		Partition const p = gen.partition();
		t.add_row({index++, static_cast<long long>(p.size()), p.to_string()});
	} while (gen.advance());
	out.add("partitions.csv", t.to_csv());
	return out;
}

Outputs cmd_utilities(Options const& o)
{
	Scenario const s = require_scenario(o);
	UtilityTable const u = utility_table(s, solver_options(o));
	ResultTable t = table("utilities", o, s, {"partition", "coalition", "utility"});
	for (std::size_t i = 0; i < u.partitions().size(); ++i)
	{
		Partition const& p = u.partitions()[i];
		for (std::size_t b = 0; b < p.size(); ++b)
		{
			t.add_row({p.to_string(), p.block(b).to_string(), u.values(i)[b] * unit(o)});
		}
	}
	Outputs out;
	out.add("utilities.csv", t.to_csv());
	return out;
}

ResultTable demand_table(Options const& o, Scenario const& s, CoalitionalGame const& g)
{
	ResultTable t = table("demands", o, s, {"coalition", "size", "demand"});
	for (Coalition c : g.proper_coalitions())
	{
		t.add_row({c.to_string(), static_cast<long long>(c.size()), g.demand(c) * unit(o)});
	}
	t.add_row({Coalition::all(g.user_count()).to_string(), static_cast<long long>(g.user_count()),
	           g.grand_value() * unit(o)});
	return t;
}

ResultTable allocation_table(Options const& o, Scenario const& s, std::vector<double> const& x)
{
	ResultTable t = table("allocation", o, s, {"player", "x"});
	for (std::size_t i = 0; i < x.size(); ++i)
	{
		t.add_row({static_cast<long long>(i + 1), x[i] * unit(o)});
	}
	return t;
}

Outputs cmd_core(Options const& o)
{
	Stopwatch watch;
	Scenario const s = require_scenario(o);
	GameValues values(s, solver_options(o));
	CoalitionalGame const game = demand_game(values, model_of(o));
	watch.lap("demands");
	CoreResult const r = check_core(game, core_options(o));
	watch.lap("lp");

	Summary summary;
	summary.verdict = std::string(verdict_name(r.verdict));
	if (game.user_count() >= 2)
	{
		summary.epsilon_star = -r.slack;
	}
	Outputs out;
	std::vector<std::pair<std::string, std::string>> tables;
	tables.emplace_back("demands.csv", demand_table(o, s, game).to_csv());
	if (r.verdict == Verdict::nonempty)
	{
		summary.allocation = r.allocation;
		tables.emplace_back("allocation.csv", allocation_table(o, s, r.allocation).to_csv());
	}
	else
	{
		std::vector<std::pair<std::string, double>> weights;
		ResultTable t = table("certificate", o, s, {"coalition", "lambda", "demand"});
		t.add_header("margin", format_number(r.certificate->margin * unit(o)));
		for (auto const& [c, w] : r.certificate->weights)
		{
			weights.emplace_back(c.to_string(), w);
			t.add_row({c.to_string(), w, game.demand(c) * unit(o)});
		}
		summary.certificate = std::move(weights);
		summary.certificate_margin = r.certificate->margin;
		tables.emplace_back("certificate.csv", t.to_csv());
	}
	finish_summary(summary, o, watch);
	out.add("summary.json", serialize_summary(summary));
	for (auto& t : tables)
	{
		out.items.push_back(std::move(t));
	}
	return out;
}

Outputs cmd_least_core(Options const& o)
{
	Stopwatch watch;
	Scenario const s = require_scenario(o);
	GameValues values(s, solver_options(o));
	CoalitionalGame const game = demand_game(values, model_of(o));
	watch.lap("demands");
	LeastCoreResult const r = least_core(game, core_options(o));
	watch.lap("lp");
	Summary summary;
	summary.verdict = std::string(verdict_name(r.epsilon_star <= o.tol_lp ? Verdict::nonempty : Verdict::empty));
	summary.epsilon_star = r.epsilon_star;
	summary.allocation = r.allocation;
	finish_summary(summary, o, watch);
	Outputs out;
	out.add("summary.json", serialize_summary(summary));
	out.add("demands.csv", demand_table(o, s, game).to_csv());
	ResultTable t = allocation_table(o, s, r.allocation);
	t.add_header("epsilon_star", format_number(r.epsilon_star * unit(o)));
	out.add("allocation.csv", t.to_csv());
	return out;
}

Outputs cmd_region(Options const& o)
{
	Stopwatch watch;
	Scenario const s = require_scenario(o);
	if (s.user_count() != 3)
	{
		throw InvalidArgument("region needs a 3-user scenario");
	}
	GameValues values(s, solver_options(o));
	CoalitionalGame const game = demand_game(values, model_of(o));
	watch.lap("demands");
	auto const vertices = core_region_3user(game, o.tol_lp);
	watch.lap("region");
	Summary summary;
	summary.verdict = std::string(verdict_name(vertices.empty() ? Verdict::empty : Verdict::nonempty));
	finish_summary(summary, o, watch);
	ResultTable t = table("region", o, s, {"vertex", "x1", "x2", "x3"});
	long long i = 0;
	for (auto const& v : vertices)
	{
		t.add_row({i++, v[0] * unit(o), v[1] * unit(o), v[2] * unit(o)});
	}
	Outputs out;
	out.add("summary.json", serialize_summary(summary));
	out.add("demands.csv", demand_table(o, s, game).to_csv());
	out.add("region.csv", t.to_csv());
	return out;
}

std::vector<double> snr_grid(Options const& o)
{
	if (!o.snr.empty())
	{
		return o.snr;
	}
	if (!(o.snr_step > 0.0) || o.snr_max < o.snr_min)
	{
		throw InvalidArgument("SNR grid needs --snr-step > 0 and --snr-max >= --snr-min");
	}
	std::vector<double> grid;
	int const n = static_cast<int>(std::floor((o.snr_max - o.snr_min) / o.snr_step + 1e-9));
	for (int i = 0; i <= n; ++i)
	{
		grid.push_back(o.snr_min + i * o.snr_step);
	}
	return grid;
}

Outputs cmd_sweep(Options const& o)
{
	SweepSpec spec;
	spec.users = o.users.empty() ? std::vector<int>{2, 3, 4, 5, 6, 7, 8} : o.users;
	spec.snr_db = snr_grid(o);
	spec.power = power_of(o);
	spec.seed = o.seed;
	spec.solver = solver_options(o);
	spec.core = core_options(o);
	auto const results = snr_boundary(spec, model_of(o));

	ResultTable grid = table("sweep", o, std::nullopt, {"K", "snr_db", "verdict"});
	grid.add_header("model", std::string(model_name(model_of(o))));
	grid.add_header("power", o.power);
	ResultTable bounds = table("sweep-boundary", o, std::nullopt,
	                           {"K", "threshold_db", "monotone", "low_db", "high_db", "boundary_db", "note"});
	bounds.add_header("resolution_db", format_number(spec.resolution_db));
	for (auto const& r : results)
	{
		for (std::size_t i = 0; i < spec.snr_db.size(); ++i)
		{
			grid.add_row({static_cast<long long>(r.users), spec.snr_db[i], std::string(verdict_name(r.grid[i]))});
		}
		std::string const threshold = r.threshold_db ? format_number(*r.threshold_db) : std::string("");
		if (r.transitions.empty())
		{
			bounds.add_row({static_cast<long long>(r.users), threshold, std::string(r.monotone ? "yes" : "no"),
			                std::string(""), std::string(""), std::string(""), r.note});
		}
		for (auto const& tr : r.transitions)
		{
			bounds.add_row({static_cast<long long>(r.users), threshold, std::string(r.monotone ? "yes" : "no"),
			                tr.low_db, tr.high_db, tr.boundary_db, r.note});
		}
	}
	Outputs out;
	out.add("sweep.csv", grid.to_csv());
	out.add("boundary.csv", bounds.to_csv());
	return out;
}

Outputs cmd_externalities(Options const& o)
{
	Scenario const s = require_scenario(o);
	ExternalityVerdict const v = classify_externalities(s, o.trials, o.seed, solver_options(o));
	ResultTable t = table("externalities", o, s, {"before", "after", "coalition", "utility_before", "utility_after",
	                                              "change"});
	t.add_header("classification", std::string(externality_name(v.classification)));
	t.add_header("negative", std::to_string(v.negative_count));
	t.add_header("positive", std::to_string(v.positive_count));
	t.add_header("skipped", std::to_string(v.skipped));
	for (auto const& w : v.witnesses)
	{
		t.add_row({w.before.to_string(), w.after.to_string(), w.coalition.to_string(), w.before_value * unit(o),
		           w.after_value * unit(o), (w.after_value - w.before_value) * unit(o)});
	}
	Outputs out;
	out.add("externalities.csv", t.to_csv());
	return out;
}

Outputs cmd_properties(Options const& o)
{
	Scenario const s = require_scenario(o);
	SuperadditivityReport const r = verify_superadditivity(s, o.trials, o.seed, solver_options(o));
	ResultTable t = table("properties", o, s, {"property", "value"});
	t.add_row({std::string("superadditive"), std::string(r.counterexample ? "fail" : "pass")});
	t.add_row({std::string("cohesive"), std::string(r.cohesion_counterexample ? "fail" : "pass")});
	t.add_row({std::string("trials"), static_cast<long long>(r.trials)});
	t.add_row({std::string("checked"), static_cast<long long>(r.checked)});
	t.add_row({std::string("skipped"), static_cast<long long>(r.skipped)});
	t.add_row({std::string("worst_merge_margin"), r.worst_margin * unit(o)});
	t.add_row({std::string("cohesion_partitions"), static_cast<long long>(r.cohesion_partitions)});
	t.add_row({std::string("worst_cohesion_margin"), r.worst_cohesion_margin * unit(o)});
	if (r.counterexample)
	{
		t.add_row({std::string("counterexample"),
		           r.counterexample->before.to_string() + " -> " + r.counterexample->after.to_string()});
	}
	if (r.cohesion_counterexample)
	{
		t.add_row({std::string("cohesion_counterexample"), r.cohesion_counterexample->to_string()});
	}
	Outputs out;
	out.add("properties.csv", t.to_csv());
	return out;
}

Outputs cmd_ratio(Options const& o)
{
	Scenario const s = require_scenario(o);
	RatioCurve const c = approx_ratio(s, snr_grid(o), solver_options(o));
	ResultTable t = table("ratio", o, s, {"snr_db", "size", "approx", "exact", "ratio"});
	t.add_header("monotonicity_violations", std::to_string(c.monotonicity_violations.size()));
	for (auto const& p : c.points)
	{
		t.add_row({p.snr_db, static_cast<long long>(p.size), p.approx * unit(o), p.exact * unit(o), p.ratio});
	}
	Outputs out;
	out.add("ratio.csv", t.to_csv());
	return out;
}

void emit(Outputs const& outputs, Options const& o, std::ostream& out)
{
	if (o.out.empty())
	{
		bool first = true;
		for (auto const& [name, content] : outputs.items)
		{
			out << (first ? "" : "\n") << content;
			first = false;
		}
		return;
	}
	std::filesystem::path const dir(o.out);
	std::error_code ec;
	std::filesystem::create_directories(dir, ec);
	if (ec)
	{
		throw InvalidArgument("cannot create output directory " + o.out + ": " + ec.message());
	}
	for (auto const& [name, content] : outputs.items)
	{
		std::filesystem::path const path = dir / name;
		std::ofstream f(path, std::ios::binary);
		f << content;
		if (!f)
		{
			throw InvalidArgument("cannot write " + path.string());
		}
		out << path.string() << '\n';
	}
}

} // namespace

int run_command(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
	Options o;
	CLI::App app{"Transmitter cooperation games on the MIMO multiple access channel", "txcoop"};
	app.require_subcommand(1);
	app.set_version_flag("--version", std::string(library_version()));

	auto common = [&](CLI::App* sub) {
		sub->add_option("--out", o.out, "Write outputs into this directory instead of stdout");
		sub->add_option("--seed", o.seed, "Seed for randomized trials")->capture_default_str();
		sub->add_option("--tol-lp", o.tol_lp, "LP feasibility tolerance")->capture_default_str();
		sub->add_option("--tol-solver", o.tol_solver, "Per-antenna solver stationarity tolerance")
		    ->capture_default_str();
		sub->add_flag("--bits", o.bits, "Display utilities in bits (computation stays in nats)");
		sub->add_flag("--timings", o.timings, "Record phase timings in the summary (not byte-reproducible)");
	};
	auto with_scenario = [&](CLI::App* sub) { sub->add_option("--scenario", o.scenario, "Scenario file")->required(); };
	auto with_model = [&](CLI::App* sub) {
		sub->add_option("--model", o.model, "Expectation model: rational, merging, cautious, singleton")
		    ->capture_default_str();
	};
	auto with_snr = [&](CLI::App* sub, double lo, double hi, double step) {
		o.snr_min = lo;
		o.snr_max = hi;
		o.snr_step = step;
		sub->add_option("--snr", o.snr, "Explicit SNR list in dB (overrides the range)")->delimiter(',');
		sub->add_option("--snr-min", o.snr_min, "Lowest SNR (dB)")->capture_default_str();
		sub->add_option("--snr-max", o.snr_max, "Highest SNR (dB)")->capture_default_str();
		sub->add_option("--snr-step", o.snr_step, "SNR step (dB)")->capture_default_str();
	};

	std::vector<std::pair<CLI::App*, std::function<Outputs(Options const&)>>> commands;

	auto* partitions = app.add_subcommand("partitions", "Enumerate set partitions of K users");
	common(partitions);
	partitions->add_option("--k", o.k, "Number of users")->required();
	partitions->add_flag("--count-only", o.count_only, "Print only the number of partitions");
	commands.emplace_back(partitions, cmd_partitions);

	auto* utilities = app.add_subcommand("utilities", "NE utility of every coalition in every partition");
	common(utilities);
	with_scenario(utilities);
	commands.emplace_back(utilities, cmd_utilities);

	auto* core = app.add_subcommand("core", "Core nonemptiness: witness allocation or balanced certificate");
	common(core);
	with_scenario(core);
	with_model(core);
	commands.emplace_back(core, cmd_core);

	auto* least = app.add_subcommand("least-core", "Least core value and allocation");
	common(least);
	with_scenario(least);
	with_model(least);
	commands.emplace_back(least, cmd_least_core);

	auto* region = app.add_subcommand("region", "Core polygon of a 3-user game");
	common(region);
	with_scenario(region);
	with_model(region);
	commands.emplace_back(region, cmd_region);

	auto* sweep = app.add_subcommand("sweep", "Empty/nonempty core boundary over SNR for symmetric SIC games");
	common(sweep);
	with_model(sweep);
	with_snr(sweep, -30.0, 10.0, 1.0);
	sweep->add_option("--k", o.users, "User counts (comma separated)")->delimiter(',');
	sweep->add_option("--power", o.power, "Power constraint: sum or per_antenna")->capture_default_str();
	commands.emplace_back(sweep, cmd_sweep);

	auto* ext = app.add_subcommand("externalities", "Classify externalities from sampled merges");
	common(ext);
	with_scenario(ext);
	ext->add_option("--trials", o.trials, "Number of sampled merges")->capture_default_str();
	commands.emplace_back(ext, cmd_externalities);

	auto* props = app.add_subcommand("properties", "Super-additivity and cohesiveness checks");
	common(props);
	with_scenario(props);
	props->add_option("--trials", o.trials, "Number of sampled merges")->capture_default_str();
	commands.emplace_back(props, cmd_properties);

	auto* ratio = app.add_subcommand("ratio", "High-SNR approximation ratio for time-shared SIC");
	common(ratio);
	with_scenario(ratio);
	with_snr(ratio, -20.0, 60.0, 5.0);
	commands.emplace_back(ratio, cmd_ratio);

	try
	{
		std::vector<std::string> reversed(args.rbegin(), args.rend());
		app.parse(reversed);
	}
	catch (CLI::CallForHelp const& e)
	{
		return app.exit(e, out, err);
	}
	catch (CLI::CallForAllHelp const& e)
	{
		return app.exit(e, out, err);
	}
	catch (CLI::CallForVersion const& e)
	{
		return app.exit(e, out, err);
	}
	catch (CLI::ParseError const& e)
	{
		app.exit(e, err, err);
		err << app.help();
		return exit_user_error;
	}

	try
	{
		for (auto const& [sub, fn] : commands)
		{
			if (sub->parsed())
			{
				emit(fn(o), o, out);
				break;
			}
		}
		return exit_success;
	}
	catch (InvalidArgument const& e)
	{
		err << "error: " << e.what() << '\n';
		return exit_user_error;
	}
	catch (InvalidCovariance const& e)
	{
		err << "error: " << e.what() << '\n';
		return exit_user_error;
	}
	catch (NonConvergence const& e)
	{
		err << "numerical failure: " << e.what() << '\n';
		return exit_numerical_failure;
	}
	catch (NumericalFailure const& e)
	{
		err << "numerical failure: " << e.what() << '\n';
		return exit_numerical_failure;
	}
	catch (std::exception const& e)
	{
		err << "internal error: " << e.what() << '\n';
		return exit_numerical_failure;
	}
}

} // namespace txcoop::cli
