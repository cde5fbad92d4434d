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
#include <txcoop/scenario_io.hpp>

#include <txcoop/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

namespace txcoop {

namespace {

using json = nlohmann::json;

/// A JSON value plus its location, for field-anchored errors.
class Field
{
public:
	Field(json const& value, std::string path, std::string_view source)
	: value_(value), path_(std::move(path)), source_(source)
	{
	}

	[[noreturn]] void fail(std::string const& what) const
	{
		throw InvalidArgument(std::string(source_) + ": field " + (path_.empty() ? "/" : path_) + ": " + what);
	}

	Field member(char const* key) const
	{
		auto const it = object().find(key);
		if (it == value_.end())
		{
			fail(std::string("missing key \"") + key + "\"");
		}
		return Field(*it, path_ + "/" + key, source_);
	}

	bool has(char const* key) const { return object().contains(key); }

	Field element(std::size_t i) const { return Field(array().at(i), path_ + "/" + std::to_string(i), source_); }

	void only_keys(std::initializer_list<char const*> allowed) const
	{
		for (auto const& [key, _] : object().items())
		{
			if (std::ranges::none_of(allowed, [&](char const* a) { return key == a; }))
			{
				fail("unknown key \"" + key + "\"");
			}
		}
	}

	json const& object() const
	{
		if (!value_.is_object())
		{
			fail("expected an object");
		}
		return value_;
	}

	json const& array() const
	{
		if (!value_.is_array())
		{
			fail("expected an array");
		}
		return value_;
	}

	std::size_t size() const { return array().size(); }

	double number() const
	{
		if (!value_.is_number())
		{
			fail("expected a number");
		}
		double const x = value_.get<double>();
		if (!std::isfinite(x))
		{
			fail("number is not finite");
		}
		return x;
	}

	int integer() const
	{
		if (!value_.is_number_integer())
		{
			fail("expected an integer");
		}
		auto const x = value_.get<long long>();
		if (x < -1000000 || x > 1000000)
		{
			fail("integer out of range");
		}
		return static_cast<int>(x);
	}

	std::string text() const
	{
		if (!value_.is_string())
		{
			fail("expected a string");
		}
		return value_.get<std::string>();
	}

	std::vector<double> numbers() const
	{
		std::vector<double> out;
		for (std::size_t i = 0; i < size(); ++i)
		{
			out.push_back(element(i).number());
		}
		return out;
	}

	std::vector<int> integers() const
	{
		std::vector<int> out;
		for (std::size_t i = 0; i < size(); ++i)
		{
			out.push_back(element(i).integer());
		}
		return out;
	}

	std::string const& path() const noexcept { return path_; }

private:
	json const& value_;
	std::string path_;
	std::string_view source_;
};

UserSpec parse_user(Field const& f, int rx_antennas)
{
	f.only_keys({"id", "antennas", "channel", "power"});
	UserSpec u;
	u.id = f.member("id").integer();
	u.antennas = f.member("antennas").integer();
	if (u.antennas < 1)
	{
		f.member("antennas").fail("must be >= 1");
	}
	Field const ch = f.member("channel");
	if (static_cast<int>(ch.size()) != rx_antennas)
	{
		ch.fail("expected " + std::to_string(rx_antennas) + " rows (rx_antennas), got " + std::to_string(ch.size()));
	}
	u.channel.resize(rx_antennas, u.antennas);
	for (int r = 0; r < rx_antennas; ++r)
	{
		Field const row = ch.element(static_cast<std::size_t>(r));
		if (static_cast<int>(row.size()) != u.antennas)
		{
			row.fail("expected " + std::to_string(u.antennas) + " entries (antennas), got "
			         + std::to_string(row.size()));
		}
		for (int c = 0; c < u.antennas; ++c)
		{
			u.channel(r, c) = row.element(static_cast<std::size_t>(c)).number();
		}
	}
	Field const power = f.member("power");
	power.only_keys({"mode", "values"});
	std::string const mode = power.member("mode").text();
	std::vector<double> values = power.member("values").numbers();
	if (std::ranges::any_of(values, [](double v) { return v < 0.0; }))
	{
		power.member("values").fail("power budgets must be >= 0");
	}
	if (mode == "sum")
	{
		if (values.size() != 1)
		{
			power.member("values").fail("sum mode takes exactly one budget");
		}
		u.power = PowerConstraint::sum(values.front());
	}
	else if (mode == "per_antenna")
	{
		if (static_cast<int>(values.size()) != u.antennas)
		{
			power.member("values").fail("per_antenna mode takes one budget per antenna");
		}
		u.power = PowerConstraint::per_antenna(std::move(values));
	}
	else
	{
		power.member("mode").fail("expected \"sum\" or \"per_antenna\", got \"" + mode + "\"");
	}
	return u;
}

ReceiverModel parse_receiver(Field const& f)
{
	std::string const type = f.member("type").text();
	if (type == "sud")
	{
		f.only_keys({"type"});
		return SudReceiver{};
	}
	if (type == "sic_fixed")
	{
		f.only_keys({"type", "base_order"});
		return SicFixedReceiver{f.member("base_order").integers()};
	}
	if (type == "sic_timeshare")
	{
		f.only_keys({"type", "weights"});
		SicTimeShareReceiver r;
		if (f.has("weights"))
		{
			r.weights = f.member("weights").numbers();
		}
		return r;
	}
	f.member("type").fail("expected \"sud\", \"sic_fixed\" or \"sic_timeshare\", got \"" + type + "\"");
}

double round12(double x) { return std::stod(format_number(x)); }

json number_or_null(std::optional<double> x)
{
	if (!x || !std::isfinite(*x))
	{
		return nullptr;
	}
	return round12(*x);
}

std::string csv_escape(std::string const& s)
{
	if (s.find_first_of(",\"\n") == std::string::npos)
	{
		return s;
	}
	std::string out = "\"";
	for (char c : s)
	{
		if (c == '"')
		{
			out += '"';
		}
		out += c;
	}
	return out + "\"";
}

} // namespace

std::string_view library_version() { return TXCOOP_VERSION; }

Scenario parse_scenario(std::string_view text, std::string_view source)
{
	json doc;
	try
	{
		doc = json::parse(text.begin(), text.end());
	}
	catch (json::parse_error const& e)
	{
		std::size_t const byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
		auto const head = text.substr(0, byte);
		std::size_t const line = 1 + static_cast<std::size_t>(std::ranges::count(head, '\n'));
		std::size_t const nl = head.rfind('\n');
		std::size_t const column = nl == std::string_view::npos ? byte + 1 : byte - nl;
		std::string what = e.what();
		if (auto p = what.find("syntax error"); p != std::string::npos)
		{
			what = what.substr(p);
		}
		throw InvalidArgument(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) + ": "
		                      + what);
	}

	Field const root(doc, "", source);
	root.only_keys({"users", "rx_antennas", "noise_N0", "receiver"});
	int const m = root.member("rx_antennas").integer();
	if (m < 1)
	{
		root.member("rx_antennas").fail("must be >= 1");
	}
	double const noise = root.member("noise_N0").number();
	Field const users = root.member("users");
	std::vector<UserSpec> specs;
	for (std::size_t i = 0; i < users.size(); ++i)
	{
		specs.push_back(parse_user(users.element(i), m));
	}
	ReceiverModel receiver = parse_receiver(root.member("receiver"));
	try
	{
		return Scenario(std::move(specs), m, noise, std::move(receiver));
	}
	catch (InvalidArgument const& e)
	{
		root.fail(e.what());
	}
}

Scenario load_scenario(std::string const& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
	{
		throw InvalidArgument("cannot open scenario file " + path);
	}
	std::ostringstream buf;
	buf << in.rdbuf();
	return parse_scenario(buf.str(), path);
}

std::string serialize_scenario(Scenario const& scenario)
{
	json doc;
	doc["rx_antennas"] = scenario.rx_antennas();
	doc["noise_N0"] = scenario.noise();
	json users = json::array();
	for (UserSpec const& u : scenario.users())
	{
		json channel = json::array();
		for (Eigen::Index r = 0; r < u.channel.rows(); ++r)
		{
			json row = json::array();
			for (Eigen::Index c = 0; c < u.channel.cols(); ++c)
			{
				row.push_back(u.channel(r, c));
			}
			channel.push_back(std::move(row));
		}
		users.push_back({{"id", u.id},
		                 {"antennas", u.antennas},
		                 {"channel", std::move(channel)},
		                 {"power",
		                  {{"mode", u.power.mode() == PowerMode::sum ? "sum" : "per_antenna"},
		                   {"values", u.power.values()}}}});
	}
	doc["users"] = std::move(users);
	json receiver = {{"type", receiver_name(scenario.receiver())}};
	if (auto const* sic = std::get_if<SicFixedReceiver>(&scenario.receiver()))
	{
		receiver["base_order"] = sic->base_order;
	}
	else if (auto const* ts = std::get_if<SicTimeShareReceiver>(&scenario.receiver()))
	{
		receiver["weights"] = ts->weights;
	}
	doc["receiver"] = std::move(receiver);
	return doc.dump(2) + "\n";
}

std::string format_number(double value)
{
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.12g", value);
	return buf;
}

std::string format_fingerprint(std::uint64_t fingerprint)
{
	char buf[20];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
	return buf;
}

// ---------------------------------------------------------------------------

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns))
{
	if (columns_.empty())
	{
		throw InvalidArgument("result table needs at least one column");
	}
}

void ResultTable::add_header(std::string key, std::string value) { header_.emplace_back(std::move(key), std::move(value)); }

void ResultTable::add_row(std::vector<Cell> row)
{
	if (row.size() != columns_.size())
	{
		throw InvalidArgument("row has " + std::to_string(row.size()) + " cells, table has "
		                      + std::to_string(columns_.size()) + " columns");
	}
	rows_.push_back(std::move(row));
}

void ResultTable::write_csv(std::ostream& out) const
{
	for (auto const& [key, value] : header_)
	{
		out << "# " << key << ": " << value << '\n';
	}
	for (std::size_t i = 0; i < columns_.size(); ++i)
	{
		out << (i ? "," : "") << csv_escape(columns_[i]);
	}
	out << '\n';
	for (auto const& row : rows_)
	{
		for (std::size_t i = 0; i < row.size(); ++i)
		{
			if (i)
			{
				out << ',';
			}
			std::visit(
			    [&](auto const& v) {
				    using V = std::decay_t<decltype(v)>;
				    if constexpr (std::is_same_v<V, double>)
				    {
					    out << format_number(v);
				    }
				    else if constexpr (std::is_same_v<V, long long>)
				    {
					    out << v;
				    }
				    else
				    {
					    out << csv_escape(v);
				    }
			    },
			    row[i]);
		}
		out << '\n';
	}
}

std::string ResultTable::to_csv() const
{
	std::ostringstream out;
	write_csv(out);
	return out.str();
}

std::string serialize_summary(Summary const& summary)
{
	json doc;
	doc["verdict"] = summary.verdict ? json(*summary.verdict) : json(nullptr);
	doc["epsilon_star"] = number_or_null(summary.epsilon_star);
	if (summary.allocation)
	{
		json a = json::array();
		for (double x : *summary.allocation)
		{
			a.push_back(number_or_null(x));
		}
		doc["allocation"] = std::move(a);
	}
	else
	{
		doc["allocation"] = nullptr;
	}
	if (summary.certificate)
	{
		json w = json::array();
		for (auto const& [label, lambda] : *summary.certificate)
		{
			w.push_back({{"coalition", label}, {"lambda", number_or_null(lambda)}});
		}
		doc["certificate"] = {{"weights", std::move(w)}, {"margin", number_or_null(summary.certificate_margin)}};
	}
	else
	{
		doc["certificate"] = nullptr;
	}
	if (summary.timings)
	{
		json t = json::object();
		for (auto const& [phase, seconds] : *summary.timings)
		{
			t[phase] = number_or_null(seconds);
		}
		doc["timings"] = std::move(t);
	}
	else
	{
		doc["timings"] = nullptr;
	}
	return doc.dump(2) + "\n";
}

} // namespace txcoop
