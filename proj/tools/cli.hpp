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
#ifndef TXCOOP_TOOLS_CLI_HPP
#define TXCOOP_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace txcoop::cli {

enum ExitCode : int
{
	exit_success = 0,
	exit_user_error = 1,
	exit_numerical_failure = 2
};

/// Runs one subcommand. args excludes the program name. Tables and summaries
/// go to `out` (or to files under --out), diagnostics to `err`.
int run_command(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

} // namespace txcoop::cli

#endif // TXCOOP_TOOLS_CLI_HPP
