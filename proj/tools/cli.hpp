// Copyright 2026 The symq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The symq command-line interface, callable in-process for tests.

#ifndef SYMQ_TOOLS_CLI_HPP_
#define SYMQ_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace symq::cli {

// Runs one command. `args` excludes the program name. Returns the process
// exit status: 0 on success, 2 on any usage or runtime error (diagnostic on
// `err`).
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace symq::cli

#endif  // SYMQ_TOOLS_CLI_HPP_
