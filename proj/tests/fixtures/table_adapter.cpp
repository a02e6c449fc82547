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

// Test adapter for the subprocess oracle protocol. Serves a value table:
//
//   table_adapter TABLE.json [--swap] [--error-on KEY] [--announce-n N]
//                            [--hang] [--exit-after-handshake] [--raw-bias B]
//
// --swap answers requests in reverse arrival order whenever input pauses,
// --error-on replies with an error line for that subset, --raw-bias adds a
// constant to every value (the engine must subtract it again).

#include <poll.h>
#include <unistd.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "symq/error.hpp"
#include "symq/lattice.hpp"
#include "symq/oracle.hpp"

namespace {

using json = nlohmann::json;

struct Options {
  std::string table;
  bool swap = false;
  std::string error_on;
  int announce_n = -1;
  bool hang = false;
  bool exit_after_handshake = false;
  double raw_bias = 0.0;
};

void WriteLine(const std::string& line) {
  std::fwrite(line.data(), 1, line.size(), stdout);
  std::fputc('\n', stdout);
  std::fflush(stdout);
}

bool InputPending(int timeout_ms) {
  pollfd p{STDIN_FILENO, POLLIN, 0};
  return ::poll(&p, 1, timeout_ms) > 0;
}

std::string Answer(const std::string& line, const symq::ValueTable& table,
                   const Options& o) {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::parse_error&) {
    return json{{"id", nullptr}, {"error", "request is not JSON"}}.dump();
  }
  if (!request.is_object() || !request.contains("id") ||
      !request["id"].is_number_integer()) {
    return json{{"id", nullptr}, {"error", "request has no integer id"}}
        .dump();
  }
  const json id = request["id"];
  if (!request.contains("subset") || !request["subset"].is_array()) {
    return json{{"id", id}, {"error", "request has no subset"}}.dump();
  }
  std::uint64_t bits = 0;
  for (const json& f : request["subset"]) {
    if (!f.is_number_integer() || f.get<int>() < 0 ||
        f.get<int>() >= table.n) {
      return json{{"id", id}, {"error", "bad feature index"}}.dump();
    }
    bits |= std::uint64_t{1} << f.get<int>();
  }
  if (!o.error_on.empty() && symq::SubsetKey(bits) == o.error_on) {
    return json{{"id", id}, {"error", "refusing subset " + o.error_on}}
        .dump();
  }
  const auto it = table.values.find(bits);
  if (it == table.values.end()) {
    return json{{"id", id}, {"error", "subset missing from table"}}.dump();
  }
  return json{{"id", id}, {"value", it->second + o.raw_bias}}.dump();
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) std::exit(64);
      return argv[++i];
    };
    if (a == "--swap") {
      o.swap = true;
    } else if (a == "--error-on") {
      o.error_on = next();
    } else if (a == "--announce-n") {
      o.announce_n = std::stoi(next());
    } else if (a == "--hang") {
      o.hang = true;
    } else if (a == "--exit-after-handshake") {
      o.exit_after_handshake = true;
    } else if (a == "--raw-bias") {
      o.raw_bias = std::stod(next());
    } else {
      o.table = a;
    }
  }
  symq::ValueTable table;
  try {
    table = symq::LoadValueTable(o.table);
  } catch (const symq::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  WriteLine(json{{"n", o.announce_n >= 0 ? o.announce_n : table.n},
                 {"name", "table-adapter"}}
                .dump());
  if (o.exit_after_handshake) return 0;

  std::vector<std::string> pending;
  std::string line;
  while (true) {
    if (o.swap && !pending.empty() && std::cin.rdbuf()->in_avail() <= 0 &&
        !InputPending(20)) {
      for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
        WriteLine(*it);
      }
      pending.clear();
    }
    if (!std::getline(std::cin, line)) break;
    if (line.empty()) continue;
    if (o.hang) continue;
    std::string reply = Answer(line, table, o);
    if (o.swap) {
      pending.push_back(std::move(reply));
    } else {
      WriteLine(reply);
    }
  }
  for (auto it = pending.rbegin(); it != pending.rend(); ++it) WriteLine(*it);
  return 0;
}
