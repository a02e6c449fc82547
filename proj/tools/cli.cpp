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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string_view>

#include "symq/decomposition.hpp"
#include "symq/error.hpp"
#include "symq/flipping.hpp"
#include "symq/lattice.hpp"
#include "symq/oracle.hpp"
#include "symq/query.hpp"
#include "symq/relevance.hpp"
#include "symq/search.hpp"

namespace symq::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitError = 2;

struct CommonOptions {
  std::string table;
  std::string oracle_cmd;
  std::string synthetic;
  std::optional<int> n;
  bool full = false;
  int max_order = 4;
  std::string weights = "occlusion";
  std::string vocab;
  std::uint64_t seed = 0;
  std::string out;
};

void AddCommonOptions(CLI::App& cmd, CommonOptions& o) {
  auto* table = cmd.add_option("--table", o.table, "Value table JSON file");
  auto* oracle =
      cmd.add_option("--oracle-cmd", o.oracle_cmd, "Adapter command line");
  auto* synthetic = cmd.add_option(
      "--synthetic", o.synthetic, "Synthetic game spec: inline JSON or @FILE");
  table->excludes(oracle, synthetic);
  oracle->excludes(table, synthetic);
  synthetic->excludes(table, oracle);
  cmd.add_option("--n", o.n, "Expected feature count");
  auto* full = cmd.add_flag("--full", o.full, "Use the full subset lattice");
  cmd.add_option("--max-order", o.max_order,
                 "Truncation order of the support")
      ->excludes(full);
  cmd.add_option("--weights", o.weights, "Weight rule")
      ->check(CLI::IsMember({"occlusion", "shapley", "query-shapley"}));
  cmd.add_option("--vocab", o.vocab, "Ordered token file");
  cmd.add_option("--seed", o.seed, "Seed for synthetic games and baselines");
  cmd.add_option("--out", o.out, "Output file (default stdout)");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> LoadVocabulary(const std::string& path) {
  std::vector<std::string> tokens;
  if (path.empty()) return tokens;
  std::istringstream in(ReadFile(path));
  for (std::string token; in >> token;) tokens.push_back(token);
  return tokens;
}

Json ParseJsonArgument(const std::string& text, const std::string& what) {
  const std::string body = !text.empty() && text[0] == '@'
                               ? ReadFile(text.substr(1))
                               : text;
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument,
                what + " is not valid JSON: " + e.what());
  }
}

template <typename T>
T Field(const Json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("synthetic field \"") + key +
                    "\" has the wrong type");
  }
}

int RequiredN(const Json& doc) {
  if (!doc.contains("n")) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic spec needs \"n\"");
  }
  return Field<int>(doc, "n", 0);
}

SyntheticGameSpec ParseSynthetic(const std::string& text,
                                 const CommonOptions& o,
                                 std::span<const std::string> vocab) {
  const Json doc = ParseJsonArgument(text, "synthetic spec");
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic spec must be a JSON object");
  }
  const std::string kind = Field<std::string>(doc, "kind", "");
  if (kind == "multilinear") {
    MultilinearGame game;
    game.n = RequiredN(doc);
    if (doc.contains("coefficients")) {
      if (!doc["coefficients"].is_object()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "\"coefficients\" must be an object");
      }
      for (const auto& [key, value] : doc["coefficients"].items()) {
        if (!value.is_number()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "coefficient for \"" + key + "\" is not a number");
        }
        game.coefficients[ParseSubsetKey(key, game.n).bits()] =
            value.get<double>();
      }
    }
    return game;
  }
  if (kind == "additive") {
    AdditiveGame game;
    game.weights = Field<std::vector<double>>(doc, "weights", {});
    return game;
  }
  if (kind == "planted") {
    PlantedQueryGame game;
    game.n = RequiredN(doc);
    game.query = ParseQuery(Field<std::string>(doc, "query", ""), vocab,
                            game.n);
    game.signal = Field<double>(doc, "signal", 1.0);
    game.noise_scale = Field<double>(doc, "noise_scale", 0.0);
    game.noise_seed = Field<std::uint64_t>(doc, "noise_seed", o.seed);
    return game;
  }
  if (kind == "random") {
    const int n = RequiredN(doc);
    return RandomMultilinearGame(n, Field<int>(doc, "max_order", n),
                                 Field<std::uint64_t>(doc, "seed", o.seed),
                                 Field<double>(doc, "density", 1.0),
                                 Field<double>(doc, "scale", 1.0));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "synthetic \"kind\" must be multilinear, additive, planted or "
              "random");
}

ValueOracle MakeOracle(const CommonOptions& o,
                       std::span<const std::string> vocab) {
  std::optional<ValueOracle> oracle;
  if (!o.table.empty()) {
    oracle.emplace(ValueOracle::FromTable(LoadValueTable(o.table)));
  } else if (!o.oracle_cmd.empty()) {
    ExternalOracleOptions options;
    options.command = o.oracle_cmd;
    options.timeout = OracleTimeoutFromEnvironment();
    options.expected_n = o.n;
    oracle.emplace(ValueOracle::FromExternal(options));
  } else if (!o.synthetic.empty()) {
    oracle.emplace(
        ValueOracle::FromSynthetic(ParseSynthetic(o.synthetic, o, vocab)));
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "one of --table, --oracle-cmd or --synthetic is required");
  }
  if (o.n && *o.n != oracle->n()) {
    throw Error(ErrorCode::kShapeMismatch,
                "model has " + std::to_string(oracle->n()) +
                    " features, --n says " + std::to_string(*o.n));
  }
  return std::move(*oracle);
}

SupportMode ModeOf(const CommonOptions& o, int n) {
  if (o.full) return SupportMode::Full();
  // A truncation order at or above n is the full lattice.
  if (o.max_order >= n) return SupportMode::Full();
  return SupportMode::Truncated(o.max_order);
}

Json SupportJson(const SupportMode& mode) {
  Json s;
  s["mode"] = mode.is_full() ? "full" : "truncated";
  s["k"] = mode.is_full() ? Json(nullptr) : Json(mode.max_order);
  return s;
}

void Emit(const Json& doc, const CommonOptions& o, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write " + o.out);
  file << text;
  if (!file) throw Error(ErrorCode::kIoError, "write to " + o.out + " failed");
}

void RunDecompose(const CommonOptions& o, std::ostream& out) {
  const std::vector<std::string> vocab = LoadVocabulary(o.vocab);
  ValueOracle oracle = MakeOracle(o, vocab);
  const LatticeSupport support =
      LatticeSupport::Enumerate(oracle.n(), ModeOf(o, oracle.n()));
  const MultiOrderDecomposition d = DecomposePerturbation(oracle, support);
  Json doc;
  doc["n"] = oracle.n();
  const Json s = SupportJson(support.mode());
  doc["mode"] = s["mode"];
  doc["k"] = s["k"];
  Json mu = Json::object();
  for (std::size_t p = 0; p < support.size(); ++p) {
    mu[SubsetKey(support.bits_at(p))] = d.mu[p];
  }
  doc["mu"] = std::move(mu);
  doc["conservation_residual"] = ConservationResidual(d, oracle);
  Emit(doc, o, out);
}

void RunRelevance(const CommonOptions& o,
                  const std::vector<std::string>& query_texts,
                  bool permissive, std::ostream& out) {
  const std::vector<std::string> vocab = LoadVocabulary(o.vocab);
  ValueOracle oracle = MakeOracle(o, vocab);
  const int n = oracle.n();
  std::vector<Query> queries;
  for (const std::string& text : query_texts) {
    queries.push_back(ParseQuery(text, vocab, n));
  }
  const LatticeSupport support = LatticeSupport::Enumerate(n, ModeOf(o, n));
  const MultiOrderDecomposition d = DecomposePerturbation(oracle, support);

  std::vector<double> values;
  std::optional<double> uncovered;
  if (o.weights == "query-shapley") {
    const QuerySetShapleyResult r = QuerySetShapleyValues(
        d, queries,
        permissive ? Strictness::kPermissive : Strictness::kStrict);
    values = r.values;
    if (permissive) uncovered = r.uncovered_mass;
  } else {
    const WeightVector eta = o.weights == "shapley"
                                 ? WeightVector::ClassicShapley()
                                 : WeightVector::Occlusion();
    values = QueryRelevances(d, queries, eta);
  }

  Json records = Json::array();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Json r;
    r["query"] = CanonicalString(queries[i], vocab);
    r["relevance"] = values[i];
    r["weights"] = o.weights;
    r["support"] = SupportJson(support.mode());
    if (uncovered) r["uncovered_mass"] = *uncovered;
    records.push_back(std::move(r));
  }
  Emit(records, o, out);
}

std::vector<std::uint64_t> ParseAtoms(const std::string& text, int n) {
  if (text == "singletons") return SingletonAtoms(n);
  constexpr std::string_view kConsecutive = "consecutive:";
  if (text.rfind(kConsecutive, 0) == 0) {
    const std::string rest = text.substr(kConsecutive.size());
    int length = 0;
    try {
      std::size_t used = 0;
      length = std::stoi(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(rest);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bad atom length in \"" + text + "\"");
    }
    if (length < 1) {
      throw Error(ErrorCode::kInvalidArgument, "atom length must be >= 1");
    }
    return ConsecutiveAtoms(n, length);
  }
  // Explicit list of subset keys separated by ';', e.g. "0,1;2;3,4".
  std::vector<std::uint64_t> atoms;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    const std::string key = text.substr(start, end - start);
    const std::uint64_t bits = ParseSubsetKey(key, n).bits();
    if (bits == 0) {
      throw Error(ErrorCode::kInvalidArgument, "empty atom in --atoms");
    }
    atoms.push_back(bits);
    start = end + 1;
  }
  return atoms;
}

struct SearchOptions {
  std::string atoms = "singletons";
  std::size_t top_k = 10;
  int max_conjunctions = 2;
  bool no_negation = false;
  bool overlapping = false;
  bool consecutive_only = false;
  std::size_t max_queries = kDefaultMaxQueries;
  std::vector<std::string> query_set;
  bool permissive = false;
};

void RunSearch(const CommonOptions& o, const SearchOptions& s,
               std::ostream& out) {
  const std::vector<std::string> vocab = LoadVocabulary(o.vocab);
  ValueOracle oracle = MakeOracle(o, vocab);
  const int n = oracle.n();
  QuerySpaceSpec spec;
  spec.atoms = ParseAtoms(s.atoms, n);
  spec.max_conjunctions = s.max_conjunctions;
  spec.allow_negated_literals = !s.no_negation;
  spec.disjoint_literals = !s.overlapping;
  spec.consecutive_atoms_only = s.consecutive_only;
  spec.max_queries = s.max_queries;
  // Validate the space before paying for the decomposition.
  GenerateQuerySpace(spec, n);

  const LatticeSupport support = LatticeSupport::Enumerate(n, ModeOf(o, n));
  const MultiOrderDecomposition d = DecomposePerturbation(oracle, support);
  WeightVector eta = WeightVector::Occlusion();
  if (o.weights == "shapley") {
    eta = WeightVector::ClassicShapley();
  } else if (o.weights == "query-shapley") {
    if (s.query_set.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--weights query-shapley needs --query-set");
    }
    std::vector<Query> set;
    for (const std::string& text : s.query_set) {
      set.push_back(ParseQuery(text, vocab, n));
    }
    eta = WeightVector::QuerySetShapley(
        std::move(set),
        s.permissive ? Strictness::kPermissive : Strictness::kStrict);
  }
  const SearchResult result = FindBestQueries(d, spec, eta, s.top_k);
  Json doc;
  Json results = Json::array();
  for (const RankedQuery& r : result.ranked) {
    Json entry;
    entry["query"] = CanonicalString(r.query, vocab);
    entry["score"] = r.score;
    results.push_back(std::move(entry));
  }
  doc["results"] = std::move(results);
  doc["space_size"] = result.space_size;
  Emit(doc, o, out);
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<double> LoadScores(const std::string& path, int n) {
  const Json doc = ParseJsonArgument("@" + path, "scores file " + path);
  if (!doc.is_array() ||
      !std::all_of(doc.begin(), doc.end(),
                   [](const Json& v) { return v.is_number(); })) {
    throw Error(ErrorCode::kInvalidArgument,
                "scores file " + path + " must be a JSON array of numbers");
  }
  std::vector<double> scores = doc.get<std::vector<double>>();
  if (scores.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kShapeMismatch,
                "scores file " + path + " has " +
                    std::to_string(scores.size()) + " entries for " +
                    std::to_string(n) + " features");
  }
  return scores;
}

struct FlipOptions {
  std::string methods = "symbxai,occlusion,random";
  std::vector<std::string> scores;  // name=FILE
  std::string tasks = "removal,generation";
  int samples = 1;
  bool curves = false;
};

Json CurveJson(const FlipCurve& c) {
  Json j;
  j["task"] = FlipTaskName(c.task);
  j["objective"] =
      c.objective ? Json(FlipObjectiveName(*c.objective)) : Json(nullptr);
  j["order"] = c.order;
  j["values"] = c.values;
  j["area"] = c.area;
  return j;
}

void RunFlip(const CommonOptions& o, const FlipOptions& f, std::ostream& out) {
  const std::vector<std::string> vocab = LoadVocabulary(o.vocab);
  ValueOracle oracle = MakeOracle(o, vocab);
  const int n = oracle.n();

  std::map<std::string, std::string> score_files;
  for (const std::string& entry : f.scores) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--scores expects NAME=FILE, got \"" + entry + "\"");
    }
    score_files[entry.substr(0, eq)] = entry.substr(eq + 1);
  }

  std::vector<FlipTask> tasks;
  for (const std::string& t : SplitList(f.tasks)) {
    if (t == "removal") {
      tasks.push_back(FlipTask::kRemoval);
    } else if (t == "generation") {
      tasks.push_back(FlipTask::kGeneration);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown task \"" + t + "\"");
    }
  }
  if (tasks.empty()) throw Error(ErrorCode::kInvalidArgument, "no tasks");

  std::vector<FlipMethod> methods;
  for (const std::string& name : SplitList(f.methods)) {
    if (name == "symbxai") {
      const LatticeSupport support =
          LatticeSupport::Enumerate(n, ModeOf(o, n));
      methods.push_back(SymbXaiMethod(DecomposePerturbation(oracle, support)));
    } else if (name == "random") {
      methods.push_back(RandomMethod(o.seed, f.samples));
    } else if (name == "occlusion" && !score_files.count(name)) {
      methods.push_back(FirstOrderMethod(name, OcclusionScores(oracle)));
    } else {
      const auto it = score_files.find(name);
      if (it == score_files.end()) {
        throw Error(ErrorCode::kIoError,
                    "method \"" + name + "\" needs --scores " + name +
                        "=FILE");
      }
      methods.push_back(FirstOrderMethod(name, LoadScores(it->second, n)));
    }
  }
  if (methods.empty()) throw Error(ErrorCode::kInvalidArgument, "no methods");

  Json doc = Json::object();
  for (const MethodAreas& row : CompareMethods(oracle, methods, tasks)) {
    Json j;
    auto put = [&j](const char* key, const std::optional<double>& v) {
      if (v) j[key] = *v;
    };
    put("min_aurc", row.min_aurc);
    put("max_aurc", row.max_aurc);
    put("min_augc", row.min_augc);
    put("max_augc", row.max_augc);
    if (f.curves) {
      Json curves = Json::array();
      for (const FlipCurve& c : row.curves) curves.push_back(CurveJson(c));
      j["curves"] = std::move(curves);
    }
    doc[row.method] = std::move(j);
  }
  Emit(doc, o, out);
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Symbolic multi-order relevance queries", "symq"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* decompose = app.add_subcommand(
      "decompose", "Harsanyi dividends of the model on the chosen support");
  AddCommonOptions(*decompose, common);

  auto* relevance =
      app.add_subcommand("relevance", "Relevance of one or more queries");
  AddCommonOptions(*relevance, common);
  std::vector<std::string> queries;
  bool permissive = false;
  relevance->add_option("--query", queries, "Query expression (repeatable)")
      ->required();
  relevance->add_flag("--permissive", permissive,
                      "Tolerate subsets no query covers (query-shapley)");

  auto* search =
      app.add_subcommand("search", "Rank the queries of a query space");
  AddCommonOptions(*search, common);
  SearchOptions search_options;
  search->add_option("--atoms", search_options.atoms,
                     "singletons | consecutive:L | KEY;KEY;...");
  search->add_option("--top-k", search_options.top_k, "Results to report")
      ->check(CLI::PositiveNumber);
  search->add_option("--max-conjunctions", search_options.max_conjunctions,
                     "Maximum '&' per query")
      ->check(CLI::NonNegativeNumber);
  search->add_flag("--no-negation", search_options.no_negation,
                   "Only positive literals");
  search->add_flag("--overlapping", search_options.overlapping,
                   "Allow atoms sharing features in one query");
  search->add_flag("--consecutive-only", search_options.consecutive_only,
                   "Drop non-contiguous atoms");
  search->add_option("--max-queries", search_options.max_queries,
                     "Cap on the query space size");
  search->add_option("--query-set", search_options.query_set,
                     "Query set defining query-shapley weights (repeatable)");
  search->add_flag("--permissive", search_options.permissive,
                   "Tolerate subsets the query set does not cover");

  auto* flip =
      app.add_subcommand("flip", "Compare input-flipping curve areas");
  AddCommonOptions(*flip, common);
  FlipOptions flip_options;
  flip->add_option("--methods", flip_options.methods,
                   "Comma list: symbxai, random, occlusion or a --scores name");
  flip->add_option("--scores", flip_options.scores,
                   "NAME=FILE first-order scores (JSON array, repeatable)");
  flip->add_option("--tasks", flip_options.tasks,
                   "Comma list of removal, generation");
  flip->add_option("--samples", flip_options.samples,
                   "Random orderings averaged per objective")
      ->check(CLI::PositiveNumber);
  flip->add_flag("--curves", flip_options.curves, "Include curve values");

  std::vector<const char*> argv{"symq"};
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "symq: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (decompose->parsed()) {
      RunDecompose(common, out);
    } else if (relevance->parsed()) {
      RunRelevance(common, queries, permissive, out);
    } else if (search->parsed()) {
      RunSearch(common, search_options, out);
    } else if (flip->parsed()) {
      RunFlip(common, flip_options, out);
    }
  } catch (const Error& e) {
    err << "symq: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "symq: internal error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}

}  // namespace symq::cli
