// Copyright 2026 The ospkit Authors.
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

#include "ospkit/cli.h"

#include <chrono>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ospkit/cmon.h"
#include "ospkit/experiment.h"
#include "ospkit/fixtures.h"
#include "ospkit/greedy.h"
#include "ospkit/mechanism_io.h"
#include "ospkit/psystem.h"
#include "ospkit/search.h"
#include "ospkit/tree_transform.h"
#include "ospkit/verifier.h"

namespace ospkit {

namespace {

using nlohmann::json;

// Input problems detected by the front end itself.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
  bool timing = false;

  std::string mechanism;
  std::string instance;
  std::string horizon = "0";
  std::size_t cap = 20;

  std::string dump_graph;
  std::string truth;
  std::string ratio = "1";
  bool forward_only = false;
  std::string fixture;
  std::vector<std::string> fixtures;
  std::vector<std::string> instances;
  std::string ks;
};

json RatJson(const Rat& r) { return r.ToString(); }

json ProfileJson(const Profile& p) {
  json a = json::array();
  for (const Rat& x : p) a.push_back(x.ToString());
  return a;
}

json SetJson(ElementSet s) {
  json a = json::array();
  for (int e : Elements(s)) a.push_back(e);
  return a;
}

class Emitter {
 public:
  Emitter(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  void Text(const std::string& text) const {
    if (o_.out.empty()) {
      out_ << text;
    } else {
      WriteTextFile(o_.out, text);
    }
  }

  void Json(json doc, double ms) const {
    if (o_.timing) doc["timing_ms"] = ms;
    Text(doc.dump(2) + "\n");
  }

 private:
  const Options& o_;
  std::ostream& out_;
};

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

void RequireJson(const Options& o) {
  if (o.format != "json") {
    throw UsageError("--format " + o.format + " is only offered by experiment");
  }
}

ImplementationTree LoadMechanism(const Options& o) {
  if (o.mechanism.empty()) throw UsageError("--mechanism is required");
  return ReadMechanismFile(o.mechanism);
}

Instance LoadInstance(const std::string& path) {
  if (path.empty()) throw UsageError("--instance is required");
  return ReadInstanceFile(path);
}

json PerAgentQueries(const ImplementationTree& t) {
  json a = json::array();
  for (int i = 0; i < t.agents; ++i) {
    int best = 0;
    for (const Node& n : t.nodes) {
      if (n.leaf) best = std::max(best, query_count(t, i, n.id));
    }
    a.push_back({{"agent", i}, {"max_queries", best}});
  }
  return a;
}

// Runs a structural check, reporting inapplicable input instead of failing.
template <typename F>
json Guarded(F&& check) {
  try {
    return check();
  } catch (const TreeError& e) {
    return {{"applicable", false}, {"reason", e.what()}};
  }
}

int CmdVerify(const Options& o, const Emitter& emit) {
  RequireJson(o);
  Stopwatch sw;
  const ImplementationTree tree = LoadMechanism(o);
  const Horizon k = Horizon::Parse(o.horizon);
  const OspVerdict v = check_k_step_osp(tree, k, o.cap);

  json violations = json::array();
  for (const Constraint& c : v.violations) {
    violations.push_back({{"agent", c.agent},
                          {"node", c.node},
                          {"a", ProfileJson(c.a)},
                          {"b", ProfileJson(c.b)},
                          {"c", RatJson(c.c)},
                          {"lhs", RatJson(c.lhs)},
                          {"rhs", RatJson(c.rhs)}});
  }
  json structural;
  structural["almost_ordered"] = Guarded([&]() -> json {
    AlmostOrderedVerdict a = is_almost_ordered(tree, k);
    json j = {{"applicable", true}, {"pass", a.pass}};
    if (!a.pass) {
      j["witness"] = {{"agent", a.agent},      {"node", a.node},
                      {"a", ProfileJson(a.a)}, {"b", ProfileJson(a.b)},
                      {"c", RatJson(a.c)},     {"d", RatJson(a.d)}};
    }
    return j;
  });
  structural["k_limited"] = Guarded([&]() -> json {
    KLimitedVerdict kl = is_k_limited(tree, k);
    json j = {{"applicable", true}, {"pass", kl.pass}};
    if (!kl.pass) {
      j["witness"] = {{"agent", kl.agent},
                      {"node", kl.node},
                      {"leaf", kl.leaf},
                      {"reason", kl.reason}};
    }
    return j;
  });
  structural["taxation"] = Guarded([&]() -> json {
    auto diag = taxation_diagnostics(tree, k);
    json list = json::array();
    for (std::size_t i = 0; i < diag.size() && i < o.cap; ++i) {
      const TaxationViolation& t = diag[i];
      list.push_back({{"kind", t.kind},
                      {"agent", t.agent},
                      {"node", t.node},
                      {"split_node", t.split_node},
                      {"a", ProfileJson(t.a)},
                      {"b", ProfileJson(t.b)},
                      {"c", ProfileJson(t.c)},
                      {"d", ProfileJson(t.d)}});
    }
    return {{"applicable", true}, {"count", diag.size()}, {"violations", list}};
  });
  structural["strong_ineffectiveness"] = Guarded([&]() -> json {
    auto diag = strong_ineffectiveness_check(tree);
    json list = json::array();
    for (std::size_t i = 0; i < diag.size() && i < o.cap; ++i) {
      const IneffectivenessViolation& s = diag[i];
      list.push_back({{"agent", s.agent},
                      {"node", s.node},
                      {"t", RatJson(s.t)},
                      {"t2", RatJson(s.t2)},
                      {"x", ProfileJson(s.x)},
                      {"x2", ProfileJson(s.x2)},
                      {"field", s.field}});
    }
    return {{"applicable", true}, {"count", diag.size()}, {"violations", list}};
  });

  json doc = {{"command", "verify"},
              {"k", k.ToString()},
              {"seed", o.seed},
              {"verdict", v.pass ? "pass" : "fail"},
              {"total_violations", v.total_violations},
              {"violations", violations},
              {"structural", structural},
              {"query_stats", PerAgentQueries(tree)}};
  emit.Json(doc, sw.ms());
  return v.pass ? kExitPass : kExitFail;
}

json CycleJson(const std::optional<CycleWitness>& c) {
  if (!c) return nullptr;
  return {{"vertices", c->cycle}, {"weight", RatJson(c->weight)}};
}

int CmdPayments(const Options& o, const Emitter& emit, std::ostream& out) {
  RequireJson(o);
  const ImplementationTree tree = LoadMechanism(o);
  const Horizon k = Horizon::Parse(o.horizon);
  if (!HasBinaryOutcomes(tree)) throw NonBinaryOutcomeError();
  PaymentResult r = synthesize_payments(tree, k);
  if (r.ok) {
    emit.Text(EmitMechanism(r.tree));
    return kExitPass;
  }
  json doc = {{"command", "payments"},       {"k", k.ToString()},
              {"verdict", "fail"},           {"agent", r.agent},
              {"cycle", CycleJson(r.cycle)}, {"error", r.error}};
  // The mechanism file is not written; the failure report goes to stdout.
  out << doc.dump(2) << "\n";
  return kExitFail;
}

int CmdCmon(const Options& o, const Emitter& emit) {
  RequireJson(o);
  Stopwatch sw;
  const ImplementationTree tree = LoadMechanism(o);
  const Horizon k = Horizon::Parse(o.horizon);
  json agents = json::array();
  json graphs = json::array();
  bool pass = true;
  for (int i = 0; i < tree.agents; ++i) {
    OspGraph g = build_k_osp_graph(tree, k, i);
    auto cyc = has_negative_cycle(g);
    pass = pass && !cyc;
    agents.push_back({{"agent", i},
                      {"vertices", g.vertices.size()},
                      {"edges", g.edges.size()},
                      {"negative_cycle", CycleJson(cyc)}});
    graphs.push_back(GraphToJson(g));
  }
  if (!o.dump_graph.empty()) {
    WriteTextFile(o.dump_graph,
                  json{{"k", k.ToString()}, {"graphs", graphs}}.dump(2) + "\n");
  }
  json doc = {{"command", "cmon"},
              {"k", k.ToString()},
              {"verdict", pass ? "pass" : "fail"},
              {"agents", agents}};
  emit.Json(doc, sw.ms());
  return pass ? kExitPass : kExitFail;
}

Profile ParseTruth(const std::string& text, const Instance& inst) {
  Profile out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(Rat::Parse(item));
    } catch (const std::exception& e) {
      throw UsageError("--truth: " + std::string(e.what()));
    }
  }
  if (static_cast<int>(out.size()) != inst.system.size()) {
    throw UsageError("--truth needs " + std::to_string(inst.system.size()) +
                     " values");
  }
  for (const Rat& v : out) {
    if (inst.domain.IndexOf(v) < 0) {
      throw UsageError("--truth value " + v.ToString() +
                       " is not in the domain");
    }
  }
  return out;
}

int CmdGreedy(const Options& o, const Emitter& emit) {
  RequireJson(o);
  const Instance inst = LoadInstance(o.instance);
  if (o.truth.empty()) throw UsageError("--truth is required");
  const Profile truth = ParseTruth(o.truth, inst);
  GreedyRun run = run_two_way_greedy(inst.system, inst.domain, truth);
  json trace = json::array();
  for (const GreedyQuery& q : run.trace) {
    trace.push_back({{"agent", q.agent},
                     {"query", q.top ? "top" : "bottom"},
                     {"asked", RatJson(q.asked)},
                     {"answer", q.yes ? "yes" : "no"}});
  }
  json doc = {{"command", "greedy"},
              {"solution", SetJson(run.solution)},
              {"excluded", SetJson(run.excluded)},
              {"completed", SetJson(run.completed)},
              {"weight", RatJson(Weight(run.solution, truth))},
              {"optimum", RatJson(Optimum(inst.system, truth))},
              {"trace", trace}};
  emit.Json(doc, 0);
  return kExitPass;
}

int CmdExtractTree(const Options& o, const Emitter& emit) {
  RequireJson(o);
  const Instance inst = LoadInstance(o.instance);
  emit.Text(EmitMechanism(extract_tree(inst.system, inst.domain)));
  return kExitPass;
}

int CmdApprox(const Options& o, const Emitter& emit) {
  RequireJson(o);
  Stopwatch sw;
  const Instance inst = LoadInstance(o.instance);
  const ImplementationTree tree = o.mechanism.empty()
                                      ? extract_tree(inst.system, inst.domain)
                                      : ReadMechanismFile(o.mechanism);
  const Rat ratio = approx_ratio(inst.system, tree);
  const Rat q = rank_quotient(inst.system);
  const bool pass = !(ratio < q);
  json doc = {{"command", "approx"},
              {"worst_ratio", RatJson(ratio)},
              {"rank_quotient", RatJson(q)},
              {"verdict", pass ? "pass" : "fail"}};
  emit.Json(doc, sw.ms());
  return pass ? kExitPass : kExitFail;
}

int CmdSearch(const Options& o, const Emitter& emit) {
  RequireJson(o);
  Stopwatch sw;
  const Instance inst = LoadInstance(o.instance);
  const Horizon k = Horizon::Parse(o.horizon);
  if (k.infinite()) throw UsageError("search needs a finite --k");
  const Rat target = Rat::Parse(o.ratio);
  SearchResult r = search_two_way_greedy(inst.system, inst.domain, k.k(),
                                         target, o.forward_only);
  json doc = {{"command", "search"},
              {"k", k.ToString()},
              {"target_ratio", RatJson(target)},
              {"forward_only", o.forward_only},
              {"result", r.found ? "found" : "exhausted"},
              {"functions_tried", r.functions_tried},
              {"states", r.states}};
  if (r.found) doc["mechanism"] = MechanismToJson(r.tree);
  emit.Json(doc, sw.ms());
  return r.found ? kExitPass : kExitFail;
}

int CmdFixtures(const Options& o, const Emitter& emit) {
  RequireJson(o);
  Fixture f;
  try {
    f = MakeFixture(o.fixture);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  emit.Text(EmitFixture(f));
  return kExitPass;
}

std::vector<int> ParseKList(const std::string& text) {
  std::vector<int> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Horizon h = Horizon::Parse(item);
    if (h.infinite()) throw UsageError("experiment sweeps finite k only");
    ks.push_back(h.k());
  }
  return ks;
}

int CmdExperiment(const Options& o, const Emitter& emit) {
  if (o.format != "csv" && o.format != "json") {
    throw UsageError("--format must be json or csv");
  }
  std::vector<ExperimentInput> inputs;
  for (const std::string& name : o.fixtures) {
    Fixture f;
    try {
      f = MakeFixture(name);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (f.is_mechanism) {
      throw UsageError(f.name + " is a mechanism, not an instance");
    }
    inputs.push_back({f.name, f.instance});
  }
  for (const std::string& path : o.instances) {
    inputs.push_back({path, LoadInstance(path)});
  }
  std::optional<std::vector<int>> ks;
  if (!o.ks.empty()) ks = ParseKList(o.ks);
  const std::vector<ExperimentRow> rows = RunExperiment(inputs, ks);
  if (o.format == "csv") {
    emit.Text(ExperimentCsv(rows));
    return kExitPass;
  }
  json list = json::array();
  for (const ExperimentRow& r : rows) {
    list.push_back({{"instance", r.instance},
                    {"d", r.d},
                    {"k", r.k},
                    {"verdict_k_limitable", r.k_limitable ? "pass" : "fail"},
                    {"worst_ratio", RatJson(r.worst_ratio)},
                    {"queries_max", r.queries_max}});
  }
  emit.Json({{"command", "experiment"}, {"rows", list}}, 0);
  return kExitPass;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  Options o;
  CLI::App app{"Checks and builds k-step obviously strategyproof mechanisms",
               "ospkit"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", o.seed, "Seed for randomized suites");
  app.add_option("--format", o.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", o.out, "Write the report here instead of stdout");
  app.add_flag("--timing", o.timing, "Add wall-clock milliseconds to reports");

  auto horizon = [&](CLI::App* sub) {
    sub->add_option("--k", o.horizon, "Planning horizon: integer or inf");
  };

  CLI::App* verify = app.add_subcommand("verify", "Check k-step OSP");
  verify->add_option("--mechanism", o.mechanism)->required();
  horizon(verify);
  verify->add_option("--report", o.out, "Same as --out");
  verify->add_option("--cap", o.cap, "Witnesses listed per check");

  CLI::App* payments =
      app.add_subcommand("payments", "Synthesize k-step OSP payments");
  payments->add_option("--mechanism", o.mechanism)->required();
  horizon(payments);

  CLI::App* cmon = app.add_subcommand("cmon", "Cycle monotonicity check");
  cmon->add_option("--mechanism", o.mechanism)->required();
  horizon(cmon);
  cmon->add_option("--dump-graph", o.dump_graph, "Write the OSP graphs here");

  CLI::App* greedy = app.add_subcommand("greedy", "Run the two-way greedy");
  greedy->add_option("--instance", o.instance);
  greedy->add_option("--truth", o.truth, "Comma-separated valuations");
  CLI::App* extract =
      greedy->add_subcommand("extract-tree", "Write its decision tree");
  extract->add_option("--instance", o.instance)->required();
  extract->add_option("--out", o.out);

  CLI::App* approx = app.add_subcommand("approx", "Worst-case ratio");
  approx->add_option("--instance", o.instance)->required();
  approx->add_option("--mechanism", o.mechanism,
                     "Tree to score instead of the extracted one");

  CLI::App* search =
      app.add_subcommand("search", "Exhaustive two-way greedy search");
  search->add_option("--instance", o.instance)->required();
  horizon(search);
  search->add_option("--ratio", o.ratio, "Target worst-case ratio");
  search->add_flag("--forward-only", o.forward_only,
                   "Top queries only until revealable");

  CLI::App* fixtures = app.add_subcommand("fixtures", "Write a fixture file");
  fixtures
      ->add_option("name", o.fixture,
                   "appendix_b, english(n,d), single_item(n,d), "
                   "uniform(n,r,d) or triangle_graphic(d)")
      ->required();

  CLI::App* experiment =
      app.add_subcommand("experiment", "k-limitability and ratio table");
  experiment->add_option("--fixture", o.fixtures, "Instance fixture name");
  experiment->add_option("--instance", o.instances, "Instance file");
  experiment->add_option("--k", o.ks, "Comma-separated k values");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();
  extract->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  // Experiment defaults to CSV unless a format was asked for.
  if (experiment->parsed() && app.count("--format") == 0) o.format = "csv";

  const Emitter emit(o, out);
  try {
    if (verify->parsed()) return CmdVerify(o, emit);
    if (payments->parsed()) return CmdPayments(o, emit, out);
    if (cmon->parsed()) return CmdCmon(o, emit);
    if (extract->parsed()) return CmdExtractTree(o, emit);
    if (greedy->parsed()) return CmdGreedy(o, emit);
    if (approx->parsed()) return CmdApprox(o, emit);
    if (search->parsed()) return CmdSearch(o, emit);
    if (fixtures->parsed()) return CmdFixtures(o, emit);
    if (experiment->parsed()) return CmdExperiment(o, emit);
  } catch (const std::exception& e) {
    // Malformed files, out-of-domain values and scale-guard trips alike.
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace ospkit
