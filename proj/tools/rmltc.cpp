// rmltc: command-line front end for the trace calculus.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmltc/rmltc.hpp"

namespace {

using nlohmann::json;
using namespace rmltc;

constexpr int exit_error = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::unique_ptr<SpecSystem> load_spec(const std::string& path) {
  auto sys = parse_spec(read_file(path));
  auto c = check_contractive(*sys);
  if (!c.contractive()) throw std::runtime_error("specification is not contractive: " + c.witness->reason);
  return sys;
}

EventUniverse load_universe(const std::string& path) { return EventUniverse::from_json(json::parse(read_file(path))); }

void print(const json& j) { std::cout << j.dump() << '\n' << std::flush; }

json inst_set_json(const IdTraceSet& s, const EventUniverse& u) {
  auto out = json::array();
  for (const auto& m : s.members) out.push_back({{"trace", u.trace_json(m.trace)}, {"subst", to_json(m.subst)}});
  return out;
}

int cmd_check(const std::string& path) {
  auto sys = parse_spec(read_file(path));
  auto c = check_contractive(*sys);
  TermId entry = sys->entry_term();
  json out = {{"contractive", c.contractive()},
              {"free_variables", fv_term(*sys, entry)},
              {"accepts_empty", accepts_empty(*sys, entry)}};
  if (!c.contractive()) {
    auto cycle = json::array();
    for (TermId t : c.witness->cycle) cycle.push_back(term_to_string(*sys, t));
    out["witness"] = {{"cycle", cycle}, {"reason", c.witness->reason}};
  }
  print(out);
  return c.contractive() ? 0 : 1;
}

int cmd_monitor(const std::string& path, const std::string& events) {
  auto sys = load_spec(path);
  std::ifstream file;
  if (events != "-") {
    file.open(events);
    if (!file) throw std::runtime_error("cannot open " + events);
  }
  std::istream& in = events == "-" ? std::cin : file;

  Monitor m(*sys);
  std::size_t index = 0;
  std::string line;
  while (m.verdict() != Verdict::violation && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("event " + std::to_string(index) + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("event " + std::to_string(index) + ": not a JSON object");
    auto s = m.feed(rmltc::from_json(j));
    json rec = {{"index", index},
                {"status", s ? "ok" : "violation"},
                {"verdict", to_string(m.verdict())},
                {"subst", s ? to_json(*s) : json::object()}};
    if (!s) {
      rec["reason"] = m.failure()->kind == FailureKind::merge_conflict ? "merge_conflict" : "no_transition";
      rec["detail"] = m.failure()->detail;
      std::cerr << "violation at event " << index << ": " << m.failure()->detail << '\n';
    }
    print(rec);
    if (s) ++index;
  }
  const Verdict v = m.verdict();
  print({{"summary", true},
         {"verdict", to_string(v)},
         {"consumed", index},
         {"bound", to_json(m.state().bound_so_far)}});
  switch (v) {
    case Verdict::accepting_prefix: return 0;
    case Verdict::ongoing_prefix: return 3;
    case Verdict::violation: return 1;
  }
  return exit_error;
}

int cmd_semantics(const std::string& path, const std::string& universe, std::size_t bound, std::size_t max_states) {
  auto sys = load_spec(path);
  auto u = load_universe(universe);
  auto s = bounded_semantics_lts(*sys, u, bound, max_states);
  print({{"bound", bound}, {"traces", inst_set_json(s, u)}});
  return 0;
}

int cmd_verify(const std::string& path, const std::string& universe, std::size_t bound, std::size_t max_states) {
  auto sys = load_spec(path);
  auto u = load_universe(universe);
  EquivalenceOptions opts;
  opts.max_states = max_states;
  auto report = check_equivalence(*sys, u, bound, opts);
  report.spec = path;
  print(report.to_json(u));
  return report.passed() ? 0 : 1;
}

int cmd_fuzz(std::size_t count, std::size_t bound, std::uint64_t seed, bool no_cat_guard, bool plain_shuffle) {
  auto corpus = generate_corpus(seed, count);
  EquivalenceOptions opts;
  opts.cat.guard = !no_cat_guard;
  opts.shuffle = plain_shuffle ? ShuffleMode::plain : ShuffleMode::left_preferential;
  std::vector<EquivalenceReport> reports(corpus.size());
  std::vector<std::size_t> step_prefix(corpus.size()), invariants(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) {
    auto& g = corpus[i];
    reports[i] = check_equivalence(*g.sys, g.universe, bound, opts);
    reports[i].spec = g.text;
    auto graph = explore(*g.sys, g.universe);
    step_prefix[i] = step_prefix_exceptions(*graph, 0).size();
    invariants[i] = run_invariant_exceptions(*graph, 0, bound).size();
  });
  std::size_t finite = 0, live = 0, l9 = 0, inv = 0;
  auto failing = json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    finite += reports[i].finite_mismatches();
    live += reports[i].live_mismatches();
    l9 += step_prefix[i];
    inv += invariants[i];
    if (!reports[i].passed() || step_prefix[i] || invariants[i]) {
      json r = reports[i].to_json(corpus[i].universe);
      r["step_prefix_exceptions"] = step_prefix[i];
      r["invariant_exceptions"] = invariants[i];
      failing.push_back(std::move(r));
    }
  }
  print({{"specs", corpus.size()},
         {"bound", bound},
         {"seed", seed},
         {"finite_mismatches", finite},
         {"live_mismatches", live},
         {"step_prefix_exceptions", l9},
         {"invariant_exceptions", inv},
         {"failing", failing}});
  return finite + live + l9 + inv == 0 ? 0 : 1;
}

int cmd_shuffle(const std::string& left, const std::string& right, const std::string& ref) {
  auto trace = [](const std::string& text) {
    json j = json::parse(text);
    if (!j.is_array()) throw std::runtime_error("traces are JSON arrays");
    FiniteTrace<DataValue> t;
    for (const auto& e : j) t.push_back(rmltc::from_json(e));
    return t;
  };
  auto dump = [](const TraceSet<DataValue>& s) {
    auto out = json::array();
    for (const auto& t : s) {
      auto a = json::array();
      for (const auto& e : t) a.push_back(to_json(e));
      out.push_back(a);
    }
    return out;
  };
  auto t1 = trace(left), t2 = trace(right);
  json out = {{"shuffle", dump(shuffle(t1, t2))}, {"lp_shuffle", dump(lp_shuffle(t1, t2))}};
  if (!ref.empty()) {
    json r = json::parse(ref);
    if (!r.is_array()) throw std::runtime_error("reference set is a JSON array of traces");
    std::vector<FiniteTrace<DataValue>> set;
    for (const auto& t : r) set.push_back(trace(t.dump()));
    out["glp_shuffle"] = dump(glp_shuffle(t1, t2, set));
  }
  print(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace calculus checker, monitor and oracle"};
  app.require_subcommand(1);

  std::string spec, events = "-", universe, left, right, ref;
  std::size_t bound = 6, max_states = StateGraph::default_max_states, count = 200;
  std::uint64_t seed = 1;
  bool no_cat_guard = false, plain_shuffle = false;

  auto* check = app.add_subcommand("check", "Contractivity, free variables and emptiness of Main");
  check->add_option("spec", spec, "Specification file")->required();

  auto* monitor = app.add_subcommand("monitor", "Monitor a JSON Lines event stream");
  monitor->add_option("spec", spec, "Specification file")->required();
  monitor->add_option("--events", events, "Events file, or - for standard input");

  auto* semantics = app.add_subcommand("semantics", "Bounded trace semantics over a universe");
  semantics->add_option("spec", spec, "Specification file")->required();
  semantics->add_option("--universe", universe, "JSON array of events")->required();
  semantics->add_option("--bound", bound, "Maximum trace length")->required();
  semantics->add_option("--max-states", max_states, "State cap");

  auto* verify = app.add_subcommand("verify", "Compare transition-system and compositional semantics");
  verify->add_option("spec", spec, "Specification file")->required();
  verify->add_option("--universe", universe, "JSON array of events")->required();
  verify->add_option("--bound", bound, "Maximum trace length")->required();
  verify->add_option("--max-states", max_states, "State cap");

  auto* fuzz = app.add_subcommand("fuzz", "Verify a generated corpus");
  fuzz->add_option("--count", count, "Number of specifications")->required();
  fuzz->add_option("--bound", bound, "Maximum trace length")->required();
  fuzz->add_option("--seed", seed, "Generator seed")->required();
  fuzz->add_flag("--no-cat-guard", no_cat_guard, "Drop the left-preference guard of concatenation");
  fuzz->add_flag("--plain-shuffle", plain_shuffle, "Use plain interleaving for shuffle");

  auto* shuf = app.add_subcommand("shuffle", "Print shuffle, lp_shuffle and glp_shuffle of two traces");
  shuf->add_option("left", left, "JSON array")->required();
  shuf->add_option("right", right, "JSON array")->required();
  shuf->add_option("--ref", ref, "JSON array of traces for glp_shuffle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : exit_error;
  }

  try {
    if (*check) return cmd_check(spec);
    if (*monitor) return cmd_monitor(spec, events);
    if (*semantics) return cmd_semantics(spec, universe, bound, max_states);
    if (*verify) return cmd_verify(spec, universe, bound, max_states);
    if (*fuzz) return cmd_fuzz(count, bound, seed, no_cat_guard, plain_shuffle);
    if (*shuf) return cmd_shuffle(left, right, ref);
  } catch (const std::exception& e) {
    std::cerr << "rmltc: " << e.what() << '\n';
    return exit_error;
  }
  return exit_error;
}
