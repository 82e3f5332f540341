#pragma once

// Bounded exploration of the transition system over a finite event universe,
// productivity of states, and the checker comparing the transition-system
// semantics of every composite subterm against the compositional operators.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rmltc/errors.hpp"
#include "rmltc/monitor.hpp"
#include "rmltc/parser.hpp"
#include "rmltc/spec_system.hpp"
#include "rmltc/statics.hpp"
#include "rmltc/trace_algebra.hpp"

namespace rmltc {

using EventId = std::uint32_t;
using IdTrace = FiniteTrace<EventId>;
using IdTraceSet = InstTraceSet<EventId>;

/// Finite set of ground events; traces over it are sequences of indices.
struct EventUniverse {
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }
  const Event& operator[](EventId i) const { return events.at(i); }

  /// From a JSON array of event objects; duplicates are dropped.
  static EventUniverse from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("universe must be a JSON array of events");
    EventUniverse u;
    for (const auto& e : j) {
      if (!e.is_object()) throw std::invalid_argument("universe entries must be JSON objects");
      Event ev = rmltc::from_json(e);
      if (std::find(u.events.begin(), u.events.end(), ev) == u.events.end()) u.events.push_back(std::move(ev));
    }
    if (u.events.empty()) throw std::invalid_argument("universe must not be empty");
    return u;
  }

  std::vector<Event> to_events(const IdTrace& t) const {
    std::vector<Event> out;
    for (EventId i : t) out.push_back(events.at(i));
    return out;
  }

  nlohmann::json trace_json(const IdTrace& t) const {
    auto out = nlohmann::json::array();
    for (EventId i : t) out.push_back(to_json(events.at(i)));
    return out;
  }
};

// State graph ---------------------------------------------------------------------

/// Finite unfolding of the transition system. States are residual terms up to
/// the unit laws ε·t = t·ε = ε|t = t|ε = t and ⟨x;t⟩ = t for x ∉ fv(t), which
/// preserve steps, emitted substitutions and emptiness.
class StateGraph {
 public:
  using StateId = std::uint32_t;
  static constexpr std::size_t default_max_states = 10000;

  struct Edge {
    StateId target;
    Substitution subst;
  };
  struct State {
    TermId term;
    bool accepting = false;
    /// Indexed by event id.
    std::vector<std::optional<Edge>> out;
  };

  StateGraph(SpecSystem& sys, EventUniverse u, std::size_t max_states = default_max_states)
      : sys_(sys), universe_(std::move(u)), max_states_(max_states) {}

  /// Adds `t` and everything reachable from it; returns the state of `t`.
  StateId add_root(TermId t) {
    std::scoped_lock lock(sys_.mutex());
    const std::size_t first_new = states_.size();
    StateId root = intern(canonical(t));
    for (std::size_t i = first_new; i < states_.size(); ++i) expand(static_cast<StateId>(i));
    return root;
  }

  std::size_t size() const { return states_.size(); }
  const State& state(StateId s) const { return states_.at(s); }
  const EventUniverse& universe() const { return universe_; }
  SpecSystem& system() const { return sys_; }

  std::optional<StateId> next(StateId s, EventId e) const {
    const auto& edge = states_.at(s).out.at(e);
    if (!edge) return std::nullopt;
    return edge->target;
  }

  std::optional<StateId> run(StateId s, const IdTrace& t) const {
    for (EventId e : t) {
      auto n = next(s, e);
      if (!n) return std::nullopt;
      s = *n;
    }
    return s;
  }

  /// Some accepting state or some cycle is reachable.
  bool productive(StateId s) {
    analyse();
    return reach_accept_[s] || reach_cycle_[s];
  }

  /// Some cycle, hence an infinite trace, is reachable.
  bool infinite(StateId s) {
    analyse();
    return reach_cycle_[s];
  }

  std::vector<StateId> reachable(StateId from) const {
    std::vector<StateId> order{from};
    std::set<StateId> seen{from};
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (const auto& e : states_[order[i]].out) {
        if (e && seen.insert(e->target).second) order.push_back(e->target);
      }
    }
    return order;
  }

  TermId canonical(TermId t) {
    if (auto it = canon_.find(t.value); it != canon_.end()) return it->second;
    const TermNode node = sys_.node(t);
    TermId out = t;
    if (const auto* b = std::get_if<term::Binary>(&node)) {
      TermId l = canonical(b->lhs);
      TermId r = canonical(b->rhs);
      const bool unit_op = b->op == BinOp::cat || b->op == BinOp::shuffle;
      if (unit_op && is_eps(l)) {
        out = r;
      } else if (unit_op && is_eps(r)) {
        out = l;
      } else {
        out = sys_.binary(b->op, l, r);
      }
    } else if (const auto* k = std::get_if<term::Block>(&node)) {
      TermId body = canonical(k->body);
      out = fv_term(sys_, body).count(k->var) ? sys_.block(k->var, body) : body;
    }
    canon_.emplace(t.value, out);
    return out;
  }

 private:
  bool is_eps(TermId t) const { return std::holds_alternative<term::Eps>(sys_.node(t)); }

  StateId intern(TermId t) {
    if (auto it = index_.find(t.value); it != index_.end()) return it->second;
    if (states_.size() >= max_states_) {
      throw BudgetExceeded("state space not finite within cap of " + std::to_string(max_states_) +
                           " states");
    }
    StateId id = static_cast<StateId>(states_.size());
    states_.push_back(State{t, accepts_empty(sys_, t), {}});
    index_.emplace(t.value, id);
    dirty_ = true;
    return id;
  }

  void expand(StateId s) {
    std::vector<std::optional<Edge>> out(universe_.size());
    const MonitorState from{states_[s].term, {}, 0};
    for (EventId e = 0; e < universe_.size(); ++e) {
      auto t = step(sys_, from, universe_[e]);
      if (!t) continue;
      StateId target = intern(canonical(t->next.current));
      out[e] = Edge{target, std::move(t->emitted)};
    }
    states_[s].out = std::move(out);
  }

  // Tarjan's SCC algorithm (iterative) and two backward reachability passes.
  void analyse() {
    if (!dirty_) return;
    const std::size_t n = states_.size();
    std::vector<bool> cyclic(n, false);
    std::vector<std::int64_t> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<StateId> stack;
    std::int64_t counter = 0;
    struct Frame {
      StateId v;
      std::size_t edge;
    };
    for (StateId root = 0; root < n; ++root) {
      if (index[root] >= 0) continue;
      std::vector<Frame> call{{root, 0}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!call.empty()) {
        Frame& f = call.back();
        const auto& out = states_[f.v].out;
        if (f.edge < out.size()) {
          const auto& e = out[f.edge++];
          if (!e) continue;
          StateId w = e->target;
          if (w == f.v) cyclic[w] = true;
          if (index[w] < 0) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            call.push_back({w, 0});
          } else if (on_stack[w]) {
            low[f.v] = std::min(low[f.v], index[w]);
          }
          continue;
        }
        const StateId v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == index[v]) {
          std::vector<StateId> comp;
          StateId w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
          } while (w != v);
          if (comp.size() > 1) {
            for (StateId c : comp) cyclic[c] = true;
          }
        }
      }
    }

    std::vector<std::vector<StateId>> preds(n);
    for (StateId s = 0; s < n; ++s) {
      for (const auto& e : states_[s].out) {
        if (e) preds[e->target].push_back(s);
      }
    }
    auto backward = [&](auto seed) {
      std::vector<bool> mark(n, false);
      std::vector<StateId> work;
      for (StateId s = 0; s < n; ++s) {
        if (seed(s)) {
          mark[s] = true;
          work.push_back(s);
        }
      }
      while (!work.empty()) {
        StateId s = work.back();
        work.pop_back();
        for (StateId p : preds[s]) {
          if (!mark[p]) {
            mark[p] = true;
            work.push_back(p);
          }
        }
      }
      return mark;
    };
    reach_accept_ = backward([&](StateId s) { return states_[s].accepting; });
    reach_cycle_ = backward([&](StateId s) { return cyclic[s]; });
    dirty_ = false;
  }

  SpecSystem& sys_;
  EventUniverse universe_;
  std::size_t max_states_;
  std::vector<State> states_;
  std::unordered_map<std::uint32_t, StateId> index_;
  std::unordered_map<std::uint32_t, TermId> canon_;
  bool dirty_ = true;
  std::vector<bool> reach_accept_, reach_cycle_;
};

/// Closure of the monitor step from the entry term over every event of U.
inline std::unique_ptr<StateGraph> explore(SpecSystem& sys, const EventUniverse& u,
                                           std::size_t max_states = StateGraph::default_max_states) {
  auto g = std::make_unique<StateGraph>(sys, u, max_states);
  g->add_root(sys.entry_term());
  return g;
}

// Bounded semantics ---------------------------------------------------------------

/// Calls fn(trace, emitted substitutions, final state) for every successful
/// run of length ≤ L from `root`, the empty run included.
template <class Fn>
void for_each_run(const StateGraph& g, StateGraph::StateId root, std::size_t L, Fn&& fn) {
  IdTrace trace;
  std::vector<const Substitution*> substs;
  std::function<void(StateGraph::StateId)> go = [&](StateGraph::StateId s) {
    fn(static_cast<const IdTrace&>(trace), static_cast<const std::vector<const Substitution*>&>(substs), s);
    if (trace.size() == L) return;
    const auto& out = g.state(s).out;
    for (EventId e = 0; e < out.size(); ++e) {
      if (!out[e]) continue;
      trace.push_back(e);
      substs.push_back(&out[e]->subst);
      go(out[e]->target);
      trace.pop_back();
      substs.pop_back();
    }
  };
  go(root);
}

/// All (τ, σ) with |τ| ≤ L accepted by the transition system from `root`,
/// σ being the union of the substitutions emitted along τ.
inline IdTraceSet bounded_semantics_lts(const StateGraph& g, StateGraph::StateId root, std::size_t L) {
  IdTraceSet out;
  out.bound = L;
  for_each_run(g, root, L, [&](const IdTrace& t, const std::vector<const Substitution*>& ss, auto s) {
    if (!g.state(s).accepting) return;
    Substitution acc;
    for (const Substitution* x : ss) acc.insert(x->begin(), x->end());
    out.insert(t, std::move(acc));
  });
  return out;
}

inline IdTraceSet bounded_semantics_lts(SpecSystem& sys, const EventUniverse& u, std::size_t L,
                                        std::size_t max_states = StateGraph::default_max_states) {
  auto g = explore(sys, u, max_states);
  return bounded_semantics_lts(*g, 0, L);
}

/// τ is a prefix of some trace (finite or infinite) denoted by `root`.
inline bool prefix_in_semantics(StateGraph& g, StateGraph::StateId root, const IdTrace& t) {
  auto end = g.run(root, t);
  return end && g.productive(*end);
}

inline bool prefix_in_semantics(SpecSystem& sys, const EventUniverse& u, const IdTrace& t,
                                std::size_t max_states = StateGraph::default_max_states) {
  auto g = explore(sys, u, max_states);
  return prefix_in_semantics(*g, 0, t);
}

/// Traces of length exactly L that are prefixes of the denotation of `root`.
inline TraceSet<EventId> live_prefixes(StateGraph& g, StateGraph::StateId root, std::size_t L) {
  TraceSet<EventId> out;
  for_each_run(g, root, L, [&](const IdTrace& t, const auto&, StateGraph::StateId s) {
    if (t.size() == L && g.productive(s)) out.insert(t);
  });
  return out;
}

// Property suites -------------------------------------------------------------------

struct StepPrefixException {
  std::string state;
  EventId event;
  bool step_defined;
  bool prefix;
};

/// States reachable from `root` where "step on e is defined" and "⟨e⟩ is a
/// prefix of the state's denotation" disagree.
inline std::vector<StepPrefixException> step_prefix_exceptions(StateGraph& g, StateGraph::StateId root) {
  std::vector<StepPrefixException> out;
  for (auto s : g.reachable(root)) {
    for (EventId e = 0; e < g.universe().size(); ++e) {
      const bool stepped = g.next(s, e).has_value();
      const bool prefix = prefix_in_semantics(g, s, IdTrace{e});
      if (stepped != prefix) {
        out.push_back({term_to_string(g.system(), g.state(s).term), e, stepped, prefix});
      }
    }
  }
  return out;
}

struct RunInvariantException {
  IdTrace trace;
  std::string reason;
};

/// Along every successful run of length ≤ L: emitted domains are pairwise
/// disjoint, contained in fv of the root term, one substitution per event.
inline std::vector<RunInvariantException> run_invariant_exceptions(const StateGraph& g,
                                                                   StateGraph::StateId root,
                                                                   std::size_t L) {
  std::vector<RunInvariantException> out;
  const VarSet fv = fv_term(g.system(), g.state(root).term);
  for_each_run(g, root, L, [&](const IdTrace& t, const std::vector<const Substitution*>& ss, auto) {
    if (ss.size() != t.size()) {
      out.push_back({t, "substitution count differs from trace length"});
      return;
    }
    VarSet seen;
    for (const Substitution* s : ss) {
      for (const auto& [k, v] : *s) {
        if (!seen.insert(k).second) {
          out.push_back({t, "variable " + k + " emitted twice"});
          return;
        }
        if (!fv.count(k)) {
          out.push_back({t, "variable " + k + " is not free in the initial term"});
          return;
        }
      }
    }
  });
  return out;
}

// Equivalence check -------------------------------------------------------------------

struct EquivalenceOptions {
  CatOptions cat;
  ShuffleMode shuffle = ShuffleMode::left_preferential;
  std::size_t max_states = StateGraph::default_max_states;
};

struct NodeReport {
  std::string op;
  std::string term;
  std::size_t lts_size = 0;
  std::size_t comp_size = 0;
  std::size_t lhs_size = 0;
  std::size_t rhs_size = 0;
  /// In the transition-system set only.
  std::vector<InstTrace<EventId>> missing;
  /// In the compositional set only.
  std::vector<InstTrace<EventId>> extra;
  /// Length-L prefixes (concatenation nodes only), each way.
  std::vector<IdTrace> live_missing;
  std::vector<IdTrace> live_extra;
};

struct EquivalenceReport {
  std::string spec;
  std::size_t bound = 0;
  std::vector<NodeReport> nodes;

  std::size_t finite_mismatches() const {
    std::size_t n = 0;
    for (const auto& r : nodes) n += r.missing.size() + r.extra.size();
    return n;
  }
  std::size_t live_mismatches() const {
    std::size_t n = 0;
    for (const auto& r : nodes) n += r.live_missing.size() + r.live_extra.size();
    return n;
  }
  bool passed() const { return finite_mismatches() == 0 && live_mismatches() == 0; }

  nlohmann::json to_json(const EventUniverse& u) const {
    auto inst = [&](const std::vector<InstTrace<EventId>>& v) {
      auto a = nlohmann::json::array();
      for (const auto& m : v) a.push_back({{"trace", u.trace_json(m.trace)}, {"subst", rmltc::to_json(m.subst)}});
      return a;
    };
    auto plain = [&](const std::vector<IdTrace>& v) {
      auto a = nlohmann::json::array();
      for (const auto& t : v) a.push_back(u.trace_json(t));
      return a;
    };
    auto ns = nlohmann::json::array();
    for (const auto& r : nodes) {
      ns.push_back({{"op", r.op},
                    {"term", r.term},
                    {"lts_size", r.lts_size},
                    {"comp_size", r.comp_size},
                    {"lhs_size", r.lhs_size},
                    {"rhs_size", r.rhs_size},
                    {"missing", inst(r.missing)},
                    {"extra", inst(r.extra)},
                    {"live_missing", plain(r.live_missing)},
                    {"live_extra", plain(r.live_extra)}});
    }
    return {{"spec", spec},
            {"bound", bound},
            {"passed", passed()},
            {"finite_mismatches", finite_mismatches()},
            {"live_mismatches", live_mismatches()},
            {"nodes", ns}};
  }
};

namespace detail {

inline const char* report_op(const TermNode& n) {
  if (const auto* b = std::get_if<term::Binary>(&n)) {
    switch (b->op) {
      case BinOp::or_: return "union";
      case BinOp::cat: return "cat";
      case BinOp::and_: return "and";
      case BinOp::shuffle: return "shuffle";
    }
  }
  return "block";
}

/// Compositional prediction of the length-L prefixes of t1·t2: prefixes of
/// infinite traces of t1, plus accepted (τ1, σ1) of t1 followed by a prefix
/// of a trace of σ1·t2 admitted by the left-preference guard.
inline TraceSet<EventId> predicted_cat_live(StateGraph& g, StateGraph::StateId lhs, TermId rhs_term,
                                            const IdTraceSet& s1, std::size_t L, bool guard) {
  TraceSet<EventId> out;
  for_each_run(g, lhs, L, [&](const IdTrace& t, const auto&, StateGraph::StateId s) {
    if (t.size() == L && g.infinite(s)) out.insert(t);
  });
  auto live1 = [&](const IdTrace& t) { return guard && prefix_in_semantics(g, lhs, t); };
  const std::size_t nu = g.universe().size();
  for (const auto& [t1, sigma1] : s1.members) {
    const auto rhs = g.add_root(apply_subst_term(g.system(), sigma1, rhs_term));
    const std::size_t rest = L - t1.size();
    if (rest == 0) {
      bool ok = g.state(rhs).accepting;
      for (EventId e = 0; !ok && e < nu; ++e) {
        IdTrace probe = t1;
        probe.push_back(e);
        ok = prefix_in_semantics(g, rhs, IdTrace{e}) && !live1(probe);
      }
      if (ok) out.insert(t1);
      continue;
    }
    for (EventId e = 0; e < nu; ++e) {
      IdTrace probe = t1;
      probe.push_back(e);
      if (live1(probe)) continue;
      auto first = g.next(rhs, e);
      if (!first) continue;
      for_each_run(g, *first, rest - 1, [&](const IdTrace& t2, const auto&, StateGraph::StateId s) {
        if (t2.size() == rest - 1 && g.productive(s)) out.insert(concat(probe, t2));
      });
    }
  }
  return out;
}

}  // namespace detail

/// For every composite node reachable from the entry, compares its bounded
/// transition-system semantics with the compositional operator applied to
/// the bounded semantics of its operands. Prefix tests inside the operators
/// are decided on the transition system (consumable and productive).
inline EquivalenceReport check_equivalence(SpecSystem& sys, const EventUniverse& u, std::size_t L,
                                           const EquivalenceOptions& opts = {}) {
  std::scoped_lock lock(sys.mutex());
  EquivalenceReport report;
  report.bound = L;
  const auto nodes = detail::reachable_nodes(sys, sys.entry_term(), [](TermId) { return true; });
  std::vector<TermId> composite;
  for (TermId n : nodes) {
    const TermNode& node = sys.node(n);
    if (std::holds_alternative<term::Binary>(node) || std::holds_alternative<term::Block>(node)) {
      composite.push_back(n);
    }
  }
  std::sort(composite.begin(), composite.end());

  StateGraph g(sys, u, opts.max_states);
  std::map<StateGraph::StateId, IdTraceSet> sem;
  auto semantics = [&](StateGraph::StateId s) -> const IdTraceSet& {
    auto it = sem.find(s);
    if (it == sem.end()) it = sem.emplace(s, bounded_semantics_lts(g, s, L)).first;
    return it->second;
  };

  for (TermId n : composite) {
    const TermNode node = sys.node(n);
    NodeReport r;
    r.op = detail::report_op(node);
    r.term = term_to_string(sys, n);
    const auto self = g.add_root(n);
    const IdTraceSet& lts = semantics(self);
    IdTraceSet comp;

    if (const auto* k = std::get_if<term::Block>(&node)) {
      const IdTraceSet& body = semantics(g.add_root(k->body));
      r.lhs_size = body.size();
      comp = comp_del_var(body, k->var);
    } else {
      const auto& b = std::get<term::Binary>(node);
      const auto lhs = g.add_root(b.lhs);
      const auto rhs = g.add_root(b.rhs);
      const IdTraceSet& s1 = semantics(lhs);
      const IdTraceSet& s2 = semantics(rhs);
      r.lhs_size = s1.size();
      r.rhs_size = s2.size();
      PrefixPredicate<EventId> in_left = [&g, lhs](const IdTrace& t) { return prefix_in_semantics(g, lhs, t); };
      switch (b.op) {
        case BinOp::or_: comp = comp_union(s1, s2, in_left); break;
        case BinOp::and_: comp = comp_and(s1, s2); break;
        case BinOp::cat: {
          comp = comp_cat(s1, s2, in_left, opts.cat);
          auto actual = live_prefixes(g, self, L);
          auto predicted = detail::predicted_cat_live(g, lhs, b.rhs, s1, L, opts.cat.guard);
          std::set_difference(actual.begin(), actual.end(), predicted.begin(), predicted.end(),
                              std::back_inserter(r.live_missing));
          std::set_difference(predicted.begin(), predicted.end(), actual.begin(), actual.end(),
                              std::back_inserter(r.live_extra));
          break;
        }
        case BinOp::shuffle: {
          // offered(m, e): some trace of the left operand has e at position m.
          std::vector<std::set<EventId>> offered(L);
          std::set<StateGraph::StateId> layer;
          if (g.productive(lhs)) layer.insert(lhs);
          for (std::size_t m = 0; m < L; ++m) {
            std::set<StateGraph::StateId> next;
            for (auto s : layer) {
              for (EventId e = 0; e < u.size(); ++e) {
                auto t = g.next(s, e);
                if (t && g.productive(*t)) {
                  offered[m].insert(e);
                  next.insert(*t);
                }
              }
            }
            layer = std::move(next);
          }
          OfferedPredicate<EventId> off = [offered](std::size_t m, const EventId& e) {
            return m < offered.size() && offered[m].count(e) != 0;
          };
          comp = comp_shuffle(s1, s2, off, opts.shuffle);
          break;
        }
      }
    }
    r.lts_size = lts.size();
    r.comp_size = comp.size();
    std::set_difference(lts.members.begin(), lts.members.end(), comp.members.begin(), comp.members.end(),
                        std::back_inserter(r.missing));
    std::set_difference(comp.members.begin(), comp.members.end(), lts.members.begin(), lts.members.end(),
                        std::back_inserter(r.extra));
    report.nodes.push_back(std::move(r));
  }
  return report;
}

// Corpus ----------------------------------------------------------------------------

struct CorpusParams {
  std::size_t max_nodes = 8;
  std::size_t max_event_types = 4;
  std::size_t max_universe = 4;
  /// Specs whose reachable state space exceeds this are discarded.
  std::size_t max_states = 2000;
};

struct GeneratedSpec {
  std::string text;
  std::unique_ptr<SpecSystem> sys;
  EventUniverse universe;
};

namespace detail {

class SpecGenerator {
 public:
  SpecGenerator(std::mt19937_64& rng, const CorpusParams& p) : rng_(rng), p_(p) {}

  std::string generate(EventUniverse& u) {
    types_.clear();
    const std::size_t ntypes = pick(2, std::min<std::size_t>(4, p_.max_event_types));
    std::size_t budget = p_.max_universe - ntypes;
    std::string decls;
    for (std::size_t i = 0; i < ntypes; ++i) {
      std::string name(1, static_cast<char>('a' + i));
      bool unary = budget > 0 && coin(0.5);
      if (unary) --budget;
      types_.push_back({name, unary});
      if (unary) {
        decls += "event " + name + "(v) matches {\"t\": \"" + name + "\", \"v\": v};\n";
        for (int v = 1; v <= 2; ++v) {
          u.events.push_back(rmltc::from_json(nlohmann::json{{"t", name}, {"v", v}}));
        }
      } else {
        decls += "event " + name + "() matches {\"t\": \"" + name + "\"};\n";
        u.events.push_back(rmltc::from_json(nlohmann::json{{"t", name}}));
      }
    }
    std::size_t nodes = p_.max_nodes;
    auto body = term(nodes, true);
    return decls + "Main = " + body.text + ";\n";
  }

 private:
  struct Type {
    std::string name;
    bool unary;
  };
  struct Gen {
    std::string text;
    bool nullable;
  };

  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  Gen leaf() {
    if (coin(0.15)) return {"empty", true};
    const Type& t = types_[pick(0, types_.size() - 1)];
    if (!t.unary) return {t.name + "()", false};
    static const char* args[] = {"1", "2", "x", "y"};
    return {t.name + "(" + args[pick(0, 3)] + ")", false};
  }

  // `nodes` counts remaining term nodes; recursion to Main is only emitted
  // as the right operand of a concatenation whose left operand is not nullable.
  Gen term(std::size_t& nodes, bool allow_rec) {
    if (nodes <= 1 || coin(0.25)) {
      if (nodes) --nodes;
      return leaf();
    }
    --nodes;
    switch (pick(0, 4)) {
      case 0: {
        const char* var = coin(0.5) ? "x" : "y";
        Gen body = term(nodes, allow_rec);
        return {std::string("{let ") + var + "; " + body.text + "}", body.nullable};
      }
      case 1: {
        Gen l = term(nodes, allow_rec);
        if (!l.nullable && allow_rec && nodes > 0 && coin(0.4)) {
          --nodes;
          return {"(" + l.text + " Main)", false};
        }
        Gen r = term(nodes, allow_rec);
        return {"(" + l.text + " " + r.text + ")", l.nullable && r.nullable};
      }
      case 2: {
        Gen l = term(nodes, allow_rec);
        Gen r = term(nodes, allow_rec);
        return {"(" + l.text + " \\/ " + r.text + ")", l.nullable || r.nullable};
      }
      case 3: {
        Gen l = term(nodes, allow_rec);
        Gen r = term(nodes, allow_rec);
        return {"(" + l.text + " /\\ " + r.text + ")", l.nullable && r.nullable};
      }
      default: {
        // No recursion below a shuffle: residuals would grow without bound.
        Gen l = term(nodes, false);
        Gen r = term(nodes, false);
        return {"(" + l.text + " | " + r.text + ")", l.nullable && r.nullable};
      }
    }
  }

  std::mt19937_64& rng_;
  const CorpusParams& p_;
  std::vector<Type> types_;
};

}  // namespace detail

/// Deterministic pseudo-random contractive specs with finite state spaces.
inline std::vector<GeneratedSpec> generate_corpus(std::uint64_t seed, std::size_t count,
                                                  const CorpusParams& params = {}) {
  std::mt19937_64 rng(seed);
  detail::SpecGenerator gen(rng, params);
  std::vector<GeneratedSpec> out;
  while (out.size() < count) {
    GeneratedSpec g;
    g.text = gen.generate(g.universe);
    g.sys = parse_spec(g.text);
    if (!check_contractive(*g.sys).contractive()) continue;
    try {
      explore(*g.sys, g.universe, params.max_states);
    } catch (const BudgetExceeded&) {
      continue;
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = std::thread::hardware_concurrency()) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rmltc
