#pragma once

// Cyclic trace expressions as a finite system of recursive equations.
//
// Terms live in a hash-consed node store owned by a SpecSystem; recursion is
// expressed only through Ref nodes naming an equation. Applying a
// substitution to a Ref specializes the equation once per (equation,
// effective substitution) pair, so the result is again a finite system.

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "rmltc/errors.hpp"
#include "rmltc/event_model.hpp"

namespace rmltc {

struct TermId {
  std::uint32_t value = 0;
  friend auto operator<=>(const TermId&, const TermId&) = default;
};

struct EquationId {
  std::uint32_t value = 0;
  friend auto operator<=>(const EquationId&, const EquationId&) = default;
};

enum class BinOp { cat, and_, or_, shuffle };

inline const char* op_name(BinOp op) {
  switch (op) {
    case BinOp::cat: return "cat";
    case BinOp::and_: return "and";
    case BinOp::or_: return "or";
    case BinOp::shuffle: return "shuffle";
  }
  return "?";
}

namespace term {
struct Eps {};
struct Pat {
  EventTypePattern pattern;
};
struct Binary {
  BinOp op;
  TermId lhs;
  TermId rhs;
};
struct Block {
  std::string var;
  TermId body;
};
struct Ref {
  EquationId eq;
};
}  // namespace term

using TermNode = std::variant<term::Eps, term::Pat, term::Binary, term::Block, term::Ref>;

struct Equation {
  std::string name;
  std::optional<TermId> body;
};

class SpecSystem {
 public:
  static constexpr std::size_t default_specialization_cap = 100000;

  SpecSystem() = default;
  SpecSystem(const SpecSystem&) = delete;
  SpecSystem& operator=(const SpecSystem&) = delete;

  DeclTable decls;

  // Node construction (hash-consed) ------------------------------------------

  TermId eps() { return intern(term::Eps{}, "E"); }
  TermId pattern(EventTypePattern p) {
    std::string key = "P" + to_text(p);
    return intern(term::Pat{std::move(p)}, std::move(key));
  }
  TermId binary(BinOp op, TermId lhs, TermId rhs) {
    std::string key = "B" + std::to_string(static_cast<int>(op)) + ":" + std::to_string(lhs.value) +
                      ":" + std::to_string(rhs.value);
    return intern(term::Binary{op, lhs, rhs}, std::move(key));
  }
  TermId cat(TermId l, TermId r) { return binary(BinOp::cat, l, r); }
  TermId block(std::string var, TermId body) {
    std::string key = "K" + var + ":" + std::to_string(body.value);
    return intern(term::Block{std::move(var), body}, std::move(key));
  }
  TermId ref(EquationId eq) { return intern(term::Ref{eq}, "R" + std::to_string(eq.value)); }

  // Equations ------------------------------------------------------------------

  EquationId add_equation(std::string name) {
    std::scoped_lock lock(mutex_);
    EquationId id{static_cast<std::uint32_t>(equations_.size())};
    equations_.push_back(Equation{name, std::nullopt});
    if (!by_name_.count(name)) by_name_.emplace(std::move(name), id);
    return id;
  }

  void define_equation(EquationId eq, TermId body) {
    std::scoped_lock lock(mutex_);
    equations_.at(eq.value).body = body;
  }

  std::optional<EquationId> find_equation(const std::string& name) const {
    std::scoped_lock lock(mutex_);
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  const Equation& equation(EquationId eq) const {
    std::scoped_lock lock(mutex_);
    return equations_.at(eq.value);
  }

  std::size_t equation_count() const {
    std::scoped_lock lock(mutex_);
    return equations_.size();
  }

  TermId equation_body(EquationId eq) const {
    std::scoped_lock lock(mutex_);
    const auto& e = equations_.at(eq.value);
    if (!e.body) throw std::logic_error("equation '" + e.name + "' has no body");
    return *e.body;
  }

  void set_entry(EquationId eq) { entry_ = eq; }
  std::optional<EquationId> entry() const { return entry_; }

  /// The entry term, as a reference to the entry equation.
  TermId entry_term() {
    if (!entry_) throw SpecError(SpecErrorKind::missing_entry, "no entry equation");
    return ref(*entry_);
  }

  // Node access ----------------------------------------------------------------

  const TermNode& node(TermId t) const {
    std::scoped_lock lock(mutex_);
    return nodes_.at(t.value);
  }

  std::size_t node_count() const {
    std::scoped_lock lock(mutex_);
    return nodes_.size();
  }

  /// Follows Ref nodes to the equation body they denote. A cycle made only of
  /// Refs (`A = B; B = A;`) resolves to the Ref where the cycle was detected.
  TermId resolve(TermId t) const {
    std::scoped_lock lock(mutex_);
    for (std::size_t hops = 0; hops <= equations_.size(); ++hops) {
      const auto* r = std::get_if<term::Ref>(&nodes_.at(t.value));
      if (!r) return t;
      const auto& eq = equations_.at(r->eq.value);
      if (!eq.body) return t;
      t = *eq.body;
    }
    return t;
  }

  /// Children in operator position (Ref nodes lead to their equation body).
  std::vector<TermId> children(TermId t) const {
    std::scoped_lock lock(mutex_);
    const TermNode& n = nodes_.at(t.value);
    if (const auto* b = std::get_if<term::Binary>(&n)) return {b->lhs, b->rhs};
    if (const auto* k = std::get_if<term::Block>(&n)) return {k->body};
    if (const auto* r = std::get_if<term::Ref>(&n)) {
      const auto& eq = equations_.at(r->eq.value);
      if (eq.body) return {*eq.body};
    }
    return {};
  }

  std::recursive_mutex& mutex() const { return mutex_; }

  std::size_t specialization_cap() const { return specialization_cap_; }
  void set_specialization_cap(std::size_t cap) { specialization_cap_ = cap; }

  /// Memo tables for the analyses below; guarded by mutex().
  struct Caches {
    std::unordered_map<std::uint32_t, VarSet> free_vars;
    std::unordered_map<std::uint32_t, bool> nullable;
    std::map<std::pair<std::uint32_t, Substitution>, TermId> applied;
    std::map<std::pair<std::uint32_t, Substitution>, EquationId> specialized;
    std::size_t specializations = 0;
  };
  Caches& caches() const { return caches_; }

 private:
  TermId intern(TermNode n, std::string key) {
    std::scoped_lock lock(mutex_);
    auto it = interned_.find(key);
    if (it != interned_.end()) return it->second;
    TermId id{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back(std::move(n));
    interned_.emplace(std::move(key), id);
    return id;
  }

  mutable std::recursive_mutex mutex_;
  std::deque<TermNode> nodes_;
  std::unordered_map<std::string, TermId> interned_;
  std::deque<Equation> equations_;
  std::map<std::string, EquationId> by_name_;
  std::optional<EquationId> entry_;
  std::size_t specialization_cap_ = default_specialization_cap;
  mutable Caches caches_;
};

// Free variables ----------------------------------------------------------------

namespace detail {

/// Nodes reachable from `t` (through Refs) that satisfy `wanted`, in
/// discovery order.
template <class Pred>
std::vector<TermId> reachable_nodes(const SpecSystem& sys, TermId t, Pred wanted) {
  std::vector<TermId> order;
  std::set<std::uint32_t> seen;
  std::vector<TermId> stack{t};
  while (!stack.empty()) {
    TermId n = stack.back();
    stack.pop_back();
    if (!wanted(n) || !seen.insert(n.value).second) continue;
    order.push_back(n);
    for (TermId c : sys.children(n)) stack.push_back(c);
  }
  return order;
}

}  // namespace detail

/// Least solution of the free-variable equations: iterate the clauses
/// (ε ↦ ∅, θ ↦ pfv(θ), op ↦ union, ⟨x;t⟩ ↦ fv(t) \ {x}) from empty sets over
/// the reachable node graph until nothing changes.
inline VarSet fv_term(const SpecSystem& sys, TermId t) {
  std::scoped_lock lock(sys.mutex());
  auto& cache = sys.caches().free_vars;
  if (auto it = cache.find(t.value); it != cache.end()) return it->second;

  const auto todo =
      detail::reachable_nodes(sys, t, [&](TermId n) { return !cache.count(n.value); });
  std::unordered_map<std::uint32_t, VarSet> cur;
  for (TermId n : todo) cur[n.value];
  auto get = [&](TermId n) -> const VarSet& {
    if (auto it = cur.find(n.value); it != cur.end()) return it->second;
    return cache.at(n.value);
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (TermId n : todo) {
      VarSet next = std::visit(
          [&](const auto& node) -> VarSet {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, term::Eps>) {
              return {};
            } else if constexpr (std::is_same_v<T, term::Pat>) {
              return pfv(node.pattern);
            } else if constexpr (std::is_same_v<T, term::Binary>) {
              VarSet s = get(node.lhs);
              const VarSet& r = get(node.rhs);
              s.insert(r.begin(), r.end());
              return s;
            } else if constexpr (std::is_same_v<T, term::Block>) {
              VarSet s = get(node.body);
              s.erase(node.var);
              return s;
            } else {
              return get(sys.equation_body(node.eq));
            }
          },
          sys.node(n));
      if (next != cur[n.value]) {
        cur[n.value] = std::move(next);
        changed = true;
      }
    }
  }
  for (auto& [k, v] : cur) cache.emplace(k, std::move(v));
  return cache.at(t.value);
}

// Part-of relation --------------------------------------------------------------

/// Least set closed under: operator nodes contribute both children and their
/// parts, blocks their body and its parts. Members are resolved through Refs.
inline std::set<TermId> partof(const SpecSystem& sys, TermId t) {
  std::scoped_lock lock(sys.mutex());
  std::set<TermId> out;
  std::vector<TermId> stack;
  auto push_children = [&](TermId n) {
    for (TermId c : sys.children(sys.resolve(n))) stack.push_back(c);
  };
  push_children(t);
  while (!stack.empty()) {
    TermId c = sys.resolve(stack.back());
    stack.pop_back();
    if (out.insert(c).second) push_children(c);
  }
  return out;
}

// Substitution application ------------------------------------------------------

/// σt pushed through every operator; through ⟨x; t⟩ it continues with σ\x.
/// Each reachable equation is specialized at most once per effective
/// substitution (σ restricted to the equation's free variables), so cyclic
/// terms stay finite.
inline TermId apply_subst_term(SpecSystem& sys, const Substitution& s, TermId t) {
  std::scoped_lock lock(sys.mutex());
  if (s.empty()) return t;
  Substitution eff = restrict_to(s, fv_term(sys, t));
  if (eff.empty()) return t;

  auto& caches = sys.caches();
  auto key = std::make_pair(t.value, eff);
  if (auto it = caches.applied.find(key); it != caches.applied.end()) return it->second;

  const TermNode& node = sys.node(t);
  TermId result = std::visit(
      [&](const auto& n) -> TermId {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, term::Eps>) {
          return t;
        } else if constexpr (std::is_same_v<T, term::Pat>) {
          return sys.pattern(apply_subst(eff, n.pattern));
        } else if constexpr (std::is_same_v<T, term::Binary>) {
          TermId l = apply_subst_term(sys, eff, n.lhs);
          TermId r = apply_subst_term(sys, eff, n.rhs);
          return sys.binary(n.op, l, r);
        } else if constexpr (std::is_same_v<T, term::Block>) {
          return sys.block(n.var, apply_subst_term(sys, remove(eff, n.var), n.body));
        } else {
          auto skey = std::make_pair(n.eq.value, eff);
          if (auto it = caches.specialized.find(skey); it != caches.specialized.end()) {
            return sys.ref(it->second);
          }
          if (++caches.specializations > sys.specialization_cap()) {
            throw BudgetExceeded("specialization cap of " + std::to_string(sys.specialization_cap()) +
                                 " exceeded");
          }
          const Equation& orig = sys.equation(n.eq);
          EquationId spec = sys.add_equation(orig.name + to_text(eff));
          // Both analyses are invariant under this substitution; seeding them
          // keeps the caches consistent while the body is still undefined.
          TermId spec_ref = sys.ref(spec);
          VarSet vars = fv_term(sys, t);
          for (const auto& [k, v] : eff) vars.erase(k);
          caches.free_vars.emplace(spec_ref.value, std::move(vars));
          if (auto nl = caches.nullable.find(t.value); nl != caches.nullable.end()) {
            caches.nullable.emplace(spec_ref.value, nl->second);
          }
          caches.specialized.emplace(skey, spec);
          TermId body = apply_subst_term(sys, eff, sys.equation_body(n.eq));
          sys.define_equation(spec, body);
          return spec_ref;
        }
      },
      node);
  caches.applied.emplace(std::move(key), result);
  return result;
}

// Printing ---------------------------------------------------------------------

namespace detail {

inline int precedence(const TermNode& n) {
  if (const auto* b = std::get_if<term::Binary>(&n)) {
    switch (b->op) {
      case BinOp::or_: return 1;
      case BinOp::and_: return 2;
      case BinOp::shuffle: return 3;
      case BinOp::cat: return 4;
    }
  }
  return 5;
}

inline void print_term(const SpecSystem& sys, TermId t, int context, std::string& out,
                       const std::map<std::uint32_t, std::string>* names) {
  const TermNode& n = sys.node(t);
  const int prec = precedence(n);
  const bool parens = prec < context;
  if (parens) out += "(";
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, term::Eps>) {
          out += "empty";
        } else if constexpr (std::is_same_v<T, term::Pat>) {
          out += to_text(node.pattern);
        } else if constexpr (std::is_same_v<T, term::Binary>) {
          static constexpr const char* sep[] = {" ", " /\\ ", " \\/ ", " | "};
          // Left-associative: the right operand needs parentheses at equal precedence.
          print_term(sys, node.lhs, prec, out, names);
          out += sep[static_cast<int>(node.op)];
          print_term(sys, node.rhs, prec + 1, out, names);
        } else if constexpr (std::is_same_v<T, term::Block>) {
          out += "{let " + node.var + "; ";
          print_term(sys, node.body, 0, out, names);
          out += "}";
        } else {
          if (names) {
            out += names->at(node.eq.value);
          } else {
            out += sys.equation(node.eq).name;
          }
        }
      },
      n);
  if (parens) out += ")";
}

}  // namespace detail

/// Concrete-syntax rendering; Refs print as equation names.
inline std::string term_to_string(const SpecSystem& sys, TermId t) {
  std::scoped_lock lock(sys.mutex());
  std::string out;
  detail::print_term(sys, t, 0, out, nullptr);
  return out;
}

}  // namespace rmltc
