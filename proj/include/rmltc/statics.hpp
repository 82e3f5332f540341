#pragma once

// Emptiness judgment and the contractivity check.

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rmltc/spec_system.hpp"

namespace rmltc {

/// Whether ⊢ε(t) has a finite derivation. Least fixed point over the node
/// graph: cyclic references start at false.
inline bool accepts_empty(const SpecSystem& sys, TermId t) {
  std::scoped_lock lock(sys.mutex());
  auto& cache = sys.caches().nullable;
  if (auto it = cache.find(t.value); it != cache.end()) return it->second;

  const auto todo =
      detail::reachable_nodes(sys, t, [&](TermId n) { return !cache.count(n.value); });
  std::unordered_map<std::uint32_t, bool> cur;
  for (TermId n : todo) cur[n.value] = false;
  auto get = [&](TermId n) {
    if (auto it = cur.find(n.value); it != cur.end()) return it->second;
    return cache.at(n.value);
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (TermId n : todo) {
      if (cur[n.value]) continue;  // monotone: true never reverts
      bool next = std::visit(
          [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, term::Eps>) {
              return true;
            } else if constexpr (std::is_same_v<T, term::Pat>) {
              return false;
            } else if constexpr (std::is_same_v<T, term::Binary>) {
              if (node.op == BinOp::or_) return get(node.lhs) || get(node.rhs);
              return get(node.lhs) && get(node.rhs);
            } else if constexpr (std::is_same_v<T, term::Block>) {
              return get(node.body);
            } else {
              return get(sys.equation_body(node.eq));
            }
          },
          sys.node(n));
      if (next) {
        cur[n.value] = true;
        changed = true;
      }
    }
  }
  for (auto [k, v] : cur) cache.emplace(k, v);
  return cache.at(t.value);
}

/// An unguarded cycle in the descent graph: every edge is an operator
/// position that step may enter without consuming an event.
struct ContractivityWitness {
  std::vector<TermId> cycle;
  std::string reason;
};

struct Contractivity {
  std::optional<ContractivityWitness> witness;
  bool contractive() const { return !witness.has_value(); }
};

/// Contractive iff every cycle through the terms reachable from `t` passes a
/// guarded edge, i.e. the subgraph of unguarded edges is acyclic.
inline Contractivity check_contractive(const SpecSystem& sys, TermId t) {
  std::scoped_lock lock(sys.mutex());
  auto unguarded = [&](TermId n) {
    std::vector<TermId> out;
    const TermNode& node = sys.node(n);
    if (const auto* b = std::get_if<term::Binary>(&node)) {
      out.push_back(b->lhs);
      if (!(b->op == BinOp::cat && !accepts_empty(sys, b->lhs))) out.push_back(b->rhs);
    } else {
      for (TermId c : sys.children(n)) out.push_back(c);
    }
    return out;
  };

  // Iterative DFS with colors; every reachable node is a root candidate since
  // guarded edges still lead to terms that must themselves be contractive.
  enum class Color : std::uint8_t { white, grey, black };
  std::unordered_map<std::uint32_t, Color> color;
  const auto all = detail::reachable_nodes(sys, t, [](TermId) { return true; });

  for (TermId root : all) {
    if (color[root.value] != Color::white) continue;
    struct Frame {
      TermId node;
      std::vector<TermId> succ;
      std::size_t next = 0;
    };
    std::vector<Frame> stack;
    color[root.value] = Color::grey;
    stack.push_back(Frame{root, unguarded(root)});
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next == top.succ.size()) {
        color[top.node.value] = Color::black;
        stack.pop_back();
        continue;
      }
      TermId c = top.succ[top.next++];
      Color cc = color[c.value];
      if (cc == Color::grey) {
        ContractivityWitness w;
        auto it = std::find_if(stack.begin(), stack.end(), [&](const Frame& f) { return f.node == c; });
        for (; it != stack.end(); ++it) w.cycle.push_back(it->node);
        w.cycle.push_back(c);
        w.reason = "unguarded cycle: ";
        for (std::size_t i = 0; i < w.cycle.size(); ++i) {
          if (i) w.reason += " -> ";
          w.reason += term_to_string(sys, w.cycle[i]);
        }
        return Contractivity{std::move(w)};
      }
      if (cc == Color::white) {
        color[c.value] = Color::grey;
        stack.push_back(Frame{c, unguarded(c)});
      }
    }
  }
  return Contractivity{};
}

inline Contractivity check_contractive(SpecSystem& sys) { return check_contractive(sys, sys.entry_term()); }

}  // namespace rmltc
