#pragma once

// Finite traces, the shuffle family and the compositional operators on sets of
// instantiated traces. Everything is templated over the event type so the
// oracle can work on small integer ids.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "rmltc/event_model.hpp"

namespace rmltc {

template <class E>
using FiniteTrace = std::vector<E>;

template <class E>
using TraceSet = std::set<FiniteTrace<E>>;

template <class E>
FiniteTrace<E> concat(const FiniteTrace<E>& a, const FiniteTrace<E>& b) {
  FiniteTrace<E> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

template <class E>
bool is_prefix(const FiniteTrace<E>& a, const FiniteTrace<E>& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

/// τ ≺ S: some member of S extends τ.
template <class E, class Range>
bool prefix_of_set(const FiniteTrace<E>& t, const Range& s) {
  for (const auto& u : s) {
    if (is_prefix(t, u)) return true;
  }
  return false;
}

// Shuffle family ---------------------------------------------------------------

namespace detail {

template <class E, class Admit>
void interleave(const FiniteTrace<E>& t1, const FiniteTrace<E>& t2, std::size_t i, std::size_t j,
                FiniteTrace<E>& cur, TraceSet<E>& out, const Admit& admit_right) {
  if (i == t1.size() && j == t2.size()) {
    out.insert(cur);
    return;
  }
  if (i < t1.size()) {
    cur.push_back(t1[i]);
    interleave(t1, t2, i + 1, j, cur, out, admit_right);
    cur.pop_back();
  }
  if (j < t2.size() && admit_right(i, j)) {
    cur.push_back(t2[j]);
    interleave(t1, t2, i, j + 1, cur, out, admit_right);
    cur.pop_back();
  }
}

}  // namespace detail

/// All interleavings of t1 and t2 preserving the internal order of each.
template <class E>
TraceSet<E> shuffle(const FiniteTrace<E>& t1, const FiniteTrace<E>& t2) {
  TraceSet<E> out;
  FiniteTrace<E> cur;
  detail::interleave(t1, t2, 0, 0, cur, out, [](std::size_t, std::size_t) { return true; });
  return out;
}

/// Left-preferential shuffle: an element of t2 may be placed only when t1 is
/// exhausted or the next pending element of t1 is a different event.
template <class E>
TraceSet<E> lp_shuffle(const FiniteTrace<E>& t1, const FiniteTrace<E>& t2) {
  TraceSet<E> out;
  FiniteTrace<E> cur;
  detail::interleave(t1, t2, 0, 0, cur, out,
                     [&](std::size_t i, std::size_t j) { return i == t1.size() || !(t1[i] == t2[j]); });
  return out;
}

/// Generalized left-preferential shuffle with the reference set abstracted as
/// `offered(m, e)`: whether some τ′ in the reference set has m in its domain
/// and τ′(m) = e.
///
/// Enumerates index functions directly: a choice of the positions of t1 in
/// the result fixes f1 and f2; for each n2 the minimal n1 with f2(n2) < f1(n1)
/// is m, and τ2(n2) must not be offered at m.
template <class E, class Offered>
TraceSet<E> glp_shuffle_with(const FiniteTrace<E>& t1, const FiniteTrace<E>& t2, const Offered& offered) {
  TraceSet<E> out;
  const std::size_t n = t1.size() + t2.size();
  // from_left[p]: position p of the result is taken from t1.
  std::vector<bool> from_left(n, false);
  std::fill(from_left.begin() + static_cast<std::ptrdiff_t>(t2.size()), from_left.end(), true);
  do {
    std::vector<std::size_t> f1, f2;
    for (std::size_t p = 0; p < n; ++p) (from_left[p] ? f1 : f2).push_back(p);
    bool ok = true;
    for (std::size_t n2 = 0; ok && n2 < f2.size(); ++n2) {
      auto it = std::upper_bound(f1.begin(), f1.end(), f2[n2]);
      if (it == f1.end()) continue;
      const auto m = static_cast<std::size_t>(it - f1.begin());
      if (offered(m, t2[n2])) ok = false;
    }
    if (!ok) continue;
    FiniteTrace<E> t(n);
    for (std::size_t k = 0; k < f1.size(); ++k) t[f1[k]] = t1[k];
    for (std::size_t k = 0; k < f2.size(); ++k) t[f2[k]] = t2[k];
    out.insert(std::move(t));
  } while (std::next_permutation(from_left.begin(), from_left.end()));
  return out;
}

/// τ1 ⋔_T τ2 with an explicit reference set T.
template <class E, class Range>
TraceSet<E> glp_shuffle(const FiniteTrace<E>& t1, const FiniteTrace<E>& t2, const Range& ref) {
  return glp_shuffle_with(t1, t2, [&](std::size_t m, const E& e) {
    for (const auto& u : ref) {
      if (m < u.size() && u[m] == e) return true;
    }
    return false;
  });
}

// Instantiated trace sets --------------------------------------------------------

template <class E>
struct InstTrace {
  FiniteTrace<E> trace;
  Substitution subst;

  friend bool operator==(const InstTrace& a, const InstTrace& b) {
    return a.trace == b.trace && a.subst == b.subst;
  }
  friend bool operator<(const InstTrace& a, const InstTrace& b) {
    return std::tie(a.trace, a.subst) < std::tie(b.trace, b.subst);
  }
};

/// A set of instantiated traces truncated at `bound`. complete_to_bound says
/// every member of the denoted set up to that length is present.
template <class E>
struct InstTraceSet {
  std::set<InstTrace<E>> members;
  std::size_t bound = 0;
  bool complete_to_bound = true;

  void insert(FiniteTrace<E> t, Substitution s) {
    if (t.size() <= bound) members.insert(InstTrace<E>{std::move(t), std::move(s)});
  }
  bool contains(const FiniteTrace<E>& t, const Substitution& s) const {
    return members.count(InstTrace<E>{t, s}) != 0;
  }
  std::size_t size() const { return members.size(); }
};

/// π(S): the trace components.
template <class E>
TraceSet<E> traces_of(const InstTraceSet<E>& s) {
  TraceSet<E> out;
  for (const auto& m : s.members) out.insert(m.trace);
  return out;
}

template <class E>
using PrefixPredicate = std::function<bool(const FiniteTrace<E>&)>;

template <class E>
using OfferedPredicate = std::function<bool(std::size_t, const E&)>;

namespace detail {

template <class E>
InstTraceSet<E> empty_like(const InstTraceSet<E>& a, const InstTraceSet<E>& b) {
  InstTraceSet<E> out;
  out.bound = std::min(a.bound, b.bound);
  out.complete_to_bound = a.complete_to_bound && b.complete_to_bound;
  return out;
}

template <class E>
PrefixPredicate<E> set_prefix_test(const InstTraceSet<E>& s) {
  auto traces = std::make_shared<TraceSet<E>>(traces_of(s));
  return [traces](const FiniteTrace<E>& t) { return prefix_of_set(t, *traces); };
}

}  // namespace detail

/// Left-preferential union: S1 together with the members of S2 whose first
/// event cannot start a trace of S1. `in_left` decides τ ≺ S1; by default it
/// is evaluated on the (truncated) set itself.
template <class E>
InstTraceSet<E> comp_union(const InstTraceSet<E>& s1, const InstTraceSet<E>& s2,
                           PrefixPredicate<E> in_left = nullptr) {
  if (!in_left) in_left = detail::set_prefix_test(s1);
  auto out = detail::empty_like(s1, s2);
  for (const auto& m : s1.members) out.insert(m.trace, m.subst);
  for (const auto& m : s2.members) {
    if (m.trace.empty() || !in_left(FiniteTrace<E>{m.trace.front()})) out.insert(m.trace, m.subst);
  }
  return out;
}

struct CatOptions {
  /// Drop products τ1·τ2 where τ1 followed by the first event of τ2 is still
  /// a prefix of the left operand. Disabling it gives plain concatenation.
  bool guard = true;
};

/// Finite part of left-preferential concatenation.
template <class E>
InstTraceSet<E> comp_cat(const InstTraceSet<E>& s1, const InstTraceSet<E>& s2,
                         PrefixPredicate<E> in_left = nullptr, CatOptions opts = {}) {
  if (!in_left) in_left = detail::set_prefix_test(s1);
  auto out = detail::empty_like(s1, s2);
  for (const auto& a : s1.members) {
    for (const auto& b : s2.members) {
      if (a.trace.size() + b.trace.size() > out.bound) continue;
      if (opts.guard && !b.trace.empty()) {
        FiniteTrace<E> probe = a.trace;
        probe.push_back(b.trace.front());
        if (in_left(probe)) continue;
      }
      auto s = merge(a.subst, b.subst);
      if (!s) continue;
      out.insert(concat(a.trace, b.trace), std::move(*s));
    }
  }
  return out;
}

template <class E>
InstTraceSet<E> comp_and(const InstTraceSet<E>& s1, const InstTraceSet<E>& s2) {
  auto out = detail::empty_like(s1, s2);
  auto it = s2.members.begin();
  for (const auto& a : s1.members) {
    // Members are ordered by trace first, so equal traces are contiguous.
    while (it != s2.members.end() && it->trace < a.trace) ++it;
    for (auto jt = it; jt != s2.members.end() && jt->trace == a.trace; ++jt) {
      if (auto s = merge(a.subst, jt->subst)) out.insert(a.trace, std::move(*s));
    }
  }
  return out;
}

enum class ShuffleMode {
  /// Generalized left-preferential shuffle w.r.t. the left operand.
  left_preferential,
  /// Plain interleaving, ignoring the left operand's precedence.
  plain,
};

/// Left-preferential shuffle of sets. `offered(m, e)` decides whether some
/// trace of the left operand has e at position m; by default it is evaluated
/// on π(S1).
template <class E>
InstTraceSet<E> comp_shuffle(const InstTraceSet<E>& s1, const InstTraceSet<E>& s2,
                             OfferedPredicate<E> offered = nullptr,
                             ShuffleMode mode = ShuffleMode::left_preferential) {
  if (!offered) {
    auto traces = std::make_shared<TraceSet<E>>(traces_of(s1));
    offered = [traces](std::size_t m, const E& e) {
      for (const auto& u : *traces) {
        if (m < u.size() && u[m] == e) return true;
      }
      return false;
    };
  }
  auto out = detail::empty_like(s1, s2);
  for (const auto& a : s1.members) {
    for (const auto& b : s2.members) {
      if (a.trace.size() + b.trace.size() > out.bound) continue;
      auto s = merge(a.subst, b.subst);
      if (!s) continue;
      TraceSet<E> ts = mode == ShuffleMode::plain ? shuffle(a.trace, b.trace)
                                                  : glp_shuffle_with(a.trace, b.trace, offered);
      for (const auto& t : ts) out.insert(t, *s);
    }
  }
  return out;
}

template <class E>
InstTraceSet<E> comp_del_var(const InstTraceSet<E>& s, const std::string& x) {
  InstTraceSet<E> out;
  out.bound = s.bound;
  out.complete_to_bound = s.complete_to_bound;
  for (const auto& m : s.members) out.insert(m.trace, remove(m.subst, x));
  return out;
}

}  // namespace rmltc
