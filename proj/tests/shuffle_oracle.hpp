#pragma once

// Shuffle membership decided directly from index functions, by brute force
// over all position splits.

#include <bit>

#include "rmltc/trace_algebra.hpp"

namespace rmltc::testing {

/// Membership in the left-preferential shuffle straight from the index-function
/// definition: some split of positions into strictly increasing images of
/// dom(t1) and dom(t2) reproduces t and never lets t2(n2) overtake an equal
/// pending t1(m).
template <class E>
bool brute_member(const FiniteTrace<E>& t, const FiniteTrace<E>& t1, const FiniteTrace<E>& t2, bool left_pref) {
  const unsigned n = static_cast<unsigned>(t.size());
  if (n != t1.size() + t2.size()) return false;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != t1.size()) continue;
    std::vector<unsigned> f1, f2;
    for (unsigned p = 0; p < n; ++p) ((mask >> p) & 1u ? f1 : f2).push_back(p);
    bool ok = true;
    for (std::size_t k = 0; ok && k < f1.size(); ++k) ok = t[f1[k]] == t1[k];
    for (std::size_t k = 0; ok && k < f2.size(); ++k) ok = t[f2[k]] == t2[k];
    for (std::size_t n2 = 0; ok && left_pref && n2 < f2.size(); ++n2) {
      for (std::size_t n1 = 0; n1 < f1.size(); ++n1) {
        if (f2[n2] < f1[n1]) {
          ok = !(t1[n1] == t2[n2]);
          break;
        }
      }
    }
    if (ok) return true;
  }
  return false;
}

/// Every candidate interleaving filtered by brute_member.
template <class E>
TraceSet<E> brute(const FiniteTrace<E>& t1, const FiniteTrace<E>& t2, bool left_pref) {
  TraceSet<E> out;
  const unsigned n = static_cast<unsigned>(t1.size() + t2.size());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != t1.size()) continue;
    FiniteTrace<E> t(n);
    std::size_t i = 0, j = 0;
    for (unsigned p = 0; p < n; ++p) t[p] = (mask >> p) & 1u ? t1[i++] : t2[j++];
    if (brute_member(t, t1, t2, left_pref)) out.insert(t);
  }
  return out;
}

inline std::vector<FiniteTrace<int>> all_words(int alphabet, std::size_t max_len) {
  std::vector<FiniteTrace<int>> out{{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() == max_len) continue;
    for (int a = 0; a < alphabet; ++a) {
      auto w = out[i];
      w.push_back(a);
      out.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace rmltc::testing
