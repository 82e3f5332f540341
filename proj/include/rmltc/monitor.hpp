#pragma once

// The deterministic transition system as an online monitor.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmltc/errors.hpp"
#include "rmltc/spec_system.hpp"
#include "rmltc/statics.hpp"

namespace rmltc {

enum class Verdict { violation, accepting_prefix, ongoing_prefix };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::violation: return "Violation";
    case Verdict::accepting_prefix: return "AcceptingPrefix";
    case Verdict::ongoing_prefix: return "OngoingPrefix";
  }
  return "?";
}

struct MonitorState {
  TermId current;
  /// Union of all substitutions emitted so far (their domains are disjoint).
  Substitution bound_so_far;
  std::size_t steps_taken = 0;
};

enum class FailureKind {
  no_transition,
  /// Both operands of an intersection consumed the event but bound some
  /// variable to incompatible values.
  merge_conflict,
};

struct StepFailure {
  FailureKind kind = FailureKind::no_transition;
  std::string detail;
};

/// Result of the raw judgment t →e t';σ (before σ is applied to t').
struct Derivation {
  TermId residual;
  Substitution subst;
};

namespace detail {

class Deriver {
 public:
  Deriver(SpecSystem& sys, const Event& e)
      : sys_(sys), event_(e), budget_(sys.node_count() + 1) {}

  std::optional<Derivation> derive(TermId t, std::size_t depth = 0) {
    if (depth > budget_) {
      throw BudgetExceeded("recursion budget exceeded while stepping " + term_to_string(sys_, t) +
                           "; the term is not contractive");
    }
    const TermNode& node = sys_.node(t);
    if (std::holds_alternative<term::Eps>(node)) return std::nullopt;
    if (const auto* p = std::get_if<term::Pat>(&node)) {
      auto s = match_event(sys_.decls, event_, p->pattern);
      if (!s) return std::nullopt;
      return Derivation{sys_.eps(), std::move(*s)};
    }
    if (const auto* r = std::get_if<term::Ref>(&node)) {
      return derive(sys_.equation_body(r->eq), depth + 1);
    }
    if (const auto* k = std::get_if<term::Block>(&node)) {
      const std::string var = k->var;
      auto d = derive(k->body, depth + 1);
      if (!d) return std::nullopt;
      if (d->subst.count(var)) {
        TermId bound = apply_subst_term(sys_, restrict(d->subst, var), d->residual);
        return Derivation{bound, remove(std::move(d->subst), var)};
      }
      return Derivation{sys_.block(var, d->residual), std::move(d->subst)};
    }
    const auto b = std::get<term::Binary>(node);
    switch (b.op) {
      case BinOp::or_: {
        if (auto l = derive(b.lhs, depth + 1)) return l;
        return derive(b.rhs, depth + 1);
      }
      case BinOp::and_: {
        auto l = derive(b.lhs, depth + 1);
        if (!l) return std::nullopt;
        auto r = derive(b.rhs, depth + 1);
        if (!r) return std::nullopt;
        auto m = merge(l->subst, r->subst);
        if (!m) {
          merge_conflict_ = true;
          conflict_detail_ = to_text(l->subst) + " vs " + to_text(r->subst);
          return std::nullopt;
        }
        return Derivation{sys_.binary(BinOp::and_, l->residual, r->residual), std::move(*m)};
      }
      case BinOp::shuffle: {
        if (auto l = derive(b.lhs, depth + 1)) {
          return Derivation{sys_.binary(BinOp::shuffle, l->residual, b.rhs), std::move(l->subst)};
        }
        if (auto r = derive(b.rhs, depth + 1)) {
          return Derivation{sys_.binary(BinOp::shuffle, b.lhs, r->residual), std::move(r->subst)};
        }
        return std::nullopt;
      }
      case BinOp::cat: {
        if (auto l = derive(b.lhs, depth + 1)) {
          return Derivation{sys_.cat(l->residual, b.rhs), std::move(l->subst)};
        }
        if (!accepts_empty(sys_, b.lhs)) return std::nullopt;
        return derive(b.rhs, depth + 1);
      }
    }
    return std::nullopt;
  }

  bool merge_conflict() const { return merge_conflict_; }
  const std::string& conflict_detail() const { return conflict_detail_; }

 private:
  SpecSystem& sys_;
  const Event& event_;
  std::size_t budget_;
  bool merge_conflict_ = false;
  std::string conflict_detail_;
};

}  // namespace detail

/// The raw judgment: nullopt iff t ↛e.
inline std::optional<Derivation> derive(SpecSystem& sys, TermId t, const Event& e,
                                        StepFailure* why = nullptr) {
  std::scoped_lock lock(sys.mutex());
  detail::Deriver d(sys, e);
  auto out = d.derive(t);
  if (!out && why) {
    if (d.merge_conflict()) {
      *why = StepFailure{FailureKind::merge_conflict,
                         "intersection operands bind incompatible values: " + d.conflict_detail()};
    } else {
      *why = StepFailure{FailureKind::no_transition, "no transition for " + to_text(e)};
    }
  }
  return out;
}

struct Transition {
  MonitorState next;
  Substitution emitted;
};

/// One monitor step: derives t →e t';σ and moves to σt'.
inline std::optional<Transition> step(SpecSystem& sys, const MonitorState& st, const Event& e,
                                      StepFailure* why = nullptr) {
  std::scoped_lock lock(sys.mutex());
  auto d = derive(sys, st.current, e, why);
  if (!d) return std::nullopt;
  Transition out;
  out.next.current = apply_subst_term(sys, d->subst, d->residual);
  out.next.bound_so_far = st.bound_so_far;
  out.next.bound_so_far.insert(d->subst.begin(), d->subst.end());
  out.next.steps_taken = st.steps_taken + 1;
  out.emitted = std::move(d->subst);
  return out;
}

inline MonitorState initial_state(SpecSystem& sys) { return MonitorState{sys.entry_term(), {}, 0}; }

/// AcceptingPrefix iff the current term accepts the empty trace.
inline Verdict verdict(const SpecSystem& sys, const MonitorState& st) {
  return accepts_empty(sys, st.current) ? Verdict::accepting_prefix : Verdict::ongoing_prefix;
}

/// Single-owner monitor over one event stream. Violation is absorbing.
class Monitor {
 public:
  explicit Monitor(SpecSystem& sys) : sys_(sys), state_(initial_state(sys)) {}
  Monitor(SpecSystem& sys, TermId start) : sys_(sys), state_{start, {}, 0} {}

  /// Emitted substitution, or nullopt when the event is rejected.
  std::optional<Substitution> feed(const Event& e) {
    if (failure_) return std::nullopt;
    StepFailure why;
    auto t = step(sys_, state_, e, &why);
    if (!t) {
      failure_ = std::move(why);
      return std::nullopt;
    }
    state_ = std::move(t->next);
    return std::move(t->emitted);
  }

  Verdict verdict() const { return failure_ ? Verdict::violation : rmltc::verdict(sys_, state_); }
  const MonitorState& state() const { return state_; }
  const std::optional<StepFailure>& failure() const { return failure_; }

 private:
  SpecSystem& sys_;
  MonitorState state_;
  std::optional<StepFailure> failure_;
};

struct RunResult {
  Verdict verdict = Verdict::ongoing_prefix;
  /// One emitted substitution per consumed event.
  std::vector<Substitution> emitted;
  /// Number of events consumed; on violation, the index of the offending event.
  std::size_t consumed = 0;
  std::optional<StepFailure> failure;
  MonitorState final_state;
};

inline RunResult run(SpecSystem& sys, std::span<const Event> events) {
  Monitor m(sys);
  RunResult out;
  for (const Event& e : events) {
    auto s = m.feed(e);
    if (!s) break;
    out.emitted.push_back(std::move(*s));
  }
  out.verdict = m.verdict();
  out.consumed = out.emitted.size();
  out.failure = m.failure();
  out.final_state = m.state();
  return out;
}

}  // namespace rmltc
