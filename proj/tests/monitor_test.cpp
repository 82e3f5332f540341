#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace rmltc;
using namespace rmltc::testing;

namespace {

std::unique_ptr<SpecSystem> params(const std::string& eqs) {
  return parse_spec(
      "event a(x) matches {t: 'a', v: x};\n"
      "event b(x) matches {t: 'b', v: x};\n"
      "event c() matches {t: 'c'};\n" +
      eqs);
}

Event a(int v) { return from_json(nlohmann::json{{"t", "a"}, {"v", v}}); }
Event b(int v) { return from_json(nlohmann::json{{"t", "b"}, {"v", v}}); }
Event c() { return from_json(nlohmann::json{{"t", "c"}}); }

std::string residual(SpecSystem& sys, TermId t, const Event& e) {
  auto d = derive(sys, t, e);
  return d ? term_to_string(sys, d->residual) + " ; " + to_text(d->subst) : "none";
}

}  // namespace

TEST(Step, SinglePatternBinds) {
  auto sys = open_close_spec("Main = open(fd);");
  auto t = step(*sys, initial_state(*sys), open_ev(42));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->next.current, sys->eps());
  EXPECT_EQ(t->emitted, (Substitution{{"fd", 42}}));
  EXPECT_EQ(t->next.bound_so_far, t->emitted);
  EXPECT_EQ(t->next.steps_taken, 1u);
}

TEST(Step, EmptyNeverSteps) {
  auto sys = open_close_spec("Main = empty;");
  EXPECT_FALSE(step(*sys, initial_state(*sys), open_ev(1)));
}

TEST(Step, OptionalPrefixRejectsAB) {
  auto sys = parse_spec(letter_decls("ab") + "Main = (a \\/ empty) ((a b) \\/ empty);");
  auto s1 = step(*sys, initial_state(*sys), ev(R"({"t": "a"})"));
  ASSERT_TRUE(s1);
  EXPECT_EQ(term_to_string(*sys, s1->next.current), "empty (a() b() \\/ empty)");
  EXPECT_FALSE(step(*sys, s1->next, ev(R"({"t": "b"})")));
}

TEST(Step, UnionPrefersLeft) {
  auto sys = params("Main = a(x) \\/ a(1);");
  EXPECT_EQ(residual(*sys, sys->entry_term(), a(1)), "empty ; {x↦1}");
  auto sys2 = params("Main = a(1) \\/ a(x);");
  EXPECT_EQ(residual(*sys2, sys2->entry_term(), a(1)), "empty ; {}");
  EXPECT_EQ(residual(*sys2, sys2->entry_term(), a(2)), "empty ; {x↦2}");
}

TEST(Step, ShufflePrefersLeft) {
  auto sys = params("Main = a(x) b(x) | a(2);");
  EXPECT_EQ(residual(*sys, sys->entry_term(), a(2)), "empty b(x) | a(2) ; {x↦2}");
  EXPECT_EQ(residual(*sys, sys->entry_term(), b(1)), "none");
}

TEST(Step, ConcatenationMovesRightOnlyPastNullableLeft) {
  auto sys = params("Main = a(1) b(1); N = (a(1) \\/ empty) b(1);");
  EXPECT_EQ(residual(*sys, sys->entry_term(), b(1)), "none");
  auto n = sys->ref(*sys->find_equation("N"));
  EXPECT_EQ(residual(*sys, n, b(1)), "empty ; {}");
  EXPECT_EQ(residual(*sys, n, a(1)), "empty b(1) ; {}");
}

TEST(Step, IntersectionMergesOrFails) {
  auto sys = params("Main = a(x) /\\ a(y); C = a(x) /\\ a(1) b(x);");
  EXPECT_EQ(residual(*sys, sys->entry_term(), a(3)), "empty /\\ empty ; {x↦3, y↦3}");
  EXPECT_EQ(residual(*sys, sys->entry_term(), b(3)), "none");
}

TEST(Step, IntersectionMergeConflictIsReportedDistinctly) {
  auto sys = parse_spec("event p(x, y) matches {l: x, r: y};\nMain = p(x, z) /\\ p(z, x); N = p(x, 1) /\\ p(2, x);");
  EXPECT_EQ(residual(*sys, sys->entry_term(), ev(R"({"l": 3, "r": 3})")), "empty /\\ empty ; {x↦3, z↦3}");
  StepFailure why;
  EXPECT_FALSE(derive(*sys, sys->entry_term(), ev(R"({"l": 3, "r": 4})"), &why));
  EXPECT_EQ(why.kind, FailureKind::merge_conflict);
  // One operand cannot consume at all: an ordinary failure.
  auto n = sys->ref(*sys->find_equation("N"));
  EXPECT_FALSE(derive(*sys, n, ev(R"({"l": 3, "r": 1})"), &why));
  EXPECT_EQ(why.kind, FailureKind::no_transition);
}

TEST(Step, BlockConsumesItsVariable) {
  auto sys = open_close_spec("Main = {let fd; open(fd) close(fd)};");
  auto t = step(*sys, initial_state(*sys), open_ev(42));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->emitted, Substitution{});
  EXPECT_EQ(term_to_string(*sys, t->next.current), "empty close(42)");
}

TEST(Step, BlockKeptWhenVariableUnbound) {
  auto sys = params("Main = {let x; c a(x)};");
  auto d = derive(*sys, sys->entry_term(), c());
  ASSERT_TRUE(d);
  EXPECT_EQ(term_to_string(*sys, d->residual), "{let x; empty a(x)}");
}

TEST(Step, EmittedSubstitutionIsAppliedToResidual) {
  auto sys = params("Main = a(x) b(x);");
  auto t = step(*sys, initial_state(*sys), a(5));
  ASSERT_TRUE(t);
  EXPECT_EQ(term_to_string(*sys, t->next.current), "empty b(5)");
  EXPECT_FALSE(step(*sys, t->next, b(6)));
  EXPECT_TRUE(step(*sys, t->next, b(5)));
}

TEST(Step, EmittedVariablesAreFree) {
  // dom(σ) ∪ fv(t') ⊆ fv(t) for every step.
  auto sys = params("Main = {let y; a(x) b(y) Main} | (a(y) \\/ b(x)) /\\ (a(x) \\/ c);");
  std::vector<Event> events{a(1), a(2), b(1), b(2), c()};
  std::vector<TermId> frontier{sys->entry_term()};
  std::set<TermId> seen;
  for (int depth = 0; depth < 4; ++depth) {
    std::vector<TermId> next;
    for (TermId t : frontier) {
      if (!seen.insert(t).second) continue;
      const VarSet fv = fv_term(*sys, t);
      for (const Event& e : events) {
        auto d = derive(*sys, t, e);
        if (!d) continue;
        for (const auto& [k, v] : d->subst) EXPECT_TRUE(fv.count(k)) << k;
        for (const auto& v : fv_term(*sys, d->residual)) EXPECT_TRUE(fv.count(v)) << v;
        next.push_back(apply_subst_term(*sys, d->subst, d->residual));
      }
    }
    frontier = std::move(next);
  }
}

TEST(Step, IsDeterministic) {
  auto sys = params("Main = {let x; a(x) (b(x) \\/ a(x)) Main} | c;");
  auto s0 = initial_state(*sys);
  auto t1 = step(*sys, s0, a(1));
  auto t2 = step(*sys, s0, a(1));
  ASSERT_TRUE(t1 && t2);
  EXPECT_EQ(t1->next.current, t2->next.current);
  EXPECT_EQ(t1->emitted, t2->emitted);
}

TEST(Step, LeftChoiceIndependentOfRightOperand) {
  auto s1 = params("Main = a(x) b(x) \\/ a(1) c;");
  auto s2 = params("Main = a(x) b(x) \\/ c;");
  EXPECT_EQ(residual(*s1, s1->entry_term(), a(1)), residual(*s2, s2->entry_term(), a(1)));
}

TEST(Step, NonContractiveTermExhaustsBudget) {
  auto sys = params("Main = Main \\/ Main;");
  EXPECT_THROW(step(*sys, initial_state(*sys), c()), BudgetExceeded);
}

TEST(Verdict, FreshStates) {
  auto e = open_close_spec("Main = empty;");
  EXPECT_EQ(verdict(*e, initial_state(*e)), Verdict::accepting_prefix);
  auto o = open_close_spec("Main = open(fd);");
  EXPECT_EQ(verdict(*o, initial_state(*o)), Verdict::ongoing_prefix);
}

TEST(Monitor, ViolationIsAbsorbing) {
  auto sys = open_close_spec("Main = open(fd) \\/ empty;");
  Monitor m(*sys);
  EXPECT_FALSE(m.feed(close_ev(1)));
  EXPECT_EQ(m.verdict(), Verdict::violation);
  EXPECT_FALSE(m.feed(open_ev(1)));
  EXPECT_EQ(m.verdict(), Verdict::violation);
}

TEST(Run, EmptyTraceOnEmpty) {
  auto sys = open_close_spec("Main = empty;");
  auto r = run(*sys, {});
  EXPECT_EQ(r.verdict, Verdict::accepting_prefix);
  EXPECT_TRUE(r.emitted.empty());
  EXPECT_EQ(r.consumed, 0u);
}

TEST(Run, OpenCloseWithNestedBlock) {
  auto sys = open_close_spec("Main = {let fd; open(fd) close(fd) Main};");
  std::vector<Event> events{open_ev(42), close_ev(42), open_ev(7), close_ev(7)};
  auto r = run(*sys, events);
  EXPECT_EQ(r.consumed, 4u);
  EXPECT_EQ(r.emitted, std::vector<Substitution>(4));
  // Back at Main, which needs another open: not nullable.
  EXPECT_EQ(r.verdict, Verdict::ongoing_prefix);
}

TEST(Run, OpenCloseWithEmptyAlternativeAccepts) {
  auto sys = open_close_spec("Main = {let fd; open(fd) close(fd) Main} \\/ empty;");
  std::vector<Event> events{open_ev(42), close_ev(42), open_ev(7), close_ev(7)};
  auto r = run(*sys, events);
  EXPECT_EQ(r.consumed, 4u);
  EXPECT_EQ(r.verdict, Verdict::accepting_prefix);
}

TEST(Run, OpenCloseMismatchViolatesAtOne) {
  auto sys = open_close_spec("Main = {let fd; open(fd) close(fd) Main};");
  std::vector<Event> events{open_ev(42), close_ev(7)};
  auto r = run(*sys, events);
  EXPECT_EQ(r.verdict, Verdict::violation);
  EXPECT_EQ(r.consumed, 1u);
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->kind, FailureKind::no_transition);
}

TEST(Run, GlobalDescriptorViolatesAtTwo) {
  auto sys = open_close_spec("Main = {let fd; T}; T = open(fd) close(fd) T;");
  std::vector<Event> events{open_ev(42), close_ev(42), open_ev(7)};
  auto r = run(*sys, events);
  EXPECT_EQ(r.verdict, Verdict::violation);
  EXPECT_EQ(r.consumed, 2u);
  std::vector<Event> same{open_ev(42), close_ev(42), open_ev(42)};
  EXPECT_EQ(run(*sys, same).verdict, Verdict::ongoing_prefix);
}

TEST(Run, TopLevelBindingsAreDisjointAndAccumulate) {
  auto sys = params("Main = a(x) b(y) (a(x) \\/ b(y));");
  std::vector<Event> events{a(1), b(2), b(2)};
  auto r = run(*sys, events);
  EXPECT_EQ(r.verdict, Verdict::accepting_prefix);
  ASSERT_EQ(r.emitted.size(), 3u);
  EXPECT_EQ(r.emitted[0], (Substitution{{"x", 1}}));
  EXPECT_EQ(r.emitted[1], (Substitution{{"y", 2}}));
  EXPECT_EQ(r.emitted[2], Substitution{});
  EXPECT_EQ(r.final_state.bound_so_far, (Substitution{{"x", 1}, {"y", 2}}));
}
