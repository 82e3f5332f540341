#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace rmltc;
using namespace rmltc::testing;

namespace {

std::unique_ptr<SpecSystem> letters(const std::string& eqs) { return parse_spec(letter_decls("abc") + eqs); }

}  // namespace

TEST(Emptiness, Clauses) {
  auto sys = letters("Main = empty; A = a; B = a \\/ empty; C = empty | empty /\\ (empty empty); D = {let x; empty};");
  auto body = [&](const char* n) { return sys->equation_body(*sys->find_equation(n)); };
  EXPECT_TRUE(accepts_empty(*sys, body("Main")));
  EXPECT_FALSE(accepts_empty(*sys, body("A")));
  EXPECT_TRUE(accepts_empty(*sys, body("B")));
  EXPECT_TRUE(accepts_empty(*sys, body("C")));
  EXPECT_TRUE(accepts_empty(*sys, body("D")));
}

TEST(Emptiness, CyclesAreLeastFixpoint) {
  // X = X \/ empty is nullable through the right branch; Y = Y | a never is.
  auto sys = letters("Main = a Main \\/ empty; Y = a Y;");
  EXPECT_TRUE(accepts_empty(*sys, sys->entry_term()));
  EXPECT_FALSE(accepts_empty(*sys, sys->ref(*sys->find_equation("Y"))));
}

TEST(Contractivity, GuardedRecursionIsAccepted) {
  auto sys = letters("Main = a Main;");
  EXPECT_TRUE(check_contractive(*sys).contractive());
}

TEST(Contractivity, LeftRecursionIsRejectedWithWitness) {
  auto sys = letters("Main = Main a;");
  auto c = check_contractive(*sys);
  ASSERT_FALSE(c.contractive());
  EXPECT_GE(c.witness->cycle.size(), 2u);
  EXPECT_EQ(c.witness->cycle.front(), c.witness->cycle.back());
  EXPECT_NE(c.witness->reason.find("Main"), std::string::npos);
}

TEST(Contractivity, UnionOfItselfIsRejected) {
  auto sys = letters("Main = Main \\/ Main;");
  auto c = check_contractive(*sys);
  ASSERT_FALSE(c.contractive());
  EXPECT_FALSE(c.witness->reason.empty());
}

TEST(Contractivity, NullableLeftDoesNotGuard) {
  EXPECT_FALSE(check_contractive(*letters("Main = (a \\/ empty) Main;")).contractive());
  EXPECT_FALSE(check_contractive(*letters("Main = {let x; empty} Main;")).contractive());
}

TEST(Contractivity, OnlyConcatenationGuards) {
  EXPECT_FALSE(check_contractive(*letters("Main = a | Main;")).contractive());
  EXPECT_FALSE(check_contractive(*letters("Main = a /\\ Main;")).contractive());
  EXPECT_FALSE(check_contractive(*letters("Main = {let x; Main};")).contractive());
  EXPECT_FALSE(check_contractive(*letters("Main = A; A = Main;")).contractive());
  EXPECT_TRUE(check_contractive(*letters("Main = (a Main) | (b Main) \\/ c;")).contractive());
}

TEST(Contractivity, UnreachableCycleThroughGuardIsStillChecked) {
  // The bad cycle is only reachable behind a guard; it must still be rejected.
  EXPECT_FALSE(check_contractive(*letters("Main = a B; B = B \\/ b;")).contractive());
}
