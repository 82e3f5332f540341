#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace rmltc;
using namespace rmltc::testing;

namespace {

SpecError error_of(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SpecError& e) {
    return e;
  }
  ADD_FAILURE() << "parsed without error: " << text;
  return SpecError(SpecErrorKind::syntax, "none");
}

std::string body(const SpecSystem& sys, const char* eq) {
  return term_to_string(sys, sys.equation_body(*sys.find_equation(eq)));
}

}  // namespace

TEST(Parser, OpenCloseSpec) {
  auto sys = open_close_spec("Main = {let fd; open(fd) close(fd) Main};");
  EXPECT_EQ(sys->decls.size(), 2u);
  EXPECT_EQ(sys->decls.at("open").params, std::vector<std::string>{"fd"});
  EXPECT_EQ(body(*sys, "Main"), "{let fd; open(fd) close(fd) Main}");
  EXPECT_EQ(sys->entry_term(), sys->ref(*sys->find_equation("Main")));
}

TEST(Parser, Precedence) {
  // Loosest to tightest: \/, /\, |, juxtaposition.
  auto sys = parse_spec(letter_decls("abcd") + "Main = a b | c /\\ d \\/ a;");
  const auto& top = std::get<term::Binary>(sys->node(sys->equation_body(*sys->find_equation("Main"))));
  EXPECT_EQ(top.op, BinOp::or_);
  const auto& conj = std::get<term::Binary>(sys->node(top.lhs));
  EXPECT_EQ(conj.op, BinOp::and_);
  const auto& sh = std::get<term::Binary>(sys->node(conj.lhs));
  EXPECT_EQ(sh.op, BinOp::shuffle);
  EXPECT_EQ(std::get<term::Binary>(sys->node(sh.lhs)).op, BinOp::cat);
}

TEST(Parser, BinaryOperatorsAssociateLeft) {
  auto sys = parse_spec(letter_decls("abc") + "Main = a \\/ b \\/ c;");
  const auto& top = std::get<term::Binary>(sys->node(sys->equation_body(*sys->find_equation("Main"))));
  EXPECT_TRUE(std::holds_alternative<term::Binary>(sys->node(top.lhs)));
  EXPECT_TRUE(std::holds_alternative<term::Pat>(sys->node(top.rhs)));
}

TEST(Parser, BareNamesAndGroups) {
  auto sys = parse_spec(letter_decls("abc") + "Main = a (b /\\ c) A; A = a() (b);");
  EXPECT_EQ(body(*sys, "Main"), "a() (b() /\\ c()) A");
  EXPECT_EQ(body(*sys, "A"), "a() b()");
}

TEST(Parser, EquationNameBeforeGroupIsConcatenation) {
  auto sys = parse_spec(letter_decls("ab") + "Main = A (a \\/ b); A = a;");
  EXPECT_EQ(body(*sys, "Main"), "A (a() \\/ b())");
}

TEST(Parser, CommentsQuotesAndLiterals) {
  auto sys = parse_spec(
      "// declarations\n"
      "event p(x) matches {\"kind\": 'p', value: x, tags: [1, 2.5, true, null, \"s\"]};\n"
      "Main = p(1) p(-2) p(\"str\") p(2.0) p([x, {k: 3}]); // trailing\n");
  EXPECT_EQ(body(*sys, "Main"), R"(p(1) p(-2) p("str") p(2.0) p([x, {"k": 3}]))");
}

TEST(Parser, EmptyKeywordAndNestedBlocks) {
  auto sys = open_close_spec("Main = {let x; {let y; open(x) close(y)} \\/ empty};");
  EXPECT_EQ(body(*sys, "Main"), "{let x; {let y; open(x) close(y)} \\/ empty}");
  EXPECT_EQ(fv_term(*sys, sys->entry_term()), VarSet{});
}

TEST(Parser, NonContractiveSpecParses) {
  auto sys = parse_spec(letter_decls("a") + "Main = Main \\/ Main;");
  EXPECT_FALSE(check_contractive(*sys).contractive());
}

TEST(ParserErrors, SyntaxWithPosition) {
  auto e = error_of(letter_decls("a") + "Main = a \\/ ;");
  EXPECT_EQ(e.kind(), SpecErrorKind::syntax);
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 13u);
  EXPECT_EQ(error_of(letter_decls("a") + "Main = (a;").kind(), SpecErrorKind::syntax);
  EXPECT_EQ(error_of(letter_decls("a") + "Main = a").kind(), SpecErrorKind::syntax);
  EXPECT_EQ(error_of(letter_decls("a") + "Main = {let; a};").kind(), SpecErrorKind::syntax);
  EXPECT_EQ(error_of(letter_decls("a") + "Main = a # a;").kind(), SpecErrorKind::syntax);
}

TEST(ParserErrors, UnknownNames) {
  EXPECT_EQ(error_of(letter_decls("a") + "Main = b;").kind(), SpecErrorKind::unknown_equation);
  auto e = error_of(letter_decls("a") + "Main = a q(1);");
  EXPECT_EQ(e.kind(), SpecErrorKind::unknown_event_type);
  EXPECT_EQ(e.line(), 2u);
}

TEST(ParserErrors, ArityMismatch) {
  EXPECT_EQ(error_of(open_close_decls + std::string("Main = open(1, 2);")).kind(), SpecErrorKind::arity_mismatch);
  EXPECT_EQ(error_of(open_close_decls + std::string("Main = open;")).kind(), SpecErrorKind::arity_mismatch);
  EXPECT_EQ(error_of(letter_decls("a") + "Main = a(1);").kind(), SpecErrorKind::arity_mismatch);
}

TEST(ParserErrors, Duplicates) {
  EXPECT_EQ(error_of(letter_decls("a") + "Main = a; Main = a;").kind(), SpecErrorKind::duplicate_definition);
  EXPECT_EQ(error_of(letter_decls("aa") + "Main = a;").kind(), SpecErrorKind::duplicate_definition);
  EXPECT_EQ(error_of(letter_decls("a") + "Main = a; a = a;").kind(), SpecErrorKind::duplicate_definition);
}

TEST(ParserErrors, InvalidDeclarations) {
  EXPECT_EQ(error_of("event p(x) matches [x];\nMain = empty;").kind(), SpecErrorKind::invalid_declaration);
  EXPECT_EQ(error_of("event p(x) matches {v: y};\nMain = empty;").kind(), SpecErrorKind::invalid_declaration);
  EXPECT_EQ(error_of("event p(x, x) matches {v: x};\nMain = empty;").kind(), SpecErrorKind::invalid_declaration);
}

TEST(ParserErrors, MissingEntry) {
  EXPECT_EQ(error_of(letter_decls("a") + "A = a;").kind(), SpecErrorKind::missing_entry);
}

TEST(Printer, RoundTripIsAFixpoint) {
  const std::vector<std::string> specs{
      open_close_decls + std::string("Main = {let fd; open(fd) close(fd) Main} \\/ empty;"),
      letter_decls("abc") + "Main = (a \\/ empty) ((a b) \\/ empty) | c /\\ A; A = a (b | c) A \\/ (a \\/ b) c;",
      "event p(x, y) matches {l: x, r: [y, {k: 'v'}]};\nMain = p(1, \"s\") (p(x, 2.5) \\/ {let x; p(x, x)});",
  };
  for (const auto& text : specs) {
    auto first = parse_spec(text);
    const std::string once = print_spec(*first);
    auto second = parse_spec(once);
    EXPECT_EQ(print_spec(*second), once) << text;
    EXPECT_EQ(fv_term(*first, first->entry_term()), fv_term(*second, second->entry_term()));
    EXPECT_EQ(accepts_empty(*first, first->entry_term()), accepts_empty(*second, second->entry_term()));
  }
}

TEST(Printer, SpecializedEquationsGetIdentifierNames) {
  auto sys = open_close_spec("Main = open(fd) close(fd) Main;");
  TermId t = apply_subst_term(*sys, {{"fd", 42}}, sys->entry_term());
  sys->set_entry(std::get<term::Ref>(sys->node(t)).eq);
  const std::string text = print_spec(*sys);
  auto again = parse_spec(text);
  EXPECT_EQ(print_spec(*again), text);
  EXPECT_EQ(fv_term(*again, again->entry_term()), VarSet{});
}

TEST(Printer, GeneratedCorpusRoundTrips) {
  for (const auto& g : generate_corpus(3, 25)) {
    const std::string once = print_spec(*g.sys);
    EXPECT_EQ(print_spec(*parse_spec(once)), once) << g.text;
  }
}
