#pragma once

// Concrete syntax: lexer, recursive-descent parser and pretty printer.
//
//   spec     := {etype ';'} {equation ';'}
//   etype    := 'event' NAME '(' [NAME {',' NAME}] ')' 'matches' bexpr
//   equation := NAME '=' texp
//   texp     := andexp {'\/' andexp}
//   andexp   := shexp {'/\' shexp}
//   shexp    := catexp {'|' catexp}
//   catexp   := atom {atom}
//   atom     := 'empty' | NAME '(' [bexpr {',' bexpr}] ')' | NAME
//             | '{' 'let' NAME ';' texp '}' | '(' texp ')'
//
// A bare NAME is an equation reference, or a zero-arity event type pattern
// when no equation of that name exists. The entry equation is Main.

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rmltc/errors.hpp"
#include "rmltc/event_model.hpp"
#include "rmltc/spec_system.hpp"

namespace rmltc {

namespace detail {

enum class Tok {
  name, integer, decimal, string,
  semi, comma, lparen, rparen, lbrace, rbrace, lbracket, rbracket, colon, equals,
  bar, and_op, or_op, end,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line = 0, col = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      Token t{Tok::end, "", line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t b = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.kind = Tok::name;
        t.text = std::string(src_.substr(b, pos_ - b));
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
        lex_number(t);
      } else if (c == '"' || c == '\'') {
        t.kind = Tok::string;
        t.text = lex_string(c);
      } else if (c == '/' && peek(1) == '\\') {
        advance(2);
        t.kind = Tok::and_op;
        t.text = "/\\";
      } else if (c == '\\' && peek(1) == '/') {
        advance(2);
        t.kind = Tok::or_op;
        t.text = "\\/";
      } else {
        static const std::map<char, Tok> single = {
            {';', Tok::semi},     {',', Tok::comma},    {'(', Tok::lparen}, {')', Tok::rparen},
            {'{', Tok::lbrace},   {'}', Tok::rbrace},   {'[', Tok::lbracket}, {']', Tok::rbracket},
            {':', Tok::colon},    {'=', Tok::equals},   {'|', Tok::bar}};
        auto it = single.find(c);
        if (it == single.end()) fail(std::string("unexpected character '") + c + "'");
        t.kind = it->second;
        t.text = std::string(1, c);
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw SpecError(SpecErrorKind::syntax, msg, line_, col_);
  }

  char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void advance(std::size_t n = 1) {
    for (; n && pos_ < src_.size(); --n, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      } else if (src_[pos_] == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  void lex_number(Token& t) {
    std::size_t b = pos_;
    bool frac = false;
    if (src_[pos_] == '-') advance();
    if (!std::isdigit(static_cast<unsigned char>(peek(0)))) fail("malformed number");
    while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
    if (peek(0) == '.') {
      frac = true;
      advance();
      if (!std::isdigit(static_cast<unsigned char>(peek(0)))) fail("malformed number");
      while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
    }
    if (peek(0) == 'e' || peek(0) == 'E') {
      frac = true;
      advance();
      if (peek(0) == '+' || peek(0) == '-') advance();
      if (!std::isdigit(static_cast<unsigned char>(peek(0)))) fail("malformed number");
      while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
    }
    t.kind = frac ? Tok::decimal : Tok::integer;
    t.text = std::string(src_.substr(b, pos_ - b));
  }

  // Returns the decoded string contents.
  std::string lex_string(char quote) {
    std::string json = "\"";
    advance();
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated string");
      char c = src_[pos_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\') {
        char n = peek(1);
        if (n == '\'') {
          json += '\'';
        } else {
          json += '\\';
          json += n;
        }
        advance(2);
        continue;
      }
      if (c == '"') json += '\\';
      json += c;
      advance();
    }
    json += '"';
    try {
      return nlohmann::json::parse(json).get<std::string>();
    } catch (const nlohmann::json::exception&) {
      fail("invalid string literal");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

/// Unresolved term tree; names are resolved once all equations are known.
struct Ast {
  enum class Kind { eps, pattern, name, binary, block } kind = Kind::eps;
  std::string name;
  std::vector<BasicDataExpr> args;
  BinOp op = BinOp::cat;
  std::vector<Ast> kids;
  std::size_t line = 0, col = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, SpecSystem& sys) : toks_(std::move(toks)), sys_(sys) {}

  void parse() {
    while (at_name("event")) {
      parse_decl();
      expect(Tok::semi, "';'");
    }
    collect_equation_names();
    std::vector<std::pair<EquationId, Ast>> bodies;
    std::map<std::string, EquationId> ids;
    while (cur().kind != Tok::end) {
      const Token& name = expect(Tok::name, "equation name");
      if (ids.count(name.text)) {
        throw SpecError(SpecErrorKind::duplicate_definition,
                        "equation '" + name.text + "' is defined twice", name.line, name.col);
      }
      if (sys_.decls.count(name.text)) {
        throw SpecError(SpecErrorKind::duplicate_definition,
                        "'" + name.text + "' names both an event type and an equation", name.line,
                        name.col);
      }
      expect(Tok::equals, "'='");
      EquationId id = sys_.add_equation(name.text);
      ids.emplace(name.text, id);
      bodies.emplace_back(id, parse_or());
      expect(Tok::semi, "';'");
    }
    for (auto& [id, ast] : bodies) sys_.define_equation(id, build(ast, ids));
    auto main = ids.find("Main");
    if (main == ids.end()) throw SpecError(SpecErrorKind::missing_entry, "no equation named Main");
    sys_.set_entry(main->second);
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& next_tok() const { return toks_[std::min(pos_ + 1, toks_.size() - 1)]; }
  bool at_name(const char* word) const { return cur().kind == Tok::name && cur().text == word; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SpecError(SpecErrorKind::syntax,
                    msg + (cur().kind == Tok::end ? " at end of input" : ", found '" + cur().text + "'"),
                    cur().line, cur().col);
  }

  const Token& expect(Tok k, const char* what) {
    if (cur().kind != k) fail(std::string("expected ") + what);
    return toks_[pos_++];
  }

  void expect_word(const char* word) {
    if (!at_name(word)) fail(std::string("expected '") + word + "'");
    ++pos_;
  }

  void collect_equation_names() {
    for (std::size_t i = pos_; i + 1 < toks_.size(); ++i) {
      bool starts = i == pos_ || toks_[i - 1].kind == Tok::semi;
      if (starts && toks_[i].kind == Tok::name && toks_[i + 1].kind == Tok::equals) {
        equations_.insert(toks_[i].text);
      }
    }
  }

  void parse_decl() {
    const Token& kw = cur();
    expect_word("event");
    const Token& name = expect(Tok::name, "event type name");
    if (sys_.decls.count(name.text)) {
      throw SpecError(SpecErrorKind::duplicate_definition,
                      "event type '" + name.text + "' is declared twice", name.line, name.col);
    }
    EventTypeDecl decl{name.text, {}, BasicDataExpr::object({})};
    expect(Tok::lparen, "'('");
    if (cur().kind != Tok::rparen) {
      for (;;) {
        const Token& p = expect(Tok::name, "parameter name");
        if (std::find(decl.params.begin(), decl.params.end(), p.text) != decl.params.end()) {
          throw SpecError(SpecErrorKind::invalid_declaration,
                          "parameter '" + p.text + "' is repeated", p.line, p.col);
        }
        decl.params.push_back(p.text);
        if (cur().kind != Tok::comma) break;
        ++pos_;
      }
    }
    expect(Tok::rparen, "')'");
    expect_word("matches");
    const Token& body_at = cur();
    decl.body = parse_bexpr();
    if (!std::holds_alternative<BasicDataExpr::ObjectExpr>(decl.body.node)) {
      throw SpecError(SpecErrorKind::invalid_declaration,
                      "event type '" + decl.name + "' must match an object template", body_at.line,
                      body_at.col);
    }
    VarSet params(decl.params.begin(), decl.params.end());
    for (const auto& v : pfv(decl.body)) {
      if (!params.count(v)) {
        throw SpecError(SpecErrorKind::invalid_declaration,
                        "variable '" + v + "' in event type '" + decl.name + "' is not a parameter",
                        kw.line, kw.col);
      }
    }
    sys_.decls.emplace(decl.name, std::move(decl));
  }

  BasicDataExpr parse_bexpr() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::name:
        ++pos_;
        if (t.text == "true") return BasicDataExpr::literal(true);
        if (t.text == "false") return BasicDataExpr::literal(false);
        if (t.text == "null") return BasicDataExpr::literal(nullptr);
        return BasicDataExpr::var(t.text);
      case Tok::integer: {
        ++pos_;
        errno = 0;
        long long v = std::strtoll(t.text.c_str(), nullptr, 10);
        if (errno == ERANGE) return BasicDataExpr::literal(Decimal::from_double(std::strtod(t.text.c_str(), nullptr)));
        return BasicDataExpr::literal(static_cast<std::int64_t>(v));
      }
      case Tok::decimal:
        ++pos_;
        return BasicDataExpr::literal(Decimal::from_double(std::strtod(t.text.c_str(), nullptr)));
      case Tok::string:
        ++pos_;
        return BasicDataExpr::literal(t.text);
      case Tok::lbracket: {
        ++pos_;
        std::vector<BasicDataExpr> items;
        if (cur().kind != Tok::rbracket) {
          for (;;) {
            items.push_back(parse_bexpr());
            if (cur().kind != Tok::comma) break;
            ++pos_;
          }
        }
        expect(Tok::rbracket, "']'");
        return BasicDataExpr::array(std::move(items));
      }
      case Tok::lbrace: {
        ++pos_;
        std::vector<ExprMember> ms;
        std::set<std::string> keys;
        if (cur().kind != Tok::rbrace) {
          for (;;) {
            const Token& k = cur();
            if (k.kind != Tok::string && k.kind != Tok::name) fail("expected object key");
            ++pos_;
            if (!keys.insert(k.text).second) {
              throw SpecError(SpecErrorKind::syntax, "duplicate key '" + k.text + "'", k.line, k.col);
            }
            expect(Tok::colon, "':'");
            ms.push_back(ExprMember{k.text, parse_bexpr()});
            if (cur().kind != Tok::comma) break;
            ++pos_;
          }
        }
        expect(Tok::rbrace, "'}'");
        return BasicDataExpr::object(std::move(ms));
      }
      default:
        fail("expected a data expression");
    }
  }

  Ast node_here(Ast::Kind k) const {
    Ast a;
    a.kind = k;
    a.line = cur().line;
    a.col = cur().col;
    return a;
  }

  Ast binary(BinOp op, Ast l, Ast r) {
    Ast a;
    a.kind = Ast::Kind::binary;
    a.op = op;
    a.line = l.line;
    a.col = l.col;
    a.kids.push_back(std::move(l));
    a.kids.push_back(std::move(r));
    return a;
  }

  Ast parse_or() {
    Ast l = parse_and();
    while (cur().kind == Tok::or_op) {
      ++pos_;
      l = binary(BinOp::or_, std::move(l), parse_and());
    }
    return l;
  }

  Ast parse_and() {
    Ast l = parse_shuffle();
    while (cur().kind == Tok::and_op) {
      ++pos_;
      l = binary(BinOp::and_, std::move(l), parse_shuffle());
    }
    return l;
  }

  Ast parse_shuffle() {
    Ast l = parse_cat();
    while (cur().kind == Tok::bar) {
      ++pos_;
      l = binary(BinOp::shuffle, std::move(l), parse_cat());
    }
    return l;
  }

  bool starts_atom() const {
    switch (cur().kind) {
      case Tok::name:
      case Tok::lparen: return true;
      case Tok::lbrace: return next_tok().kind == Tok::name && next_tok().text == "let";
      default: return false;
    }
  }

  bool nullary_before_group() const {
    auto d = sys_.decls.find(cur().text);
    if (d == sys_.decls.end() || !d->second.params.empty()) return false;
    const Token& open = next_tok();
    const bool adjacent = open.line == cur().line && open.col == cur().col + cur().text.size();
    return !adjacent && pos_ + 2 < toks_.size() && toks_[pos_ + 2].kind != Tok::rparen;
  }

  Ast parse_cat() {
    Ast l = parse_atom();
    while (starts_atom()) l = binary(BinOp::cat, std::move(l), parse_atom());
    return l;
  }

  Ast parse_atom() {
    if (at_name("empty")) {
      Ast a = node_here(Ast::Kind::eps);
      ++pos_;
      return a;
    }
    if (cur().kind == Tok::name) {
      // NAME '(' is a pattern unless NAME is an equation, or a zero-arity
      // event type separated from a non-empty group by whitespace; then the
      // parenthesis opens the next atom of a concatenation.
      if (next_tok().kind == Tok::lparen && !equations_.count(cur().text) && !nullary_before_group()) {
        Ast a = node_here(Ast::Kind::pattern);
        a.name = cur().text;
        pos_ += 2;
        if (cur().kind != Tok::rparen) {
          for (;;) {
            a.args.push_back(parse_bexpr());
            if (cur().kind != Tok::comma) break;
            ++pos_;
          }
        }
        expect(Tok::rparen, "')'");
        return a;
      }
      Ast a = node_here(Ast::Kind::name);
      a.name = cur().text;
      ++pos_;
      return a;
    }
    if (cur().kind == Tok::lbrace) {
      Ast a = node_here(Ast::Kind::block);
      ++pos_;
      expect_word("let");
      a.name = expect(Tok::name, "variable name").text;
      expect(Tok::semi, "';'");
      a.kids.push_back(parse_or());
      expect(Tok::rbrace, "'}'");
      return a;
    }
    if (cur().kind == Tok::lparen) {
      ++pos_;
      Ast a = parse_or();
      expect(Tok::rparen, "')'");
      return a;
    }
    fail("expected a trace expression");
  }

  TermId build(const Ast& a, const std::map<std::string, EquationId>& ids) {
    switch (a.kind) {
      case Ast::Kind::eps: return sys_.eps();
      case Ast::Kind::pattern: {
        EventTypePattern p{a.name, a.args};
        try {
          lookup_decl(sys_.decls, p);
        } catch (const SpecError& e) {
          throw SpecError(e.kind(), e.what(), a.line, a.col);
        }
        return sys_.pattern(std::move(p));
      }
      case Ast::Kind::name: {
        if (auto it = ids.find(a.name); it != ids.end()) return sys_.ref(it->second);
        if (auto d = sys_.decls.find(a.name); d != sys_.decls.end()) {
          if (!d->second.params.empty()) {
            throw SpecError(SpecErrorKind::arity_mismatch,
                            "event type '" + a.name + "' expects " +
                                std::to_string(d->second.params.size()) + " argument(s), got 0",
                            a.line, a.col);
          }
          return sys_.pattern(EventTypePattern{a.name, {}});
        }
        throw SpecError(SpecErrorKind::unknown_equation, "unknown equation '" + a.name + "'", a.line,
                        a.col);
      }
      case Ast::Kind::binary: {
        TermId l = build(a.kids[0], ids);
        TermId r = build(a.kids[1], ids);
        return sys_.binary(a.op, l, r);
      }
      case Ast::Kind::block: return sys_.block(a.name, build(a.kids[0], ids));
    }
    return sys_.eps();
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SpecSystem& sys_;
  std::set<std::string> equations_;
};

}  // namespace detail

/// Parses `src` into `sys` (which should be fresh).
inline void parse_spec_into(std::string_view src, SpecSystem& sys) {
  detail::Parser p(detail::Lexer(src).run(), sys);
  p.parse();
}

inline std::unique_ptr<SpecSystem> parse_spec(std::string_view src) {
  auto sys = std::make_unique<SpecSystem>();
  parse_spec_into(src, *sys);
  return sys;
}

/// Identifier-safe equation names; specialized equations get their
/// substitution folded into the name. The entry equation is always Main.
inline std::map<std::uint32_t, std::string> printable_names(const SpecSystem& sys) {
  std::map<std::uint32_t, std::string> out;
  std::set<std::string> used;
  for (const auto& [name, d] : sys.decls) used.insert(name);
  used.insert("empty");
  used.insert("Main");
  const auto entry = sys.entry();
  if (entry) out.emplace(entry->value, "Main");
  for (std::uint32_t i = 0; i < sys.equation_count(); ++i) {
    if (entry && entry->value == i) continue;
    const std::string& raw = sys.equation(EquationId{i}).name;
    std::string base;
    for (unsigned char c : raw) {
      if (std::isalnum(c) || c == '_') {
        base += static_cast<char>(c);
      } else if (!base.empty() && base.back() != '_') {
        base += '_';
      }
    }
    while (!base.empty() && base.back() == '_') base.pop_back();
    if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0]))) base = "E" + base;
    std::string name = base;
    for (int k = 2; used.count(name); ++k) name = base + "_" + std::to_string(k);
    used.insert(name);
    out.emplace(i, name);
  }
  return out;
}

/// Renders a system back to concrete syntax. Parsing the result gives a
/// structurally identical system.
inline std::string print_spec(const SpecSystem& sys) {
  std::scoped_lock lock(sys.mutex());
  std::string out;
  for (const auto& [name, d] : sys.decls) {
    out += "event " + name + "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) out += ", ";
      out += d.params[i];
    }
    out += ") matches " + to_text(d.body) + ";\n";
  }
  const auto names = printable_names(sys);
  for (std::uint32_t i = 0; i < sys.equation_count(); ++i) {
    const auto& eq = sys.equation(EquationId{i});
    if (!eq.body) continue;
    out += names.at(i) + " = ";
    detail::print_term(sys, *eq.body, 0, out, &names);
    out += ";\n";
  }
  return out;
}

}  // namespace rmltc
