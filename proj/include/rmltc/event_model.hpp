#pragma once

// Event type patterns, declarations, matching and substitution algebra.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rmltc/data_value.hpp"
#include "rmltc/errors.hpp"

namespace rmltc {

/// Finite map from variable names to data values.
using Substitution = std::map<std::string, DataValue>;
using VarSet = std::set<std::string>;

struct BasicDataExpr;
struct ExprMember;

struct Variable {
  std::string name;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

/// Basic data expression: a variable, a primitive literal, or an object/array
/// of basic data expressions.
struct BasicDataExpr {
  struct ObjectExpr {
    std::vector<ExprMember> members;  // sorted by key
  };
  struct ArrayExpr {
    std::vector<BasicDataExpr> items;
  };

  std::variant<Variable, DataValue, ObjectExpr, ArrayExpr> node;

  static BasicDataExpr var(std::string name) { return BasicDataExpr{Variable{std::move(name)}}; }
  static BasicDataExpr literal(DataValue primitive) { return BasicDataExpr{std::move(primitive)}; }
  static BasicDataExpr object(std::vector<ExprMember> members);
  static BasicDataExpr array(std::vector<BasicDataExpr> items) {
    return BasicDataExpr{ArrayExpr{std::move(items)}};
  }
  /// Embeds a ground value structurally (objects and arrays become
  /// object/array expressions with literal leaves).
  static BasicDataExpr from_value(const DataValue& v);
};

struct ExprMember {
  std::string key;
  BasicDataExpr value;
};

inline BasicDataExpr BasicDataExpr::object(std::vector<ExprMember> members) {
  std::sort(members.begin(), members.end(),
            [](const ExprMember& a, const ExprMember& b) { return a.key < b.key; });
  return BasicDataExpr{ObjectExpr{std::move(members)}};
}

inline BasicDataExpr BasicDataExpr::from_value(const DataValue& v) {
  if (v.is_object()) {
    std::vector<ExprMember> ms;
    for (const auto& m : v.as_object()) ms.push_back(ExprMember{m.key, from_value(m.value)});
    return object(std::move(ms));
  }
  if (v.is_array()) {
    std::vector<BasicDataExpr> items;
    for (const auto& e : v.as_array()) items.push_back(from_value(e));
    return array(std::move(items));
  }
  return literal(v);
}

struct EventTypePattern {
  std::string name;
  std::vector<BasicDataExpr> args;
};

/// `event name(params) matches body`: one object-shaped template per name.
struct EventTypeDecl {
  std::string name;
  std::vector<std::string> params;
  BasicDataExpr body;
};

using DeclTable = std::map<std::string, EventTypeDecl>;

// Printing ------------------------------------------------------------------

inline std::string to_text(const BasicDataExpr& e);

inline std::string quote_key(const std::string& k) { return nlohmann::json(k).dump(); }

inline std::string to_text(const BasicDataExpr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Variable>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, DataValue>) {
          return to_text(n);
        } else if constexpr (std::is_same_v<T, BasicDataExpr::ObjectExpr>) {
          std::string out = "{";
          for (std::size_t i = 0; i < n.members.size(); ++i) {
            if (i) out += ", ";
            out += quote_key(n.members[i].key) + ": " + to_text(n.members[i].value);
          }
          return out + "}";
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (i) out += ", ";
            out += to_text(n.items[i]);
          }
          return out + "]";
        }
      },
      e.node);
}

inline std::string to_text(const EventTypePattern& p) {
  std::string out = p.name + "(";
  for (std::size_t i = 0; i < p.args.size(); ++i) {
    if (i) out += ", ";
    out += to_text(p.args[i]);
  }
  return out + ")";
}

inline std::string to_text(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : s) {
    if (!first) out += ", ";
    first = false;
    out += k + "↦" + to_text(v);
  }
  return out + "}";
}

inline nlohmann::json to_json(const Substitution& s) {
  auto out = nlohmann::json::object();
  for (const auto& [k, v] : s) out[k] = to_json(v);
  return out;
}

// Free variables ------------------------------------------------------------

inline void collect_pfv(const BasicDataExpr& e, VarSet& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Variable>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, BasicDataExpr::ObjectExpr>) {
          for (const auto& m : n.members) collect_pfv(m.value, out);
        } else if constexpr (std::is_same_v<T, BasicDataExpr::ArrayExpr>) {
          for (const auto& i : n.items) collect_pfv(i, out);
        }
      },
      e.node);
}

inline VarSet pfv(const BasicDataExpr& e) {
  VarSet out;
  collect_pfv(e, out);
  return out;
}

inline VarSet pfv(const EventTypePattern& p) {
  VarSet out;
  for (const auto& a : p.args) collect_pfv(a, out);
  return out;
}

// Substitution application --------------------------------------------------

inline BasicDataExpr apply_subst(const Substitution& s, const BasicDataExpr& e) {
  return std::visit(
      [&](const auto& n) -> BasicDataExpr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Variable>) {
          auto it = s.find(n.name);
          return it == s.end() ? BasicDataExpr{n} : BasicDataExpr::from_value(it->second);
        } else if constexpr (std::is_same_v<T, DataValue>) {
          return BasicDataExpr{n};
        } else if constexpr (std::is_same_v<T, BasicDataExpr::ObjectExpr>) {
          std::vector<ExprMember> ms;
          ms.reserve(n.members.size());
          for (const auto& m : n.members) ms.push_back(ExprMember{m.key, apply_subst(s, m.value)});
          return BasicDataExpr::object(std::move(ms));
        } else {
          std::vector<BasicDataExpr> items;
          items.reserve(n.items.size());
          for (const auto& i : n.items) items.push_back(apply_subst(s, i));
          return BasicDataExpr::array(std::move(items));
        }
      },
      e.node);
}

inline EventTypePattern apply_subst(const Substitution& s, const EventTypePattern& p) {
  EventTypePattern out{p.name, {}};
  out.args.reserve(p.args.size());
  for (const auto& a : p.args) out.args.push_back(apply_subst(s, a));
  return out;
}

// Substitution algebra ------------------------------------------------------

/// Union when s1 and s2 agree on shared variables; nullopt otherwise.
inline std::optional<Substitution> merge(const Substitution& s1, const Substitution& s2) {
  Substitution out = s1;
  for (const auto& [k, v] : s2) {
    auto [it, inserted] = out.emplace(k, v);
    if (!inserted && !(it->second == v)) return std::nullopt;
  }
  return out;
}

inline Substitution restrict(const Substitution& s, const std::string& x) {
  Substitution out;
  if (auto it = s.find(x); it != s.end()) out.emplace(*it);
  return out;
}

inline Substitution remove(Substitution s, const std::string& x) {
  s.erase(x);
  return s;
}

inline Substitution restrict_to(const Substitution& s, const VarSet& vars) {
  Substitution out;
  for (const auto& [k, v] : s) {
    if (vars.count(k)) out.emplace(k, v);
  }
  return out;
}

inline VarSet domain(const Substitution& s) {
  VarSet out;
  for (const auto& [k, v] : s) out.insert(k);
  return out;
}

// Matching ------------------------------------------------------------------

namespace detail {

/// Structural match of a value against a template; binds unbound variables
/// in `s` and requires repeated variables to bind equal values.
inline bool match_value(const BasicDataExpr& tmpl, const DataValue& v, Substitution& s) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Variable>) {
          auto [it, inserted] = s.emplace(n.name, v);
          return inserted || it->second == v;
        } else if constexpr (std::is_same_v<T, DataValue>) {
          return n == v;
        } else if constexpr (std::is_same_v<T, BasicDataExpr::ObjectExpr>) {
          if (!v.is_object()) return false;
          for (const auto& m : n.members) {
            const DataValue* field = v.find(m.key);
            if (!field || !match_value(m.value, *field, s)) return false;
          }
          return true;
        } else {
          if (!v.is_array() || v.as_array().size() != n.items.size()) return false;
          for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (!match_value(n.items[i], v.as_array()[i], s)) return false;
          }
          return true;
        }
      },
      tmpl.node);
}

/// Replaces declaration parameters by pattern arguments, simultaneously.
inline BasicDataExpr instantiate_params(const BasicDataExpr& body,
                                        const std::map<std::string, const BasicDataExpr*>& args) {
  return std::visit(
      [&](const auto& n) -> BasicDataExpr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Variable>) {
          auto it = args.find(n.name);
          return it == args.end() ? BasicDataExpr{n} : *it->second;
        } else if constexpr (std::is_same_v<T, DataValue>) {
          return BasicDataExpr{n};
        } else if constexpr (std::is_same_v<T, BasicDataExpr::ObjectExpr>) {
          std::vector<ExprMember> ms;
          for (const auto& m : n.members) ms.push_back(ExprMember{m.key, instantiate_params(m.value, args)});
          return BasicDataExpr::object(std::move(ms));
        } else {
          std::vector<BasicDataExpr> items;
          for (const auto& i : n.items) items.push_back(instantiate_params(i, args));
          return BasicDataExpr::array(std::move(items));
        }
      },
      body.node);
}

}  // namespace detail

inline const EventTypeDecl& lookup_decl(const DeclTable& decls, const EventTypePattern& pat) {
  auto it = decls.find(pat.name);
  if (it == decls.end()) {
    throw SpecError(SpecErrorKind::unknown_event_type, "event type '" + pat.name + "' is not declared");
  }
  if (it->second.params.size() != pat.args.size()) {
    throw SpecError(SpecErrorKind::arity_mismatch,
                    "event type '" + pat.name + "' expects " +
                        std::to_string(it->second.params.size()) + " argument(s), got " +
                        std::to_string(pat.args.size()));
  }
  return it->second;
}

/// The declaration body with the pattern's arguments substituted for the
/// parameters: the template events of `pat` must match.
inline BasicDataExpr pattern_template(const DeclTable& decls, const EventTypePattern& pat) {
  const auto& decl = lookup_decl(decls, pat);
  std::map<std::string, const BasicDataExpr*> args;
  for (std::size_t i = 0; i < decl.params.size(); ++i) args.emplace(decl.params[i], &pat.args[i]);
  return detail::instantiate_params(decl.body, args);
}

/// Most general substitution s with dom(s) ⊆ pfv(pat) such that `e` matches
/// s(pat); nullopt when none exists. Throws SpecError for undeclared names
/// and arity mismatches.
inline std::optional<Substitution> match_event(const DeclTable& decls, const Event& e,
                                               const EventTypePattern& pat) {
  const BasicDataExpr tmpl = pattern_template(decls, pat);
  Substitution s;
  if (!detail::match_value(tmpl, e, s)) return std::nullopt;
  return s;
}

}  // namespace rmltc
