#pragma once

// Ground data values carried by events, and their JSON mapping.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace rmltc {

class DataValue;
struct Member;

using Array = std::vector<DataValue>;
/// Object members, kept sorted by key with unique keys.
using Object = std::vector<Member>;

/// Non-integral number. Equality is on the canonical (shortest round-trip)
/// decimal representation, so matching stays exact and deterministic.
struct Decimal {
  double value = 0.0;
  std::string repr;

  static Decimal from_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    std::string repr(buf, end);
    if (repr.find_first_of(".eEn") == std::string::npos) repr += ".0";
    return Decimal{v, std::move(repr)};
  }

  friend bool operator==(const Decimal& a, const Decimal& b) { return a.repr == b.repr; }
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
    return a.repr <=> b.repr;
  }
};

class DataValue {
 public:
  using Storage = std::variant<std::nullptr_t, bool, std::int64_t, Decimal, std::string, Array, Object>;

  DataValue() : v_(nullptr) {}
  DataValue(std::nullptr_t) : v_(nullptr) {}
  DataValue(bool b) : v_(b) {}
  DataValue(int i) : v_(static_cast<std::int64_t>(i)) {}
  DataValue(std::int64_t i) : v_(i) {}
  DataValue(Decimal d) : v_(std::move(d)) {}
  DataValue(std::string s) : v_(std::move(s)) {}
  DataValue(const char* s) : v_(std::string(s)) {}
  DataValue(Array a) : v_(std::move(a)) {}
  DataValue(Object o);

  const Storage& storage() const noexcept { return v_; }

  bool is_object() const noexcept { return std::holds_alternative<Object>(v_); }
  bool is_array() const noexcept { return std::holds_alternative<Array>(v_); }
  bool is_primitive() const noexcept { return !is_object() && !is_array(); }

  const Object& as_object() const { return std::get<Object>(v_); }
  const Array& as_array() const { return std::get<Array>(v_); }

  /// Member lookup on objects; nullptr when absent or not an object.
  const DataValue* find(const std::string& key) const;

  friend bool operator==(const DataValue& a, const DataValue& b);
  friend std::strong_ordering operator<=>(const DataValue& a, const DataValue& b);

 private:
  Storage v_;
};

struct Member {
  std::string key;
  DataValue value;

  friend bool operator==(const Member&, const Member&) = default;
  friend std::strong_ordering operator<=>(const Member& a, const Member& b) {
    if (auto c = a.key <=> b.key; c != 0) return c;
    return a.value <=> b.value;
  }
};

/// An observed event: a data value whose top level is an object.
using Event = DataValue;

inline DataValue::DataValue(Object o) {
  std::sort(o.begin(), o.end(), [](const Member& a, const Member& b) { return a.key < b.key; });
  // Later duplicates are dropped; JSON input never produces them.
  o.erase(std::unique(o.begin(), o.end(),
                      [](const Member& a, const Member& b) { return a.key == b.key; }),
          o.end());
  v_ = std::move(o);
}

inline const DataValue* DataValue::find(const std::string& key) const {
  if (!is_object()) return nullptr;
  const auto& obj = as_object();
  auto it = std::lower_bound(obj.begin(), obj.end(), key,
                             [](const Member& m, const std::string& k) { return m.key < k; });
  if (it == obj.end() || it->key != key) return nullptr;
  return &it->value;
}

inline bool operator==(const DataValue& a, const DataValue& b) { return a.v_ == b.v_; }

inline std::strong_ordering operator<=>(const DataValue& a, const DataValue& b) {
  if (a.v_.index() != b.v_.index()) return a.v_.index() <=> b.v_.index();
  return std::visit(
      [&](const auto& lhs) -> std::strong_ordering {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.v_);
        if constexpr (std::is_same_v<T, std::nullptr_t>) {
          return std::strong_ordering::equal;
        } else if constexpr (std::is_same_v<T, Array> || std::is_same_v<T, Object>) {
          return std::lexicographical_compare_three_way(lhs.begin(), lhs.end(), rhs.begin(),
                                                        rhs.end());
        } else {
          return lhs <=> rhs;
        }
      },
      a.v_);
}

// JSON mapping --------------------------------------------------------------

inline DataValue from_json(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return DataValue(nullptr);
    case nlohmann::json::value_t::boolean: return DataValue(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return DataValue(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned: {
      auto u = j.get<std::uint64_t>();
      if (u <= static_cast<std::uint64_t>(INT64_MAX)) return DataValue(static_cast<std::int64_t>(u));
      return DataValue(Decimal::from_double(static_cast<double>(u)));
    }
    case nlohmann::json::value_t::number_float: return DataValue(Decimal::from_double(j.get<double>()));
    case nlohmann::json::value_t::string: return DataValue(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      Array a;
      a.reserve(j.size());
      for (const auto& e : j) a.push_back(from_json(e));
      return DataValue(std::move(a));
    }
    case nlohmann::json::value_t::object: {
      Object o;
      o.reserve(j.size());
      for (const auto& [k, v] : j.items()) o.push_back(Member{k, from_json(v)});
      return DataValue(std::move(o));
    }
    default: break;
  }
  throw std::invalid_argument("unsupported JSON value");
}

inline nlohmann::json to_json(const DataValue& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::nullptr_t>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Decimal>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Array>) {
          auto out = nlohmann::json::array();
          for (const auto& e : x) out.push_back(to_json(e));
          return out;
        } else if constexpr (std::is_same_v<T, Object>) {
          auto out = nlohmann::json::object();
          for (const auto& m : x) out[m.key] = to_json(m.value);
          return out;
        } else {
          return x;
        }
      },
      v.storage());
}

/// Compact JSON text; decimals use their canonical representation.
inline std::string to_text(const DataValue& v) {
  if (const auto* d = std::get_if<Decimal>(&v.storage())) return d->repr;
  return to_json(v).dump();
}

}  // namespace rmltc
