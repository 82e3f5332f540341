#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmltc/rmltc.hpp"

namespace rmltc::testing {

inline Event ev(const char* json_text) { return from_json(nlohmann::json::parse(json_text)); }

inline Event open_ev(int fd) {
  return from_json(nlohmann::json{{"event", "func_post"}, {"name", "fs.open"}, {"res", fd}});
}
inline Event close_ev(int fd) {
  return from_json(nlohmann::json{{"event", "func_pre"}, {"name", "fs.close"}, {"args", {fd}}});
}

inline const char* open_close_decls =
    "event open(fd) matches {event: 'func_post', name: 'fs.open', res: fd};\n"
    "event close(fd) matches {event: 'func_pre', name: 'fs.close', args: [fd]};\n";

inline std::unique_ptr<SpecSystem> open_close_spec(const std::string& equations) {
  return parse_spec(std::string(open_close_decls) + equations);
}

inline EventUniverse open_close_universe() {
  return EventUniverse{{open_ev(42), close_ev(42), open_ev(7), close_ev(7)}};
}

/// Letters as zero-arity event types {"t": name}.
inline std::string letter_decls(const std::string& letters) {
  std::string out;
  for (char c : letters) {
    out += "event ";
    out += c;
    out += "() matches {t: '";
    out += c;
    out += "'};\n";
  }
  return out;
}

inline EventUniverse letter_universe(const std::string& letters) {
  EventUniverse u;
  for (char c : letters) u.events.push_back(from_json(nlohmann::json{{"t", std::string(1, c)}}));
  return u;
}

/// Trace over a letter universe from a word, e.g. "aab".
inline IdTrace word(const std::string& letters, const std::string& w) {
  IdTrace t;
  for (char c : w) t.push_back(static_cast<EventId>(letters.find(c)));
  return t;
}

inline std::set<std::string> words(const std::string& letters, const IdTraceSet& s) {
  std::set<std::string> out;
  for (const auto& m : s.members) {
    std::string w;
    for (EventId e : m.trace) w += letters[e];
    out.insert(w);
  }
  return out;
}

}  // namespace rmltc::testing
