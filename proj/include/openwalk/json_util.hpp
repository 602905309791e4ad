#ifndef OPENWALK_JSON_UTIL_HPP
#define OPENWALK_JSON_UTIL_HPP

#include <algorithm>
#include <string>
#include <string_view>

#include <json.hpp>

#include "openwalk/error.hpp"
#include "openwalk/geometry.hpp"

namespace openwalk::jsonutil {

using nlohmann::json;

/// Parses text, reporting syntax errors with a 1-based line number.
inline json parse_document(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ParseError(std::string(what) + ": syntax error at line " + std::to_string(line) + ": " +
                     e.what());
  }
}

inline std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline std::string item(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline const json& require(const json& j, std::string_view key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(child(path, key) + ": missing field");
  return *it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
  return j.get<int>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ParseError(path + ": expected true or false");
  return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path + ": expected a string");
  return j.get<std::string>();
}

inline Vec2 as_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(path + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array");
  return j;
}

inline double number_or(const json& j, std::string_view key, const std::string& path,
                        double fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : as_number(*it, child(path, key));
}

inline bool bool_or(const json& j, std::string_view key, const std::string& path, bool fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : as_bool(*it, child(path, key));
}

inline int int_or(const json& j, std::string_view key, const std::string& path, int fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : as_int(*it, child(path, key));
}

inline json to_json(const Vec2& v) { return json::array({v.x, v.y}); }

inline void require_schema(const json& doc, std::string_view expected, std::string_view what) {
  const auto& s = require(doc, "schema", "");
  if (!s.is_string() || s.get<std::string>() != expected)
    throw ParseError(std::string(what) + ": schema must be \"" + std::string(expected) + "\"");
}

}  // namespace openwalk::jsonutil

#endif  // OPENWALK_JSON_UTIL_HPP
