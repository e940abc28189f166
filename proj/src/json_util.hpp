#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "tclf/errors.hpp"

namespace tclf::io {

using nlohmann::json;

// Strict-schema helpers: every object is checked against its allowed key
// set so typos fail loudly instead of silently falling back to defaults.

inline void check_keys(const json& obj, const std::string& ctx,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(ctx + ": expected a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) throw ParseError(ctx + ": unknown key '" + key + "'");
  }
}

inline double get_num(const json& obj, const std::string& ctx, const char* key,
                      double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(ctx + "." + key + ": expected a number");
  return v.get<double>();
}

inline std::int64_t get_int(const json& obj, const std::string& ctx, const char* key,
                            std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ParseError(ctx + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t get_uint(const json& obj, const std::string& ctx, const char* key,
                              std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ParseError(ctx + "." + key + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

inline std::string get_str(const json& obj, const std::string& ctx, const char* key,
                           const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ParseError(ctx + "." + key + ": expected a string");
  return v.get<std::string>();
}

}  // namespace tclf::io
