#pragma once

#include <json.hpp>

#include <cstdio>
#include <string>

namespace symspace {

using Json = nlohmann::ordered_json;

namespace detail {

inline void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void dump_value(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad;
        out += Json(it.key()).dump();
        out += ": ";
        dump_value(out, it.value(), indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Flat arrays of numbers stay on one line; anything nested is split.
      bool scalar_only = true;
      for (const auto& e : j)
        if (e.is_structured()) scalar_only = false;
      if (scalar_only) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          dump_value(out, j[i], indent, depth);
          if (i + 1 < j.size()) out += ", ";
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad;
        dump_value(out, j[i], indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      append_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

// Serializes with every float at 17 significant digits so a parse-back
// reproduces the exact double. Key order is insertion order (ordered_json),
// which makes emitted documents byte-stable for identical content.
inline std::string dump_json(const Json& j, int indent = 2) {
  std::string out;
  detail::dump_value(out, j, indent, 0);
  out += "\n";
  return out;
}

}  // namespace symspace
