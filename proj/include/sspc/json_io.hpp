#pragma once

#include <cmath>
#include <string>

#include "json.hpp"

#include "sspc/io.hpp"

namespace sspc::io {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline void dump_into(std::string& out, const ordered_json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ordered_json(it.key()).dump() + ": ";
        dump_into(out, it.value(), indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_into(out, j[i], indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_into(out, j[i], indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt(v) : "null";
      return;
    }
    default: out += j.dump();
  }
}

}  // namespace detail

/// Serializes with insertion-ordered keys, two-space indentation, LF newlines and %.17g floats.
inline std::string dump_json(const ordered_json& j) {
  std::string out;
  detail::dump_into(out, j, 2, 0);
  out += '\n';
  return out;
}

inline void write_json(const std::filesystem::path& path, const ordered_json& j) { write_text(path, dump_json(j)); }

}  // namespace sspc::io
