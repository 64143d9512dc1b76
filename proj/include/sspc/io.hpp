#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "sspc/errors.hpp"

namespace sspc::io {

/// Shortest round-trip-safe text for a double: 17 significant digits.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Opens `path` for binary writing, creating parent directories; I/O failures are surfaced verbatim.
inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

/// CSV file with a mandatory header, LF line endings and %.17g numbers.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header)
      : path_(path), out_(open_out(path)) {
    std::string line;
    for (const auto& h : header) line += (line.empty() ? "" : ",") + h;
    out_ << line << '\n';
  }

  void row(std::initializer_list<double> values) {
    std::string line;
    bool first = true;
    for (double v : values) {
      if (!first) line += ',';
      line += fmt(v);
      first = false;
    }
    out_ << line << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw Error("write failed for '" + path_.string() + "'");
  }

  ~CsvWriter() {
    if (out_.is_open()) out_.close();
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  out.close();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace sspc::io
