#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ptlaser/grid.hpp"

namespace ptlaser {

/// Shortest round-trippable decimal representation (17 significant digits),
/// locale independent. All emitted CSV numbers go through this so that
/// identical runs produce byte-identical files.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  }

  void header(const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) out_ << ',';
      out_ << names[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(values[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

/// FNV-1a 64-bit digest of a file, reported in run manifests.
inline std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for checksum");
  uint64_t hash = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace ptlaser
