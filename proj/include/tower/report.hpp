#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace tower {

/// Line-oriented PASS/FAIL report with a machine-readable summary block.
struct Report {
  struct Line {
    bool pass = false;
    std::string name;
    std::string detail;
  };

  std::vector<Line> lines;
  std::uint64_t seed = 0;

  void add(bool pass, const std::string& name, const std::string& detail = "") {
    lines.push_back(Line{pass, name, detail});
  }
  void merge(const Report& other) {
    lines.insert(lines.end(), other.lines.begin(), other.lines.end());
  }
  bool ok() const {
    for (const auto& l : lines) {
      if (!l.pass) return false;
    }
    return true;
  }
  std::size_t failures() const {
    std::size_t k = 0;
    for (const auto& l : lines) {
      if (!l.pass) ++k;
    }
    return k;
  }
  void print(std::ostream& out) const {
    for (const auto& l : lines) {
      out << (l.pass ? "PASS " : "FAIL ") << l.name;
      if (!l.detail.empty()) out << ": " << l.detail;
      out << "\n";
    }
    out << "#summary checks=" << lines.size() << " failures=" << failures()
        << " seed=" << seed << " result=" << (ok() ? "PASS" : "FAIL") << "\n";
  }
};

/// Enumeration and expansion limits; safe defaults, overridable from the CLI.
struct Guards {
  std::int64_t enumeration = 10000;     // explicit table size cap
  std::int64_t lattice = 10000;         // normal-subgroup lattice cap
  std::int64_t a_subgroup = 256;        // |A| cap in the collapse
  std::int64_t expansion = 1 << 20;     // certificate triple-source cap
};

}  // namespace tower
