#pragma once

// Tabular experiment output: CSV with a commented reproducibility header, or
// JSON wrapping the same rows plus a "config" object.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypbdry/exact.hpp"

namespace hypbdry {

struct Cell {
  std::string text;                 // CSV text; floats at 17 significant digits
  std::optional<std::string> exact; // "p/q" or "x+y*sqrt(m)" when exact upstream
  bool numeric = true;
};

Cell cell(double v);
Cell cell(std::uint64_t v);
Cell cell(int v);
Cell cell(const Rational& v);
Cell cell(const ExactScalar& v);
Cell cell(const std::string& s);
Cell cell(const char* s);
Cell cell_bool(bool b);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  void add(std::vector<Cell> row);
};

/// Ordered key/value pairs echoed into every output.
using RunConfig = std::vector<std::pair<std::string, std::string>>;

std::string library_versions();
std::string render_csv(const Table& t, const RunConfig& config);
std::string render_json(const Table& t, const RunConfig& config);
std::string render(const Table& t, const RunConfig& config, const std::string& format);

}  // namespace hypbdry
