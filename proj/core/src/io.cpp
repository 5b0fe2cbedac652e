#include "hypbdry/io.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <gmp.h>
#include <sstream>

#include "json.hpp"

#ifndef HYPBDRY_VERSION
#define HYPBDRY_VERSION "unknown"
#endif

namespace hypbdry {

Cell cell(double v) { return {format_double(v), std::nullopt, true}; }
Cell cell(std::uint64_t v) { return {std::to_string(v), std::nullopt, true}; }
Cell cell(int v) { return {std::to_string(v), std::nullopt, true}; }
Cell cell(const Rational& v) { return {format_double(to_double(v)), rational_string(v), true}; }
Cell cell(const ExactScalar& v) { return {v.to_decimal(17), v.to_exact_string(), true}; }
Cell cell(const std::string& s) { return {s, std::nullopt, false}; }
Cell cell(const char* s) { return {std::string(s), std::nullopt, false}; }
Cell cell_bool(bool b) { return {b ? "true" : "false", std::nullopt, false}; }

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("Table::add: wrong number of cells");
  rows.push_back(std::move(row));
}

std::string library_versions() {
  std::ostringstream os;
  os << "hypbdry " << HYPBDRY_VERSION << "; gmp " << gmp_version << "; eigen " << EIGEN_WORLD_VERSION << '.'
     << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << "; boost " << BOOST_VERSION / 100000 << '.'
     << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  return os.str();
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_csv(const Table& t, const RunConfig& config) {
  std::ostringstream os;
  os << "# " << library_versions() << '\n';
  for (const auto& [k, v] : config) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_escape(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i].text);
    os << '\n';
  }
  return os.str();
}

std::string render_json(const Table& t, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["versions"] = library_versions();
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& c = row[i];
      if (c.numeric) {
        auto parsed = nlohmann::ordered_json::parse(c.text, nullptr, false);
        r[t.columns[i]] = parsed.is_discarded() ? nlohmann::ordered_json(c.text) : parsed;
      } else if (c.text == "true" || c.text == "false") {
        r[t.columns[i]] = c.text == "true";
      } else {
        r[t.columns[i]] = c.text;
      }
      if (c.exact) r[t.columns[i] + "_exact"] = *c.exact;
    }
    rows.push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string render(const Table& t, const RunConfig& config, const std::string& format) {
  if (format == "csv") return render_csv(t, config);
  if (format == "json") return render_json(t, config);
  throw std::invalid_argument("unknown output format '" + format + "' (csv|json)");
}

}  // namespace hypbdry
