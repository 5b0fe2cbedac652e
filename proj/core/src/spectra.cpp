#include "hypbdry/spectra.hpp"

#include <cmath>
#include <sstream>

namespace hypbdry {

Rational translation_length(const FreeTreeModel& m, const ReducedWord& w) {
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == inverse_letter(w[hi - 1])) {
    ++lo;
    --hi;
  }
  return Rational(static_cast<long>(hi - lo)) * m.edge_length();
}

std::vector<Rational> displacement_ratios(const FreeTreeModel& m, const ReducedWord& w, int max_power) {
  std::vector<Rational> out;
  for (int j = 1; j <= max_power; ++j) {
    auto p = m.group().power(w, j);
    out.push_back(m.norm_exact(TreePoint::at(p)) / Rational(j));
  }
  return out;
}

double translation_length(const MobiusIsometry& g) {
  double tr = std::abs(g.trace());
  if (g.distance_to_identity() < 1e-12) return 0.0;
  if (tr < 2.0) throw EllipticElement("elliptic element, |trace| = " + format_double(tr) + " < 2");
  return 2.0 * std::acosh(tr / 2.0);
}

std::vector<double> displacement_ratios(const MobiusIsometry& g, int max_power) {
  std::vector<double> out;
  MobiusIsometry p = MobiusIsometry::identity();
  for (int j = 1; j <= max_power; ++j) {
    p = p * g;
    out.push_back(p.displacement() / j);
  }
  return out;
}

std::string MarkedLengthTable::to_csv() const {
  std::ostringstream os;
  os << "word,length\n";
  for (const auto& r : rows) os << r.word << ',' << r.length << '\n';
  return os.str();
}

MarkedLengthTable marked_length_table(const FreeTreeModel& m, const std::vector<ReducedWord>& words) {
  MarkedLengthTable t;
  for (const auto& w : words) {
    Rational l = translation_length(m, w);
    t.rows.push_back({w.empty() ? "e" : m.group().to_string(w), rational_string(l), to_double(l)});
  }
  return t;
}

MarkedLengthTable marked_length_table(const PlaneModel& m, const std::vector<std::vector<std::size_t>>& words) {
  MarkedLengthTable t;
  const auto& names = m.group().generator_names;
  for (const auto& w : words) {
    std::string name;
    for (auto i : w) name += (name.empty() ? "" : ".") + names.at(i);
    if (name.empty()) name = "e";
    auto g = evaluate_word(m.group(), w);
    try {
      double l = translation_length(g);
      t.rows.push_back({name, format_double(l), l});
    } catch (const EllipticElement&) {
      t.rows.push_back({name + " (elliptic)", "0", 0.0});
    }
  }
  return t;
}

RescaleReport rescaling_invariance_check(int rank, const Rational& c, const std::vector<ReducedWord>& words,
                                         const std::vector<std::pair<SimpleFunction, SimpleFunction>>& pairs) {
  if (!(c > 0)) throw DomainError("rescaling_invariance_check: c must be positive");
  FreeTreeModel base(rank), scaled(rank, c);
  RescaleReport rep;
  rep.c = c;
  rep.holds = true;
  for (const auto& w : words) {
    Rational l1 = translation_length(base, w), lc = translation_length(scaled, w);
    bool scaled_ok = lc == c * l1;
    for (const auto& [g, h] : pairs) {
      RescaleRow row;
      row.word = w.empty() ? "e" : base.group().to_string(w);
      row.length_1 = l1;
      row.length_c = lc;
      row.length_scaled = scaled_ok;
      row.coeff_1 = matrix_coefficient_direct(base, w, g, h);
      row.coeff_c = matrix_coefficient_direct(scaled, w, g, h);
      row.coeff_equal = row.coeff_1 == row.coeff_c;
      rep.max_coeff_diff = std::max(rep.max_coeff_diff, std::abs((row.coeff_1 - row.coeff_c).to_double()));
      rep.holds = rep.holds && row.length_scaled && row.coeff_equal;
      ++rep.pairs;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

}  // namespace hypbdry
