#pragma once

// Marked length spectrum and its behaviour under rescaling of the tree metric.

#include <string>
#include <vector>

#include "hypbdry/exact.hpp"
#include "hypbdry/plane.hpp"
#include "hypbdry/rep.hpp"
#include "hypbdry/tree.hpp"

namespace hypbdry {

/// Cyclically reduced length times the edge length; 0 for the identity.
Rational translation_length(const FreeTreeModel& m, const ReducedWord& w);
/// d(p, gamma^j p) / j for j = 1..max_power, converging to the translation length.
std::vector<Rational> displacement_ratios(const FreeTreeModel& m, const ReducedWord& w, int max_power);

/// 2 arccosh(|tr| / 2); throws EllipticElement when |tr| < 2 and returns 0
/// for +-identity.
double translation_length(const MobiusIsometry& g);
std::vector<double> displacement_ratios(const MobiusIsometry& g, int max_power);

struct MarkedLengthRow {
  std::string word;
  std::string length;  // exact on the tree ("p/q"), decimal on the plane
  double length_value = 0.0;
};
struct MarkedLengthTable {
  std::vector<MarkedLengthRow> rows;
  std::string to_csv() const;  // header "word,length"
};
MarkedLengthTable marked_length_table(const FreeTreeModel& m, const std::vector<ReducedWord>& words);
/// Words over generator indices of the plane group; elliptic elements get
/// length 0 and the word is tagged " (elliptic)".
MarkedLengthTable marked_length_table(const PlaneModel& m, const std::vector<std::vector<std::size_t>>& words);

struct RescaleRow {
  std::string word;
  Rational length_1, length_c;
  ExactScalar coeff_1, coeff_c;  // <rho(gamma) g, h> in the two models
  bool length_scaled = false;
  bool coeff_equal = false;
};
struct RescaleReport {
  Rational c;
  std::vector<RescaleRow> rows;
  std::size_t pairs = 0;
  double max_coeff_diff = 0.0;
  bool holds = false;
};
/// Builds the edge-length-c model and compares translation lengths and the
/// matrix coefficients of every (word, pair) through the Busemann cocycle of
/// each model.
RescaleReport rescaling_invariance_check(int rank, const Rational& c, const std::vector<ReducedWord>& words,
                                         const std::vector<std::pair<SimpleFunction, SimpleFunction>>& pairs);

}  // namespace hypbdry
