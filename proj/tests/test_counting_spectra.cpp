#include <cmath>

#include "doctest.h"
#include "hypbdry/counting.hpp"
#include "hypbdry/spectra.hpp"

using namespace hypbdry;

namespace {

const OrbitCache& cache10() {
  static const OrbitCache c = OrbitCache::build(build_group(PlanePreset::Genus2Octagon),
                                                OrbitCacheParams{PlanePreset::Genus2Octagon, 10.0, 0.0, 4});
  return c;
}

}  // namespace

TEST_CASE("tree equidistribution") {
  FreeTreeModel m(2);
  const auto& g = m.group();
  auto a = CylinderSet::from_prefixes(g, {g.parse("a")});
  auto b = CylinderSet::from_prefixes(g, {g.parse("b")});
  auto r3 = equidistribution(m, a, b, 3);
  CHECK(r3.count == 2);  // bbA and bAA
  CHECK(*r3.freq_exact == Rational(1, 18));
  CHECK(r3.target == doctest::Approx(1.0 / 16));
  auto r4 = equidistribution(m, a, b, 4);
  CHECK(*r4.freq_exact == Rational(7, 108));
  CHECK(*r4.oracle == r4.count);
  auto all = CylinderSet::whole(g);
  for (double t : {1.0, 4.0, 7.0}) CHECK(*equidistribution(m, all, all, t).freq_exact == Rational(1));
  // depth-2 sets: oracle only once words are long enough
  auto ab = CylinderSet::from_prefixes(g, {g.parse("ab"), g.parse("B")});
  CHECK_FALSE(equidistribution(m, ab, b, 1).oracle);
  for (double t = 2; t <= 9; ++t) {
    auto r = equidistribution(m, ab, b, t, 3);
    CHECK(*r.oracle == r.count);
  }
}

TEST_CASE("plane equidistribution") {
  PlaneModel m(PlanePreset::Genus2Octagon);
  auto whole = ArcSet::whole();
  auto r = equidistribution(m, cache10(), whole, whole, 7.0);
  CHECK(r.freq == 1.0);
  auto half = equidistribution(m, cache10(), ArcSet::from_turns(0, 0.5), whole, 7.0);
  CHECK(half.freq == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("growth exponents") {
  auto f2 = growth_exponent(FreeTreeModel(2), {6, 8, 10, 12, 14});
  CHECK(f2.eta_hat == doctest::Approx(std::log(3.0)).epsilon(0.01));
  auto f3 = growth_exponent(FreeTreeModel(3), {6, 8, 10, 12});
  CHECK(f3.eta_hat == doctest::Approx(std::log(5.0)).epsilon(0.01));
  // N(n) = 1 + sum_j 4 3^{j-1}
  CHECK(f2.counts[0] == 1 + 4 * (1 + 3 + 9 + 27 + 81 + 243));
  CHECK_THROWS_AS(growth_exponent(FreeTreeModel(2), {6}), DomainError);
  CHECK_THROWS_AS(fit_growth({1, 2, 3}, {1, 0, 4}), DomainError);
  auto plane = growth_exponent(cache10(), {6, 7, 8, 9, 10});
  CHECK(plane.eta_hat == doctest::Approx(1.0).epsilon(0.15));
  CHECK_THROWS_AS(growth_exponent(cache10(), {8, 11}), CacheExhausted);
}

TEST_CASE("margulis fit") {
  PlaneModel m(PlanePreset::Genus2Octagon);
  std::vector<double> ts{6, 6.5, 7, 7.5, 8};
  auto whole = margulis_fit(m, cache10(), ArcSet::whole(), ArcSet::whole(), 1.0, ts);
  CHECK(whole.C_hat > 0);
  CHECK(std::isfinite(whole.C_hat));
  auto halved = margulis_fit(m, cache10(), ArcSet::from_turns(0, 0.5), ArcSet::whole(), 1.0, ts);
  double ratio = static_cast<double>(halved.counts.back()) / static_cast<double>(whole.counts.back());
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.2));
  CHECK_THROWS_AS(margulis_fit(m, cache10(), ArcSet(), ArcSet::whole(), 1.0, ts), DomainError);
  CHECK_THROWS_AS(margulis_fit(m, cache10(), ArcSet::whole(), ArcSet::whole(), 1.0, {9.5}), CacheExhausted);
}

TEST_CASE("translation lengths") {
  FreeTreeModel m(2);
  const auto& g = m.group();
  CHECK(translation_length(m, g.parse("abA")) == Rational(1));
  CHECK(translation_length(m, ReducedWord{}) == Rational(0));
  CHECK(translation_length(m, g.parse("aabAA")) == Rational(1));
  CHECK(translation_length(m, g.parse("abAB")) == Rational(4));
  // d(p, gamma^j p) / j decreases to the translation length
  auto r = displacement_ratios(m, g.parse("aabAA"), 6);
  CHECK(r[0] == Rational(5));
  CHECK(r[5] == Rational(5, 3));  // (6 + 4) / 6
  MobiusIsometry h{std::exp(1.0), 0, 0, std::exp(-1.0)};
  CHECK(translation_length(h) == doctest::Approx(2.0));
  CHECK(translation_length(MobiusIsometry::identity()) == 0.0);
  auto tri = build_group(PlanePreset::Triangle237);
  CHECK_THROWS_AS(translation_length(tri.generators[0]), EllipticElement);
  PlaneModel pm(PlanePreset::Genus2Octagon);
  auto pr = displacement_ratios(pm.group().generators[0], 6);
  CHECK(pr[5] == doctest::Approx(translation_length(pm.group().generators[0])).epsilon(0.05));
}

TEST_CASE("marked length tables") {
  FreeTreeModel m(2, Rational(3, 2));
  auto t = marked_length_table(m, {m.group().parse("ab"), m.group().parse("a")});
  CHECK(t.to_csv() == "word,length\nab,3\na,3/2\n");
  PlaneModel tri(PlanePreset::Triangle237);
  auto pt = marked_length_table(tri, {{0}, {0, 2}});
  CHECK(pt.rows[0].word.find("(elliptic)") != std::string::npos);
}

TEST_CASE("rescaling the tree metric") {
  FreeGroup g(2);
  std::vector<ReducedWord> words{g.parse("ab"), g.parse("abA"), g.parse("aaB")};
  std::vector<std::pair<SimpleFunction, SimpleFunction>> pairs{
      {SimpleFunction::constant(g, ExactScalar(1)), SimpleFunction::constant(g, ExactScalar(1))}};
  auto same = rescaling_invariance_check(2, Rational(1), words, pairs);
  CHECK(same.holds);
  auto twice = rescaling_invariance_check(2, Rational(2), words, pairs);
  CHECK(twice.holds);
  CHECK(twice.rows[0].length_c == Rational(4));
  CHECK(twice.rows[0].length_c == 2 * twice.rows[0].length_1);
  auto three_halves = rescaling_invariance_check(2, Rational(3, 2), words, pairs);
  CHECK(three_halves.rows[0].coeff_c == ExactScalar(Rational(2, 3)));
  CHECK(three_halves.rows[0].coeff_1 == ExactScalar(Rational(2, 3)));
}
