#include <cmath>

#include "doctest.h"
#include "hypbdry/measure.hpp"
#include "hypbdry/rep.hpp"

using namespace hypbdry;

TEST_CASE("tree regularity certificate") {
  FreeTreeModel m(2);
  auto c = certify_regularity(m, 6);
  REQUIRE(c.k_exact);
  CHECK(*c.k_exact == ExactScalar(Rational(1, 4)));
  CHECK(*c.kprime_exact == ExactScalar(Rational(3, 4)));
  CHECK(c.worst_ratio_low == doctest::Approx(0.25));
  // radii strictly inside a class stay below the supremum
  CHECK(c.kprime == doctest::Approx(0.75));
  // rank 3: nu(ball) = (1/6) 5^{-j}, ratio range [1/6, 5/6)
  auto c3 = certify_regularity(FreeTreeModel(3), 4);
  CHECK(*c3.k_exact == ExactScalar(Rational(1, 6)));
  CHECK(*c3.kprime_exact == ExactScalar(Rational(5, 6)));
  CHECK(c.to_json().find("\"k_exact\": \"1/4\"") != std::string::npos);
}

TEST_CASE("plane regularity certificate") {
  PlaneModel m(PlanePreset::Genus2Octagon);
  auto c = certify_regularity(m, 1000, 3);
  CHECK(c.k >= 0.2);
  CHECK(c.kprime <= 5.0);
  // nu(B(b, r)) = 2 asin(r) / pi
  CHECK(plane_ball_measure(m, CirclePoint(1.0), 0.3) == doctest::Approx(2 * std::asin(0.3) / M_PI).epsilon(1e-9));
}

TEST_CASE("certificate from samples") {
  auto c = certify_from_samples(1.0, {{0.2, 0.5}}, "one ball");
  CHECK(c.k == doctest::Approx(0.4));
  CHECK(c.kprime == c.k);
  CHECK_THROWS_AS(certify_from_samples(1.0, {{1e-9, 0.5}, {0.5, 0.5}}, "spread", 1e6), AssertionFailure);
  CHECK_THROWS_AS(certify_from_samples(1.0, {}, "none"), DomainError);
}

TEST_CASE("decreasing integral bounds on the tree") {
  FreeTreeModel m(2);
  auto cert = certify_regularity(m, 8);
  auto b = m.group().parse_boundary("(a)");
  // f = 1/u over B(1) - B(e^-4): shells j = 1..4 each contribute 1/2
  auto inv = decreasing_integral_bounds(m, [](double u) { return 1.0 / u; }, b, std::exp(-4.0), 1.0, cert);
  CHECK(inv.actual == doctest::Approx(2.0));
  CHECK(inv.holds);
  // constant f: c times the shell measure
  auto cst = decreasing_integral_bounds(m, [](double) { return 2.5; }, b, std::exp(-3.0), std::exp(-1.0), cert);
  double shell = (m.ball_set(b, std::exp(-1.0)).measure() - m.ball_set(b, std::exp(-3.0)).measure()).to_double();
  CHECK(cst.actual == doctest::Approx(2.5 * shell));
  CHECK(cst.holds);
  // s close to t: empty shell
  auto thin = decreasing_integral_bounds(m, [](double u) { return 1.0 / u; }, b, 0.3, 0.3 * (1 + 1e-9), cert);
  CHECK(thin.actual == 0.0);
  CHECK_THROWS_AS(decreasing_integral_bounds(m, [](double u) { return u; }, b, 0.1, 0.5, cert), DomainError);
  CHECK_THROWS_AS(decreasing_integral_bounds(m, [](double u) { return 1 / u; }, b, 0.5, 0.1, cert), DomainError);
}

TEST_CASE("integral of sigma^{-eta} as a logarithm") {
  FreeTreeModel m(2);
  auto cert = certify_regularity(m, 8);
  auto r = int_as_log(m, m.group().parse_boundary("(a)"), std::exp(-4.0), cert);
  CHECK(r.actual == doctest::Approx(2.75));  // 3/4 + 4 / 2
  CHECK(r.lower == doctest::Approx(0.5));
  CHECK(r.upper == doctest::Approx(3.5));
  CHECK(r.holds);
  // near s = 1 the sphere sigma = 1 alone carries 3/4 and the upper bound is smaller
  auto near1 = int_as_log(m, m.group().parse_boundary("(a)"), std::exp(-0.1), cert);
  CHECK(near1.actual == doctest::Approx(0.75));
  CHECK(near1.upper < near1.actual);
  CHECK_FALSE(near1.holds);

  PlaneModel pm(PlanePreset::Genus2Octagon);
  auto pc = certify_regularity(pm, 1000, 3);
  for (double s : {0.9, 0.3, 0.01}) {
    auto p = int_as_log(pm, CirclePoint(0.7), s, pc);
    // closed form: (2/pi) integral_{asin s}^{pi/2} dx / sin x = (2/pi) log cot(asin(s)/2)
    CHECK(p.actual == doctest::Approx(2 / M_PI * std::log(1 / std::tan(std::asin(s) / 2))).epsilon(1e-8));
    CHECK(p.holds);
  }
}

TEST_CASE("tree sampling sets") {
  FreeTreeModel m(2);
  auto S = build_sampling_set(m, 3);
  CHECK(S.directions.size() == 36);
  CHECK(S.multiplicity_bound == 5);
  CHECK(S.radius == doctest::Approx(std::exp(-2.5)));
  CHECK(S.covers);
  CHECK(S.observed_multiplicity <= S.multiplicity_bound);
  // every depth-3 cylinder holds exactly one direction
  std::vector<int> hits(m.group().sphere_size(3), 0);
  for (const auto& d : S.directions) ++hits[m.group().cylinder_index(d.head(3).data(), 3)];
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  auto low = build_sampling_set(m, 0.51);
  CHECK(!low.elements.empty());
  CHECK_THROWS_AS(build_sampling_set(m, 0.5), DomainError);
}

TEST_CASE("sampled integrals") {
  FreeTreeModel m(2);
  auto cert = certify_regularity(m, 8);
  double L = esstimation_L(m.critical_exponent(), m.quotient_radius(), m.delta());
  CHECK(L == doctest::Approx(std::log(3.0)));
  CHECK(sampling_constant(5, L, cert) == doctest::Approx(5 * (L * 3 + 1) * 3));
  auto S = build_sampling_set(m, 4);
  auto unit = sampled_lambda_integral(m, S, ReducedWord{}, L, cert);
  CHECK(unit.estimate == 1.0);
  CHECK(unit.integral == 1.0);
  auto c = sampled_lambda_integral(m, S, m.group().parse("ab"), L, cert);
  CHECK(c.integral_exact == ExactScalar(Rational(2, 3)));
  CHECK(c.holds);
  CHECK(c.estimate_exact > ExactScalar(0));
  CHECK_THROWS_AS(sampled_lambda_integral(m, S, m.group().parse("abababa"), L, cert), DomainError);
}

TEST_CASE("plane sampling") {
  PlaneModel m(PlanePreset::Genus2Octagon);
  // the multiplicity bound needs the orbit out to 3R + 4 delta
  auto cache = OrbitCache::obtain(m.group(), OrbitCacheParams{PlanePreset::Genus2Octagon, 12.5, 0.0, 4},
                                  OrbitCache::default_dir());
  auto cert = certify_regularity(m, 1000, 3);
  auto S = build_sampling_set(m, cache, 6.0);
  CHECK(S.covers);
  CHECK(S.observed_multiplicity <= S.multiplicity_bound);
  double L = esstimation_L(1.0, m.quotient_radius(), m.delta());
  auto one = sampled_integral(m, S, [](const CirclePoint&) { return 1.0; }, L, cert, 64, 1);
  CHECK(one.estimate == doctest::Approx(1.0));
  CHECK(one.holds);
  auto X = cache.image(cache.sorted()[cache.sorted().size() / 50]);
  auto chk = sampled_integral(m, S, [&](const CirclePoint& b) { return plane_lambda(X, b); }, L, cert, 256, 2,
                              {hyperboloid_direction(X).angle});
  CHECK(chk.holds);
}
