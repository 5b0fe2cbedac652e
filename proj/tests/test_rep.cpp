#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hypbdry/rep.hpp"

using namespace hypbdry;

namespace {

struct F2 {
  FreeTreeModel m{2};
  const FreeGroup& g = m.group();
  SimpleFunction one() const { return SimpleFunction::constant(g, ExactScalar(1)); }
  SimpleFunction chi(const char* prefixes) const {
    std::vector<ReducedWord> ps;
    std::string s(prefixes);
    std::size_t pos = 0;
    while (pos <= s.size()) {
      auto comma = s.find(',', pos);
      if (comma == std::string::npos) comma = s.size();
      ps.push_back(g.parse(s.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    return SimpleFunction::indicator(g, CylinderSet::from_prefixes(g, ps));
  }
};

// <rho(gamma) g, h> summed cell by cell at depth D >= |gamma| + depths:
// (rho(gamma) g)(b) = lambda^{gamma p}(b) g(gamma^-1 b).
ExactScalar brute_coefficient(const FreeTreeModel& m, const ReducedWord& gamma, const SimpleFunction& gf,
                              const SimpleFunction& hf, std::size_t D) {
  const auto& g = m.group();
  ExactScalar total(0);
  ReducedWord inv = gamma.inverse();
  g.for_each_word(D, [&](const ReducedWord& u) {
    BoundaryWord b{u.letters(), {u.back()}};
    ReducedWord moved = g.multiply(inv, u);  // gamma^-1 b agrees with gamma^-1 u on its first letters
    BoundaryWord gb{moved.letters(), {u.back()}};
    total += lambda_eval(m, TreePoint::at(gamma), b) * gf.evaluate(gb) * hf.evaluate(b);
  });
  return total * m.cylinder_measure(D);
}

}  // namespace

TEST_CASE("lambda values") {
  F2 f;
  auto ab = TreePoint::at(f.g.parse("ab"));
  CHECK(lambda_eval(f.m, ab, f.g.parse_boundary("(ab)")) == ExactScalar(3));
  CHECK(lambda_eval(f.m, ab, f.g.parse_boundary("(b)")) == ExactScalar(Rational(1, 3)));
  CHECK(lambda_eval(f.m, f.m.basepoint(), f.g.parse_boundary("(b)")) == ExactScalar(1));
  // chopped lambda is within e^{eta delta} = 1 of lambda on the tree
  for (const auto& w : f.g.words_of_length(3)) {
    BoundaryWord b{w.letters(), {w.back()}};
    CHECK(chopped_lambda_eval(f.m, ab, b) == lambda_eval(f.m, ab, b));
  }
}

TEST_CASE("lambda norms") {
  F2 f;
  CHECK(lambda_l1(f.m, 1) == ExactScalar(Rational(0), Rational(1, 2), 3));
  CHECK(lambda_l1(f.m, 1).to_double() == doctest::Approx(0.866025).epsilon(1e-6));
  CHECK(lambda_l1(f.m, 2) == ExactScalar(Rational(2, 3)));
  CHECK(lambda_l1(f.m, 0) == ExactScalar(1));
  // closed form for k = 2: ((n + 2) / 2) 3^{-n/2}
  for (long n = 1; n <= 16; ++n)
    CHECK(lambda_l1(f.m, static_cast<std::size_t>(n)) ==
          ExactScalar(Rational(n + 2, 2)) * ExactScalar::half_power(3, -n));
  // integral of lambda as a simple function
  auto lf = lambda_function(f.m, f.g.parse("aBa"));
  CHECK(inner_product(f.m, lf, f.one()) == lambda_l1(f.m, 3));
}

TEST_CASE("rho is a unitary representation") {
  F2 f;
  auto v = f.chi("a,bA");
  CHECK(apply_rho(f.m, ReducedWord{}, v) == v);
  std::uint64_t state = 17;
  for (std::size_t n = 1; n <= 6; ++n) {
    auto gamma = f.g.random_word(n, state);
    auto w = apply_rho(f.m, gamma, f.one());
    CHECK(inner_product(f.m, w, w) == ExactScalar(1));
  }
  // homomorphism: rho(gh) = rho(g) rho(h)
  auto g1 = f.g.parse("ab"), g2 = f.g.parse("Ba");
  CHECK(apply_rho(f.m, f.g.multiply(g1, g2), v, 12) == apply_rho(f.m, g1, apply_rho(f.m, g2, v, 12), 12));
  CHECK_THROWS_AS(apply_rho(f.m, f.g.parse("abababab"), v, 8), ResolutionBudgetExceeded);
}

TEST_CASE("matrix coefficients") {
  F2 f;
  CHECK(matrix_coefficient(f.m, ReducedWord{}, f.one(), f.one()) == ExactScalar(1));
  CHECK(matrix_coefficient(f.m, f.g.parse("ab"), f.one(), f.one()) == ExactScalar(Rational(2, 3)));
  auto ca = f.chi("a");
  ExactScalar expect = ExactScalar::sqrt_of(3) / ExactScalar(12);
  CHECK(matrix_coefficient(f.m, f.g.parse("a"), ca, ca) == expect);
  CHECK(brute_coefficient(f.m, f.g.parse("a"), ca, ca, 2) == expect);
  CHECK(matrix_coefficient_direct(f.m, f.g.parse("a"), ca, ca) == expect);

  std::uint64_t state = 99;
  for (int i = 0; i < 30; ++i) {
    auto gamma = f.g.random_word(1 + i % 4, state);
    std::vector<ExactScalar> gv, hv;
    for (int c = 0; c < 12; ++c) gv.push_back(ExactScalar(static_cast<long>((c * 7 + i) % 5) - 2));
    for (int c = 0; c < 4; ++c) hv.push_back(ExactScalar(static_cast<long>((c + i) % 3)));
    SimpleFunction gf(f.g, 2, gv), hf(f.g, 1, hv);
    ExactScalar s = matrix_coefficient(f.m, gamma, gf, hf);
    CHECK(s == brute_coefficient(f.m, gamma, gf, hf, gamma.size() + 2));
    CHECK(s == matrix_coefficient_direct(f.m, gamma, gf, hf));
  }
}

TEST_CASE("averaging operators") {
  F2 f;
  for (double t : {1.0, 2.0, 3.0}) {
    auto T = build_Tt(f.m, f.one(), t);
    CHECK(pair_group_algebra(f.m, T, f.one(), f.one()) == ExactScalar(1));
    for (const auto& c : T.coefficients) CHECK(c.sign() > 0);
  }
  auto T = build_Tt(f.m, f.chi("a"), 1);
  CHECK(T.support.size() == 4);
  CHECK(std::count_if(T.coefficients.begin(), T.coefficients.end(), [](const auto& c) { return c.is_zero(); }) == 3);
  auto Z = build_Tt(f.m, SimpleFunction::constant(f.g, ExactScalar(0)), 2);
  CHECK(Z.total().is_zero());
  CHECK_THROWS_AS(build_Tt(f.m, f.one(), 0.5), DomainError);
}

TEST_CASE("T_t^1 applied to 1 is constant 1 on the tree") {
  F2 f;
  for (double t : {1.0, 2.0, 3.0}) {
    // direct oracle: (rho o T)(1)(b) = sum_gamma c_gamma lambda^{gamma p}(b)
    auto T = build_Tt(f.m, f.one(), t);
    for (const auto& u : f.g.words_of_length(4)) {
      BoundaryWord b{u.letters(), {u.back()}};
      ExactScalar v(0);
      for (std::size_t i = 0; i < T.support.size(); ++i)
        v += T.coefficients[i] * lambda_eval(f.m, TreePoint::at(T.support[i]), b);
      CHECK(v == ExactScalar(1));
    }
    auto s = sup_norm_Tt1(f.m, t);
    CHECK(s.sup == ExactScalar(1));
    CHECK(s.inf == ExactScalar(1));
  }
}

TEST_CASE("tail bound") {
  F2 f;
  auto V = CylinderSet::from_prefixes(f.g, {f.g.parse("b")});
  auto q = f.g.parse("aaaaaa");
  auto r = tail_bound_check(f.m, q, V, 1.0, 0.45);
  // lambda^q = 3^{-3} on C(b)
  CHECK(r.lhs_exact == ExactScalar(Rational(1, 4)) * ExactScalar(Rational(1, 27)) / lambda_l1(f.m, 6));
  CHECK(r.holds);
  CHECK_FALSE(r.short_branch);
  auto empty = tail_bound_check(f.m, q, CylinderSet::empty(f.g), 1.0, 0.45);
  CHECK(empty.lhs_exact.is_zero());
  CHECK(empty.holds);
  auto shortq = tail_bound_check(f.m, f.g.parse("a"), V, 2.0, 0.45);
  CHECK(shortq.short_branch);
  CHECK(shortq.lhs <= 1.0);
  CHECK(shortq.holds);
  // direction inside the thickened set is outside the bound's hypothesis
  CHECK_THROWS_AS(tail_bound_check(f.m, f.g.parse("bbb"), V, 1.0, 0.45), DomainError);
}

TEST_CASE("convergence experiment") {
  F2 f;
  auto all = CylinderSet::whole(f.g);
  for (const auto& row : convergence_experiment(f.m, all, all, all, {2, 3, 4, 5}, 2)) {
    CHECK(row.value == ExactScalar(1));
    CHECK(row.target == ExactScalar(1));
  }
  auto a = CylinderSet::from_prefixes(f.g, {f.g.parse("a")});
  auto b = CylinderSet::from_prefixes(f.g, {f.g.parse("b")});
  auto rows = convergence_experiment(f.m, a, b, a, {2, 6}, 2);
  CHECK(rows[0].target == ExactScalar(Rational(1, 16)));
  // against the explicit group-algebra vector
  auto T = build_Tt(f.m, SimpleFunction::indicator(f.g, a), 6);
  CHECK(rows[1].value == pair_group_algebra(f.m, T, SimpleFunction::indicator(f.g, b), SimpleFunction::indicator(f.g, a)));
  auto disjoint = convergence_experiment(f.m, a, a, b, {4, 8, 12}, 4);
  CHECK(disjoint[0].target.is_zero());
  CHECK(disjoint[2].value < disjoint[1].value);
  CHECK(disjoint[1].value < disjoint[0].value);
  // threads do not change the exact value
  CHECK(convergence_experiment(f.m, a, b, a, {9}, 1)[0].value == convergence_experiment(f.m, a, b, a, {9}, 8)[0].value);
}

TEST_CASE("truncation rank") {
  F2 f;
  auto s1 = truncation_rank(f.m, 1, 6);
  CHECK(s1.dimension == 4);
  CHECK(s1.rank_by_length[0] == 1);
  REQUIRE(s1.full_rank_length);
  CHECK(*s1.full_rank_length <= 6);
  CHECK(std::is_sorted(s1.rank_by_length.begin(), s1.rank_by_length.end()));
  // the compressed identity is the identity matrix
  auto I = compressed_operator(f.m, ReducedWord{}, 1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(I[i * 4 + j] == doctest::Approx(i == j ? 1.0 : 0.0));
  // entries of P_1 rho(a) P_1 are coefficients between normalised indicators
  auto M = compressed_operator(f.m, f.g.parse("a"), 1);
  auto ca = f.chi("a");
  CHECK(M[0] == doctest::Approx(matrix_coefficient(f.m, f.g.parse("a"), ca, ca).to_double() * 4));
}

TEST_CASE("plane coefficients") {
  PlaneModel m(PlanePreset::Genus2Octagon);
  const auto& g = m.group().generators[0];
  PlaneFunction one = [](const CirclePoint&) { return 1.0; };
  CHECK(matrix_coefficient(MobiusIsometry::identity(), one, one) == doctest::Approx(1.0));
  CHECK(matrix_coefficient(g, one, one) == doctest::Approx(plane_lambda_l1(g.displacement())).epsilon(1e-9));
  // unitarity: ||rho(g) 1||^2 = 1
  auto v = apply_rho(g, one);
  CHECK(quadrature_boundary_integral([&](const CirclePoint& b) { return v(b) * v(b); }, {hyperboloid_direction(g.basepoint_image()).angle}) ==
        doctest::Approx(1.0).epsilon(1e-8));
}
