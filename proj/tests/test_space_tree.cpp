#include <cmath>
#include <set>

#include "doctest.h"
#include "hypbdry/space.hpp"
#include "hypbdry/tree.hpp"

using namespace hypbdry;

namespace {

using E = EndpointOf<FreeTreeModel>;

struct F2 {
  FreeTreeModel m{2};
  const FreeGroup& g = m.group();
  TreePoint v(const char* w) const { return TreePoint::at(g.parse(w)); }
  BoundaryWord b(const char* w) const { return g.parse_boundary(w); }
};

// longest common prefix of two boundary words, read far enough
std::size_t common_prefix(const BoundaryWord& x, const BoundaryWord& y, std::size_t cap) {
  std::size_t i = 0;
  while (i < cap && *x.letter(i) == *y.letter(i)) ++i;
  return i;
}

}  // namespace

TEST_CASE("gromov product on the tree") {
  F2 f;
  CHECK(f.m.gromov_product(E(f.v("ab")), E(f.v("aB")), f.m.basepoint()) == 1.0);
  auto q = f.v("abAb");
  CHECK(f.m.gromov_product(E(q), E(q), f.m.basepoint()) == doctest::Approx(norm(f.m, q)));
  CHECK(f.m.gromov_product(E(f.b("(a)")), E(f.b("(b)")), f.m.basepoint()) == 0.0);
  CHECK_THROWS_AS(f.m.gromov_product(E(f.b("(a)")), E(f.b("(a)")), f.m.basepoint()), InfiniteProduct);

  // boundary products are common prefix lengths
  std::uint64_t state = 3;
  for (int i = 0; i < 200; ++i) {
    auto x = f.g.random_word(6, state), y = f.g.random_word(6, state);
    BoundaryWord bx{x.letters(), {x.back()}}, by{y.letters(), {y.back()}};
    if (bx == by) continue;
    double expect = static_cast<double>(common_prefix(bx, by, 40));
    CHECK(f.m.gromov_product(E(bx), E(by), f.m.basepoint()) == expect);
  }
}

TEST_CASE("busemann cocycle on the tree") {
  F2 f;
  CHECK(busemann_cocycle(f.m, f.b("(a)"), f.m.basepoint(), f.v("ab")) == 0.0);
  CHECK(busemann_cocycle(f.m, f.b("a(b)"), f.m.basepoint(), f.v("ab")) == -2.0);
  CHECK(busemann_cocycle(f.m, f.b("a(b)"), f.v("Ba"), f.v("Ba")) == 0.0);
  // cocycle identity beta(x, z) = beta(x, y) + beta(y, z)
  auto b = f.b("abA(b)");
  auto x = f.v("BB"), y = f.v("ab"), z = f.v("abAb");
  CHECK(busemann_cocycle(f.m, b, x, z) ==
        doctest::Approx(busemann_cocycle(f.m, b, x, y) + busemann_cocycle(f.m, b, y, z)));
  // d(z, b_s) - d(x, b_s) = (s - 4) - (s + 2)
  CHECK(f.m.busemann_exact(b, x, z) == Rational(-6));
}

TEST_CASE("visual distance") {
  F2 f;
  CHECK(visual_distance(f.m, f.b("(a)"), f.b("a(b)")) == doctest::Approx(std::exp(-1.0)));
  CHECK(visual_distance(f.m, f.b("(ab)"), f.b("(ab)")) == 0.0);
  CHECK(visual_distance(f.m, f.b("(a)"), f.b("(b)")) == 1.0);
}

TEST_CASE("shadows are cylinders") {
  F2 f;
  auto sh = shadow(f.m, f.v("ab"));
  CHECK_FALSE(ball_contains(f.m, sh, f.b("aB(a)")));
  CHECK(ball_contains(f.m, sh, f.b("aba(a)")));
  CHECK_FALSE(ball_contains(f.m, sh, f.b("ba(b)")));
  CHECK(shadow(f.m, f.m.basepoint()).whole);
  // membership agrees with the depth-2 prefix on every depth-4 cell
  for (const auto& w : f.g.words_of_length(4)) {
    BoundaryWord c{w.letters(), {w.back()}};
    bool in = w[0] == f.g.parse_letter('a') && w[1] == f.g.parse_letter('b');
    CHECK(ball_contains(f.m, sh, c) == in);
  }
}

TEST_CASE("chopped product") {
  F2 f;
  CHECK(chopped_product(f.m, f.v("ab"), f.b("(ab)")) == 2.0);
  CHECK(chopped_product(f.m, f.v("ab"), f.b("(b)")) == 0.0);
  CHECK(chopped_product(f.m, f.v("ab"), f.b("a(B)")) == 1.0);
  CHECK_THROWS_AS(chopped_product(f.m, f.m.basepoint(), f.b("(a)")), DomainError);
}

TEST_CASE("thickening") {
  F2 f;
  auto Ca = CylinderSet::from_prefixes(f.g, {f.g.parse("a")});
  auto Cab = CylinderSet::from_prefixes(f.g, {f.g.parse("ab")});
  CHECK(f.m.thicken(Ca, 1.5) == Ca);
  CHECK(f.m.thicken(Cab, 0.5) == Ca);
  // nested in a and shrinking to the set itself
  auto prev = f.m.thicken(Cab, 0.25);
  for (double a : {0.75, 1.5, 2.5, 4.0}) {
    auto cur = f.m.thicken(Cab, a);
    CHECK(cur.refined(4).intersect(prev.refined(4)) == cur.refined(4));
    prev = cur;
  }
  CHECK(prev == Cab);
}

TEST_CASE("annulus cone membership") {
  F2 f;
  auto q = f.v("a");
  CHECK(annulus_cone_membership(f.m, f.v("aa"), q));
  CHECK_FALSE(annulus_cone_membership(f.m, f.v("ba"), q));
  auto centre = annulus_cone_center(f.m, q);
  CHECK(norm(f.m, centre) == doctest::Approx(1.5));
  CHECK(annulus_cone_membership(f.m, centre, q));
}

TEST_CASE("annulus enumeration") {
  F2 f;
  CHECK(f.m.enumerate_annulus(1).size() == 4);
  CHECK(f.m.enumerate_annulus(3).size() == 36);
  CHECK_THROWS_AS(f.m.enumerate_annulus(0.4), DomainError);
  std::set<ReducedWord> seen;
  for (const auto& w : f.m.enumerate_annulus(1)) seen.insert(w);
  CHECK(seen == std::set<ReducedWord>{f.g.parse("a"), f.g.parse("A"), f.g.parse("b"), f.g.parse("B")});
}

TEST_CASE("cylinder measures") {
  F2 f;
  CHECK(f.m.cylinder_measure(f.g.parse("a")) == ExactScalar(Rational(1, 4)));
  CHECK(f.m.cylinder_measure(f.g.parse("ab")) == ExactScalar(Rational(1, 12)));
  ExactScalar total(0);
  for (const auto& w : f.g.words_of_length(2)) total += f.m.cylinder_measure(w);
  CHECK(total == ExactScalar(1));
  FreeTreeModel m3(3);
  ExactScalar t3(0);
  for (const auto& w : m3.group().words_of_length(3)) t3 += m3.cylinder_measure(w);
  CHECK(t3 == ExactScalar(1));
}

TEST_CASE("radon nikodym derivative") {
  F2 f;
  CHECK(f.m.radon_nikodym(f.g.parse("ab"), f.b("(ab)")) == ExactScalar(9));
  CHECK(f.m.radon_nikodym(f.g.parse("ab"), f.b("(b)")) == ExactScalar(Rational(1, 9)));
  CHECK(f.m.radon_nikodym(ReducedWord{}, f.b("(b)")) == ExactScalar(1));
  // nu_q is a probability measure: sum over depth-3 cells
  ExactScalar total(0);
  for (const auto& w : f.g.words_of_length(3))
    total += f.m.radon_nikodym(f.g.parse("aB"), BoundaryWord{w.letters(), {w.back()}}) * f.m.cylinder_measure(3);
  CHECK(total == ExactScalar(1));
}

TEST_CASE("transfer matrix counts") {
  F2 f;
  Letter b = f.g.parse_letter('b'), A = f.g.parse_letter('A');
  CHECK(transfer_matrix_count(f.g, b, A, 2) == 1);
  CHECK(transfer_matrix_count(f.g, b, A, 3) == 2);
  CHECK(transfer_matrix_count(f.g, b, A, 4) == 7);
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<std::uint64_t> brute(16, 0);
    f.g.for_each_word(n, [&](const ReducedWord& w) { ++brute[w[0] * 4 + w.back()]; });
    for (Letter x = 0; x < 4; ++x)
      for (Letter y = 0; y < 4; ++y) CHECK(transfer_matrix_count(f.g, x, y, n) == brute[x * 4 + y]);
  }
  CHECK(transfer_matrix_count(f.g, f.g.parse("ab"), f.g.parse("A"), 4) == 2);  // abbA, abAA
}

TEST_CASE("sphere sizes") {
  for (int k : {2, 3}) {
    FreeGroup g(k);
    for (std::size_t n = 1; n <= 14; ++n) {
      std::uint64_t expect = 2 * static_cast<std::uint64_t>(k);
      for (std::size_t i = 1; i < n; ++i) expect *= static_cast<std::uint64_t>(2 * k - 1);
      CHECK(g.sphere_size(n) == expect);
      if (n <= 7) {
        std::uint64_t counted = 0;
        g.for_each_word(n, [&](const ReducedWord&) { ++counted; });
        CHECK(counted == expect);
      }
    }
  }
}

TEST_CASE("word parsing and indexing") {
  F2 f;
  CHECK(f.g.to_string(f.g.parse("abAB")) == "abAB");
  CHECK(f.g.parse("e").empty());
  CHECK_THROWS(f.g.parse("aA"));
  for (std::uint64_t i = 0; i < f.g.sphere_size(5); i += 7) CHECK(f.g.cylinder_index(f.g.word_at(5, i)) == i);
  CHECK(f.g.to_string(f.g.multiply(f.g.parse("ab"), f.g.parse("Ba"))) == "aa");
  CHECK(f.g.parse_boundary("ab(a)").letter(5) == f.g.parse_letter('a'));
  CHECK_THROWS_AS(f.g.parse_boundary("ab").head(3), InsufficientDepth);
}
