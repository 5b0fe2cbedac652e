#include <algorithm>
#include <filesystem>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hypbdry/plane.hpp"
#include "hypbdry/space.hpp"

using namespace hypbdry;

namespace {

MobiusIsometry power(const MobiusIsometry& g, int n) {
  MobiusIsometry r;
  for (int i = 0; i < n; ++i) r = r * g;
  return r;
}

std::size_t index_of(const PlaneGroup& g, const std::string& name) {
  for (std::size_t i = 0; i < g.generator_names.size(); ++i)
    if (g.generator_names[i] == name) return i;
  FAIL("no generator " << name);
  return 0;
}

const OrbitCache& small_cache() {
  static const OrbitCache c = OrbitCache::build(build_group(PlanePreset::Genus2Octagon),
                                                OrbitCacheParams{PlanePreset::Genus2Octagon, 8.0, 0.0, 2});
  return c;
}

}  // namespace

TEST_CASE("genus two octagon group") {
  PlaneGroup g = build_group(PlanePreset::Genus2Octagon);
  CHECK(g.generators.size() == 8);
  for (const auto& x : g.generators) CHECK(x.det() == doctest::Approx(1.0).epsilon(1e-12));
  // [a1, b1][a2, b2] = 1
  std::vector<std::size_t> rel;
  for (const char* n : {"a1", "b1", "A1", "B1", "a2", "b2", "A2", "B2"}) rel.push_back(index_of(g, n));
  CHECK(evaluate_word(g, rel).distance_to_identity() < 1e-9);
  // generators are hyperbolic and move the basepoint by twice the inradius
  const double r_in = std::acosh(1.0 + std::sqrt(2.0));
  for (const auto& x : g.generators) {
    CHECK(std::abs(x.trace()) > 2.0);
    CHECK(x.displacement() == doctest::Approx(2 * r_in).epsilon(1e-9));
  }
  CHECK(evaluate_word(g, {}).distance_to_identity() == 0.0);
}

TEST_CASE("triangle group orders") {
  PlaneGroup g = build_group(PlanePreset::Triangle237);
  REQUIRE(g.generators.size() == 6);
  int orders[] = {2, 3, 7};
  for (int i = 0; i < 3; ++i) {
    const auto& x = g.generators[2 * static_cast<std::size_t>(i)];
    CHECK(power(x, orders[i]).distance_to_identity() < 1e-9);
    for (int k = 1; k < orders[i]; ++k) CHECK(power(x, k).distance_to_identity() > 1e-3);
  }
  CHECK((g.generators[0] * g.generators[2] * g.generators[4]).distance_to_identity() < 1e-9);
  for (const auto& x : g.generators) CHECK(x.displacement() > 1e-6);
}

TEST_CASE("busemann function on the disk") {
  PlaneModel m(PlanePreset::Genus2Octagon);
  CirclePoint b(0.3);
  DiskPoint x{0.1, -0.2};
  CHECK(m.busemann_disk(b, x, x) == doctest::Approx(0.0).epsilon(1e-15));
  for (double r : {0.1, 0.5, 0.9}) {
    DiskPoint y = std::polar(r, 0.3);
    CHECK(m.busemann_disk(b, {0, 0}, y) == doctest::Approx(-std::log((1 + r) / (1 - r))).epsilon(1e-12));
    CHECK(busemann_cocycle(m, b, DiskPoint{0, 0}, y) == doctest::Approx(-m.distance({0, 0}, y)).epsilon(1e-9));
  }
}

TEST_CASE("plane visual metric and shadows") {
  PlaneModel m(PlanePreset::Genus2Octagon);
  // sigma = sin of half the angle
  for (double d : {0.2, 1.0, 2.5, std::numbers::pi})
    CHECK(visual_distance(m, CirclePoint(0.4), CirclePoint(0.4 + d)) == doctest::Approx(std::sin(d / 2)).epsilon(1e-9));
  auto q = m.ray_point(CirclePoint(0.0), 3.0);
  auto sh = shadow(m, q);
  CHECK(sh.radius == doctest::Approx(std::exp(-3.0)));
  CHECK(sh.center.angle == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("hyperbolicity audit") {
  PlaneModel m(PlanePreset::Genus2Octagon);
  CHECK(m.audit_delta(2000, 5) <= m.delta());
}

TEST_CASE("monte carlo boundary integrals") {
  CHECK(mc_boundary_integral([](const CirclePoint&) { return 1.0; }, 1000, 9).value == 1.0);
  CHECK(mc_boundary_integral([](const CirclePoint&) { return 1.0; }, 1000, 9).std_error == 0.0);
  auto half = mc_boundary_integral([](const CirclePoint& b) { return b.angle < std::numbers::pi ? 1.0 : 0.0; },
                                   20000, 4);
  CHECK(std::abs(half.value - 0.5) < 3 * half.std_error);
  // lambda^q at |q| = 4 against quadrature and the closed form
  std::array<double, 3> X{std::cosh(4.0), std::sinh(4.0), 0.0};
  auto f = [&](const CirclePoint& b) { return plane_lambda(X, b); };
  double quad = quadrature_boundary_integral(f, {0.0});
  CHECK(quad == doctest::Approx(plane_lambda_l1(4.0)).epsilon(1e-9));
  auto mc = mc_boundary_integral(f, 200000, 11, 4);
  CHECK(std::abs(mc.value - quad) < 4 * mc.std_error);
  CHECK(mc_boundary_integral(f, 5000, 11, 1).value == mc_boundary_integral(f, 5000, 11, 8).value);
}

TEST_CASE("orbit cache") {
  const auto& c = small_cache();
  const double R = build_group(PlanePreset::Genus2Octagon).covering_radius;
  CHECK_THROWS_AS(c.annulus(R * 0.9, R), DomainError);
  CHECK_THROWS_AS(c.annulus(8.0, R), CacheExhausted);
  auto s5 = c.annulus(5.5, R), s4 = c.annulus(4.5, R);
  CHECK(!s4.empty());
  CHECK(s5.size() > s4.size());
  CHECK(c.max_merged_gap() < 1e-6);
  CHECK(c.count_within(0.5) == 1);  // the basepoint alone: generators move it by 2 r_in
  for (std::size_t i = 0; i + 1 < c.sorted().size(); ++i)
    CHECK(c.entries()[c.sorted()[i]].distance <= c.entries()[c.sorted()[i + 1]].distance);
  // entries are genuinely distinct group elements
  std::size_t checked = 0;
  for (std::size_t k = 1; k < c.sorted().size() && checked < 500; ++k, ++checked) {
    const auto& a = c.entries()[c.sorted()[k - 1]];
    const auto& b = c.entries()[c.sorted()[k]];
    CHECK((a.element.inverse() * b.element).distance_to_identity() > 1e-6);
  }
  // the parent chain reproduces the stored matrix
  PlaneGroup g = build_group(PlanePreset::Genus2Octagon);
  for (std::size_t k : {std::size_t{1}, c.sorted().size() / 2, c.sorted().size() - 1}) {
    std::size_t i = c.sorted()[k];
    std::vector<std::size_t> word;
    while (i != 0) {
      word.push_back(c.entries()[i].generator);
      i = c.entries()[i].parent;
    }
    std::reverse(word.begin(), word.end());
    CHECK((evaluate_word(g, word).inverse() * c.entries()[c.sorted()[k]].element).distance_to_identity() < 1e-7);
  }
}

TEST_CASE("orbit cache persistence") {
  auto dir = std::filesystem::temp_directory_path() / "hypbdry-test-cache";
  std::filesystem::remove_all(dir);
  PlaneGroup g = build_group(PlanePreset::Genus2Octagon);
  OrbitCacheParams p{PlanePreset::Genus2Octagon, 6.0, 0.0, 1};
  auto a = OrbitCache::obtain(g, p, dir);
  CHECK(std::filesystem::exists(dir / OrbitCache::cache_file_name(p)));
  auto b = OrbitCache::obtain(g, p, dir);
  CHECK(a.sorted().size() == b.sorted().size());
  CHECK(a.word(a.sorted().back()) == b.word(b.sorted().back()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("arc sets") {
  auto U = ArcSet::from_turns(0.1, 0.35);
  CHECK(U.measure() == doctest::Approx(0.25));
  CHECK(U.complement().measure() == doctest::Approx(0.75));
  CHECK(U.contains(CirclePoint(2 * std::numbers::pi * 0.1)));
  CHECK_FALSE(U.contains(CirclePoint(2 * std::numbers::pi * 0.35)));
  auto wrap = ArcSet::from_turns(0.9, 1.1);
  CHECK(wrap.measure() == doctest::Approx(0.2));
  CHECK(wrap.contains(CirclePoint(0.0)));
  CHECK(U.intersect(wrap).is_empty());
  CHECK(U.unite(wrap).measure() == doctest::Approx(0.45));
  // thicken by a: add arcs where sin(d/2) < e^{-a}
  auto T = U.thicken(1.0);
  double w = 2 * std::asin(std::exp(-1.0)) / (2 * std::numbers::pi);
  CHECK(T.measure() == doctest::Approx(0.25 + 2 * w));
}
