#pragma once

// Model-independent geometry on a Gromov-hyperbolic space with a chosen
// basepoint. Everything here is computed from two oracles that a model
// supplies: the distance and the Gromov product (extended to the boundary).

#include <cmath>
#include <concepts>
#include <limits>
#include <variant>

#include "hypbdry/errors.hpp"

namespace hypbdry {

template <class P, class B>
using Endpoint = std::variant<P, B>;

template <class M>
concept SpaceModel = requires(const M& m, const typename M::Point& x, const typename M::Boundary& b,
                              const Endpoint<typename M::Point, typename M::Boundary>& e, double s) {
  typename M::Point;
  typename M::Boundary;
  { m.basepoint() } -> std::convertible_to<typename M::Point>;
  { m.delta() } -> std::convertible_to<double>;
  { m.quotient_radius() } -> std::convertible_to<double>;
  { m.critical_exponent() } -> std::convertible_to<double>;
  { m.distance(x, x) } -> std::convertible_to<double>;
  { m.gromov_product(e, e, x) } -> std::convertible_to<double>;
  { m.direction(x) } -> std::convertible_to<typename M::Boundary>;
  { m.ray_point(b, s) } -> std::convertible_to<typename M::Point>;
  { m.is_basepoint(x) } -> std::convertible_to<bool>;
};

template <SpaceModel M>
using EndpointOf = Endpoint<typename M::Point, typename M::Boundary>;

template <SpaceModel M>
double norm(const M& m, const typename M::Point& q) {
  return m.distance(m.basepoint(), q);
}

template <SpaceModel M>
double gromov_product(const M& m, const EndpointOf<M>& x, const EndpointOf<M>& y,
                      const typename M::Point& base) {
  return m.gromov_product(x, y, base);
}

/// beta_b(x, y) = d(x, y) - 2 (y|b)_x.
template <SpaceModel M>
double busemann_cocycle(const M& m, const typename M::Boundary& b, const typename M::Point& x,
                        const typename M::Point& y) {
  return m.distance(x, y) - 2.0 * m.gromov_product(EndpointOf<M>(y), EndpointOf<M>(b), x);
}

/// sigma_base(b, c) = exp(-(b|c)_base); zero when b == c.
template <SpaceModel M>
double visual_distance(const M& m, const typename M::Boundary& b, const typename M::Boundary& c,
                       const typename M::Point& base) {
  try {
    return std::exp(-m.gromov_product(EndpointOf<M>(b), EndpointOf<M>(c), base));
  } catch (const InfiniteProduct&) {
    return 0.0;
  }
}

template <SpaceModel M>
double visual_distance(const M& m, const typename M::Boundary& b, const typename M::Boundary& c) {
  return visual_distance(m, b, c, m.basepoint());
}

/// Ball in (B, sigma_p). Open unless `closed` is set; `whole` marks B itself.
template <class Boundary>
struct BoundaryBall {
  Boundary center{};
  double radius = 0.0;
  bool closed = false;
  bool whole = false;
};

template <SpaceModel M>
bool ball_contains(const M& m, const BoundaryBall<typename M::Boundary>& ball,
                   const typename M::Boundary& b) {
  if (ball.whole) return true;
  double s = visual_distance(m, ball.center, b);
  return ball.closed ? s <= ball.radius : s < ball.radius;
}

/// Shadow B_p(q) = B_p(z_p^q, e^{-|q|}), and B_p(p) = B.
///
/// Shadows are closed balls: on the tree this makes the shadow of a vertex q
/// exactly the cylinder C(q), independent of how the geodesic p -> q is
/// extended past q.
template <SpaceModel M>
BoundaryBall<typename M::Boundary> shadow(const M& m, const typename M::Point& q) {
  BoundaryBall<typename M::Boundary> ball;
  if (m.is_basepoint(q)) {
    ball.whole = true;
    ball.radius = std::numeric_limits<double>::infinity();
    return ball;
  }
  ball.center = m.direction(q);
  ball.radius = std::exp(-norm(m, q));
  ball.closed = true;
  return ball;
}

/// overline{(q|b)} = min{(z_p^q | b)_p, |q|}.
template <SpaceModel M>
double chopped_product(const M& m, const typename M::Point& q, const typename M::Boundary& b) {
  if (m.is_basepoint(q)) throw DomainError("chopped_product: q must differ from the basepoint");
  double len = norm(m, q);
  double along;
  try {
    along = m.gromov_product(EndpointOf<M>(m.direction(q)), EndpointOf<M>(b), m.basepoint());
  } catch (const InfiniteProduct&) {
    return len;
  }
  return std::min(along, len);
}

template <SpaceModel M>
double chopped_busemann(const M& m, const typename M::Point& q, const typename M::Boundary& b) {
  return norm(m, q) - 2.0 * chopped_product(m, q, b);
}

/// lambda^q(b) = exp(-eta/2 * beta_b(p, q)).
template <SpaceModel M>
double lambda_value(const M& m, const typename M::Point& q, const typename M::Boundary& b) {
  return std::exp(-0.5 * m.critical_exponent() * busemann_cocycle(m, b, m.basepoint(), q));
}

template <SpaceModel M>
double chopped_lambda_value(const M& m, const typename M::Point& q, const typename M::Boundary& b) {
  if (m.is_basepoint(q)) return 1.0;
  return std::exp(-0.5 * m.critical_exponent() * chopped_busemann(m, q, b));
}

/// Cone-annulus shape Y^q: directions in the shadow of q and radial
/// distance within R of q' = ell_{p,q}(|q| + 2 delta + R). The radial window
/// is closed, matching the closed annulus used for sampling sets.
template <SpaceModel M>
bool annulus_cone_membership(const M& m, const typename M::Point& r, const typename M::Point& q) {
  if (m.is_basepoint(q)) throw DomainError("annulus_cone_membership: q must differ from the basepoint");
  const double R = m.quotient_radius();
  const double outer = norm(m, q) + 2.0 * m.delta() + R;
  if (m.is_basepoint(r)) return false;
  if (!ball_contains(m, shadow(m, q), m.direction(r))) return false;
  return std::abs(norm(m, r) - outer) <= R;
}

/// q' = ell_{p,q}(|q| + 2 delta + R), the centre of the inner ball of Y^q.
template <SpaceModel M>
typename M::Point annulus_cone_center(const M& m, const typename M::Point& q) {
  return m.ray_point(m.direction(q), norm(m, q) + 2.0 * m.delta() + m.quotient_radius());
}

/// min((x|w), (y|w)) - (x|y), the amount by which (hyp) needs delta.
template <SpaceModel M>
double hyperbolicity_defect(const M& m, const EndpointOf<M>& x, const EndpointOf<M>& y,
                            const EndpointOf<M>& w, const typename M::Point& base) {
  auto gp = [&](const EndpointOf<M>& a, const EndpointOf<M>& b) {
    try {
      return m.gromov_product(a, b, base);
    } catch (const InfiniteProduct&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double xy = gp(x, y);
  double lo = std::min(gp(x, w), gp(y, w));
  if (std::isinf(xy)) return -std::numeric_limits<double>::infinity();
  if (std::isinf(lo)) return std::numeric_limits<double>::infinity();
  return lo - xy;
}

}  // namespace hypbdry
