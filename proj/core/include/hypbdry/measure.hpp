#pragma once

// Regularity of (B, sigma_p, nu_p), integration of decreasing functions of
// sigma over shells, and estimating integrals from sampling sets.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypbdry/exact.hpp"
#include "hypbdry/plane.hpp"
#include "hypbdry/tree.hpp"

namespace hypbdry {

/// k t^eta <= nu(B(b, t)) <= k' t^eta over the sampled balls.
struct RegularityCertificate {
  double eta = 0.0;
  double k = 0.0;
  double kprime = 0.0;
  std::size_t samples = 0;
  double worst_ratio_low = 0.0;   // smallest nu(ball) / t^eta seen
  double worst_ratio_high = 0.0;  // largest (or supremum of) nu(ball) / t^eta
  std::string description;
  std::optional<ExactScalar> k_exact, kprime_exact;  // tree only

  std::string to_json() const;
};

/// Certificate from observed (nu(ball), radius) pairs. Throws
/// AssertionFailure when the ratios spread by more than `max_spread`.
RegularityCertificate certify_from_samples(double eta, const std::vector<std::pair<double, double>>& mass_radius,
                                           std::string description, double max_spread = 1e6);

/// Exhaustive tree certificate: every ball of cylinder depth <= max_depth,
/// around every depth-max_depth cell. On each radius class the ratio is
/// monotone, so the class endpoints give the exact inf and sup; `interior`
/// extra radii per class are checked in floating point.
RegularityCertificate certify_regularity(const FreeTreeModel& m, std::size_t max_depth, std::size_t interior = 3);

/// Plane: random centres and radii e^{-u}, u uniform in [0, max_log_radius];
/// ball measures from bisection on the visual distance.
RegularityCertificate certify_regularity(const PlaneModel& m, std::size_t balls, std::uint64_t seed,
                                         double max_log_radius = 8.0);

/// nu(B(b, r)) on the plane by locating the arc ends with the visual-distance oracle.
double plane_ball_measure(const PlaneModel& m, const CirclePoint& b, double r);

/// Bounds for the integral of f(sigma(b, c)^eta) over B(b, t) - B(b, s).
struct ShellBounds {
  double lower = 0.0;
  double upper = 0.0;
  double actual = 0.0;
  double integral_f = 0.0;  // integral of f over [s^eta, t^eta]
  double actual_error = 0.0;  // quadrature / sampling error folded into the check
  bool holds = false;
};

/// Throws DomainError when f is not decreasing on a grid of `grid` points.
ShellBounds decreasing_integral_bounds(const FreeTreeModel& m, const std::function<double(double)>& f,
                                       const BoundaryWord& b, double s, double t, const RegularityCertificate& cert,
                                       std::size_t grid = 64);
ShellBounds decreasing_integral_bounds(const PlaneModel& m, const std::function<double(double)>& f,
                                       const CirclePoint& b, double s, double t, const RegularityCertificate& cert,
                                       std::size_t grid = 64);

/// Integral of sigma(b, .)^{-eta} over the complement of B(b, s) against
/// -k log s - (k'-k) and -k' log s + (k'-k); diameter-one boundaries only.
ShellBounds int_as_log(const FreeTreeModel& m, const BoundaryWord& b, double s, const RegularityCertificate& cert);
ShellBounds int_as_log(const PlaneModel& m, const CirclePoint& b, double s, const RegularityCertificate& cert);

/// S_t with directions gamma -> z_p^{gamma p}, radius e^{-t+R+2 delta} and
/// the multiplicity bound |{gamma : |gamma p| < 3R + 4 delta}|.
struct TreeSamplingSet {
  double t = 0.0;
  std::vector<ReducedWord> elements;
  std::vector<BoundaryWord> directions;
  double radius = 0.0;
  std::size_t multiplicity_bound = 0;
  std::size_t observed_multiplicity = 0;  // largest number of directions in one ball B(b, r)
  bool covers = false;                    // every ball B(direction, r) union is B
};
TreeSamplingSet build_sampling_set(const FreeTreeModel& m, double t);

struct PlaneSamplingSet {
  double t = 0.0;
  std::vector<std::size_t> elements;  // cache indices
  std::vector<CirclePoint> directions;
  double radius = 0.0;
  std::size_t multiplicity_bound = 0;
  std::size_t observed_multiplicity = 0;
  double largest_gap = 0.0;  // largest angular gap between consecutive directions
  bool covers = false;
};
PlaneSamplingSet build_sampling_set(const PlaneModel& m, const OrbitCache& cache, double t);

/// C_L = m (L e^L + 1) k' / k.
double sampling_constant(std::size_t multiplicity, double L, const RegularityCertificate& cert);

struct SamplingCheck {
  ExactScalar estimate_exact;  // (1/|S|) sum f(direction)
  ExactScalar integral_exact;  // integral of f against nu_p
  double estimate = 0.0;
  double integral = 0.0;
  double L = 0.0;
  double C_L = 0.0;
  double audit_variation = 0.0;  // largest |log f(x) - log f(y)| with sigma(x, y) <= r
  bool holds = false;
};

/// Sandwich C_L^-1 avg <= integral <= C_L avg for f = lambda^q on the tree.
/// The almost-continuity hypothesis is audited first; a violation throws
/// DomainError naming the witness pair.
SamplingCheck sampled_lambda_integral(const FreeTreeModel& m, const TreeSamplingSet& S, const ReducedWord& q,
                                      double L, const RegularityCertificate& cert);

struct PlaneSamplingCheck {
  double estimate = 0.0;
  double integral = 0.0;
  double L = 0.0;
  double C_L = 0.0;
  double audit_variation = 0.0;
  bool holds = false;
};
/// Same on the plane for a positive f; the audit samples `audit_pairs`
/// random pairs at visual distance <= r.
PlaneSamplingCheck sampled_integral(const PlaneModel& m, const PlaneSamplingSet& S,
                                    const std::function<double(const CirclePoint&)>& f, double L,
                                    const RegularityCertificate& cert, std::size_t audit_pairs, std::uint64_t seed,
                                    const std::vector<double>& breakpoints = {});

/// L = eta (2R + 3 delta), the almost-continuity constant of lambda^q at scale e^{-t+R+2 delta}.
double esstimation_L(double eta, double R, double delta);

}  // namespace hypbdry
