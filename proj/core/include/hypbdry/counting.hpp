#pragma once

// Orbit counting: annulus statistics, growth exponents and the two-sided
// directional frequency of orbit points.

#include <cstdint>
#include <optional>
#include <vector>

#include "hypbdry/exact.hpp"
#include "hypbdry/plane.hpp"
#include "hypbdry/tree.hpp"

namespace hypbdry {

struct EquidistributionRow {
  double t = 0.0;
  std::uint64_t s_t_size = 0;
  std::uint64_t count = 0;  // gamma with z^{gamma^-1} in U and z^{gamma} in U'
  double freq = 0.0;
  double target = 0.0;
  double abs_error = 0.0;
  std::optional<Rational> freq_exact;     // tree
  std::optional<std::uint64_t> oracle;    // transfer-matrix count (tree)
};

/// Tree: direct enumeration of S_t, cross-checked against the transfer
/// matrix whenever every word of S_t is at least as long as the cylinders.
EquidistributionRow equidistribution(const FreeTreeModel& m, const CylinderSet& U, const CylinderSet& Uprime,
                                     double t, int threads = 1);
/// Transfer-matrix count alone.
std::uint64_t equidistribution_oracle(const FreeTreeModel& m, const CylinderSet& U, const CylinderSet& Uprime,
                                      std::size_t n);
/// Plane: directions from the cached orbit, half-open arcs.
EquidistributionRow equidistribution(const PlaneModel& m, const OrbitCache& cache, const ArcSet& U,
                                     const ArcSet& Uprime, double t);

struct GrowthFit {
  double eta_hat = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the fit
  std::vector<double> radii;
  std::vector<double> counts;
};
/// Least-squares slope of log N(t) against t.
GrowthFit fit_growth(const std::vector<double>& radii, const std::vector<double>& counts);
/// Tree: N(t) = #{gamma : |gamma p| <= t}, counted by enumerating spheres.
GrowthFit growth_exponent(const FreeTreeModel& m, const std::vector<double>& radii);
/// Plane: N(t) from the orbit cache.
GrowthFit growth_exponent(const OrbitCache& cache, const std::vector<double>& radii);

struct MargulisFit {
  double C_hat = 0.0;
  std::vector<double> t;
  std::vector<std::uint64_t> counts;
  std::vector<double> normalized;  // e^{-eta t} count / (nu(U) nu(U'))
  std::vector<double> residuals;   // normalized - C_hat
};
/// Orbit points with |gamma p| in (t - a, t + a), z^{gamma^-1} in U and
/// z^{gamma} in U'; C_hat is the mean of the normalized counts.
MargulisFit margulis_fit(const PlaneModel& m, const OrbitCache& cache, const ArcSet& U, const ArcSet& Uprime,
                         double a, const std::vector<double>& t_list);

}  // namespace hypbdry
