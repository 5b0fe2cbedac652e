#pragma once

// Cocompact Fuchsian groups acting on the hyperbolic plane.
//
// Group elements are SL(2,R) matrices acting on the upper half-plane; the
// library works in the Poincare disk through the Cayley transform
// w = (z - i) / (z + i), so the basepoint i becomes the disk origin and the
// Patterson-Sullivan measure at the basepoint is normalised arc length.

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hypbdry/errors.hpp"
#include "hypbdry/space.hpp"

namespace hypbdry {

using DiskPoint = std::complex<double>;

/// Boundary point of the disk, angle normalised to [0, 2 pi).
struct CirclePoint {
  double angle = 0.0;

  CirclePoint() = default;
  explicit CirclePoint(double a);
  DiskPoint unit() const { return std::polar(1.0, angle); }
  friend bool operator==(const CirclePoint&, const CirclePoint&) = default;
};

/// Element of PSL(2,R), stored as an SL(2,R) representative.
struct MobiusIsometry {
  double a = 1, b = 0, c = 0, d = 1;

  static MobiusIsometry identity() { return {}; }
  MobiusIsometry operator*(const MobiusIsometry& o) const;
  MobiusIsometry inverse() const { return {d, -b, -c, a}; }
  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  /// Hyperboloid coordinates (X0, X1, X2) of the image of the basepoint.
  std::array<double, 3> basepoint_image() const;
  /// d(p, gamma p) = arccosh((a^2 + b^2 + c^2 + d^2) / 2).
  double displacement() const;
  DiskPoint apply(DiskPoint w) const;
  CirclePoint apply(const CirclePoint& b) const;
  /// Max-entry distance to +-identity.
  double distance_to_identity() const;
};

enum class PlanePreset { Genus2Octagon, Triangle237 };

PlanePreset parse_preset(const std::string& name);
std::string preset_name(PlanePreset p);

struct PlaneGroup {
  PlanePreset preset;
  std::vector<MobiusIsometry> generators;  // x1, x1^-1, x2, x2^-1, ...
  std::vector<std::string> generator_names;
  /// Covering radius of the basepoint orbit: circumradius of the
  /// fundamental polygon around the basepoint.
  double covering_radius = 0.0;
};

/// Standard generators. Genus 2: the side pairings a1, b1, a2, b2 of the
/// regular octagon with [a1,b1][a2,b2] = 1. Triangle: rotations of orders
/// 2, 3 and 7, conjugated so the basepoint is not a fixed point.
PlaneGroup build_group(PlanePreset preset);

/// Evaluates a word over generator names (e.g. "a1 B1 a2", capitals invert).
MobiusIsometry evaluate_word(const PlaneGroup& g, const std::vector<std::size_t>& generator_indices);

/// Hyperbolic plane with a cocompact group, basepoint at the disk origin.
class PlaneModel {
 public:
  using Point = DiskPoint;
  using Boundary = CirclePoint;
  using EndpointT = Endpoint<DiskPoint, CirclePoint>;

  explicit PlaneModel(PlanePreset preset, double delta = 0.6931471805599453);

  const PlaneGroup& group() const { return group_; }
  DiskPoint basepoint() const { return {0.0, 0.0}; }
  bool is_basepoint(const DiskPoint& q) const { return std::abs(q) == 0.0; }
  double delta() const { return delta_; }
  double quotient_radius() const { return group_.covering_radius; }
  double critical_exponent() const { return 1.0; }

  double distance(const DiskPoint& x, const DiskPoint& y) const;
  double gromov_product(const EndpointT& x, const EndpointT& y, const DiskPoint& base) const;
  CirclePoint direction(const DiskPoint& q) const;
  DiskPoint ray_point(const CirclePoint& b, double s) const;

  /// beta_b(x, y) via the Poisson kernel: log(|b-y|^2 (1-|x|^2) / (|b-x|^2 (1-|y|^2))).
  double busemann_disk(const CirclePoint& b, const DiskPoint& x, const DiskPoint& y) const;

  /// Largest (hyp) defect over random triples of points and boundary points.
  double audit_delta(std::size_t samples, std::uint64_t seed) const;

 private:
  PlaneGroup group_;
  double delta_;
};

/// Circle direction of a point given in hyperboloid coordinates.
CirclePoint hyperboloid_direction(const std::array<double, 3>& X);
DiskPoint hyperboloid_to_disk(const std::array<double, 3>& X);

/// lambda^{gamma p}(b) computed from hyperboloid coordinates of gamma p.
double plane_lambda(const std::array<double, 3>& hyperboloid, const CirclePoint& b);
/// ||lambda^q||_1 = (2/pi) sech(|q|/2) K(tanh(|q|/2)) at the origin basepoint.
double plane_lambda_l1(double norm);

struct OrbitEntry {
  MobiusIsometry element;
  double distance = 0.0;
  std::uint32_t parent = 0;       // index of the entry this one was expanded from
  std::uint16_t generator = 0;    // generator applied on the right
};

struct OrbitCacheParams {
  PlanePreset preset = PlanePreset::Genus2Octagon;
  double t_max = 10.0;
  /// Dedup threshold (hyperboloid-chart distance); <= 0 selects half the
  /// smallest nonzero orbit separation among short words.
  double tolerance = 0.0;
  int threads = 1;
  friend bool operator==(const OrbitCacheParams& a, const OrbitCacheParams& b) {
    return a.preset == b.preset && a.t_max == b.t_max && a.tolerance == b.tolerance;
  }
};

/// Orbit points gamma p found by breadth-first expansion over the generators
/// with proximity dedup. Expansion keeps every point within t_max + R, which
/// makes the cache complete up to t_max: the tiles met by a geodesic from p
/// to a point at distance <= t_max all have centres within t_max + R.
class OrbitCache {
 public:
  static OrbitCache build(const PlaneGroup& group, OrbitCacheParams params);
  static OrbitCache load(const std::filesystem::path& file, const PlaneGroup& group);
  void save(const std::filesystem::path& file) const;
  /// Loads a matching cache from `dir` or builds and stores one. An empty
  /// dir disables persistence.
  static OrbitCache obtain(const PlaneGroup& group, OrbitCacheParams params, const std::filesystem::path& dir);
  static std::string cache_file_name(const OrbitCacheParams& params);
  /// Directory from HYPBDRY_CACHE_DIR, else ".hypbdry-cache".
  static std::filesystem::path default_dir();

  const OrbitCacheParams& params() const { return params_; }
  /// All expanded entries, in insertion (breadth-first) order.
  const std::vector<OrbitEntry>& entries() const { return entries_; }
  /// Indices of entries within t_max, sorted by distance.
  const std::vector<std::uint32_t>& sorted() const { return order_; }
  double radius() const { return params_.t_max; }
  /// Largest chart distance between two merged candidates; near zero when
  /// dedup only removed genuine repeats.
  double max_merged_gap() const { return max_merged_gap_; }
  double tolerance() const { return tolerance_used_; }
  double min_separation() const { return min_separation_; }
  std::size_t layers() const { return layers_; }

  std::string word(std::size_t index) const;
  /// Entries with distance in the open window (lo, hi).
  std::vector<std::size_t> window(double lo, double hi) const;
  /// Annulus S_t = {gamma : d(p, gamma p) in (t - R, t + R)}.
  std::vector<std::size_t> annulus(double t, double R) const;
  std::size_t count_within(double t) const;
  /// Hyperboloid coordinates of gamma p and gamma^-1 p for an entry.
  std::array<double, 3> image(std::size_t index) const { return entries_[index].element.basepoint_image(); }
  std::array<double, 3> inverse_image(std::size_t index) const {
    return entries_[index].element.inverse().basepoint_image();
  }

 private:
  OrbitCacheParams params_;
  void finalize();

  std::vector<OrbitEntry> entries_;
  std::vector<std::uint32_t> order_;
  std::vector<double> sorted_distance_;
  std::vector<std::string> generator_names_;
  double max_merged_gap_ = 0.0;
  double tolerance_used_ = 0.0;
  double min_separation_ = 0.0;
  std::size_t layers_ = 0;
};

/// Half-open arcs [start, end) of the circle, in radians; a finite union.
class ArcSet {
 public:
  ArcSet() = default;
  static ArcSet whole();
  static ArcSet arc(double start, double end);  // counterclockwise from start to end
  /// Parses "0.1..0.3" style intervals in turns; see cli help.
  static ArcSet from_turns(double start_turn, double end_turn);

  const std::vector<std::pair<double, double>>& arcs() const { return arcs_; }
  bool is_empty() const { return arcs_.empty(); }
  bool contains(const CirclePoint& b) const;
  double measure() const;  // normalised: whole circle = 1
  ArcSet complement() const;
  ArcSet unite(const ArcSet& o) const;
  ArcSet intersect(const ArcSet& o) const;
  /// {b : sigma(b, U) < e^{-a}}.
  ArcSet thicken(double a) const;
  /// Finite breakpoints of the arcs (for quadrature).
  std::vector<double> breakpoints() const;

 private:
  void normalize();
  std::vector<std::pair<double, double>> arcs_;  // disjoint, sorted, within [0, 2 pi]
};

/// Monte Carlo estimate of the integral of f against nu_p with its standard
/// error. Uses a fixed-shape pairwise reduction, so the result does not
/// depend on `threads`.
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};
McEstimate mc_boundary_integral(const std::function<double(const CirclePoint&)>& f, std::size_t n_samples,
                                std::uint64_t seed, int threads = 1);

/// Adaptive Gauss-Kronrod integral of f against nu_p with breakpoints.
double quadrature_boundary_integral(const std::function<double(const CirclePoint&)>& f,
                                    std::vector<double> breakpoints = {}, double tol = 1e-11);

}  // namespace hypbdry
