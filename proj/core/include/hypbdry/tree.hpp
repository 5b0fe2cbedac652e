#pragma once

// The free group F_k acting on its Cayley tree.
//
// Letters are numbered 0..2k-1: letter 2i is the generator g_i (printed as a
// lowercase letter), letter 2i+1 is its inverse (uppercase). Words are
// compared lexicographically in this numbering, which is the order used by
// every enumeration in the library.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypbdry/errors.hpp"
#include "hypbdry/exact.hpp"
#include "hypbdry/space.hpp"

namespace hypbdry {

using Letter = std::uint8_t;

constexpr Letter inverse_letter(Letter l) { return static_cast<Letter>(l ^ 1U); }

/// Cancellation-free letter sequence; the empty word is the identity.
class ReducedWord {
 public:
  ReducedWord() = default;
  explicit ReducedWord(std::vector<Letter> letters);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter back() const { return letters_.back(); }
  const std::vector<Letter>& letters() const { return letters_; }

  /// Appends without reducing; throws if the result would not be reduced.
  void push_back(Letter l);
  ReducedWord prefix(std::size_t n) const;
  ReducedWord inverse() const;

  friend bool operator==(const ReducedWord&, const ReducedWord&) = default;
  friend auto operator<=>(const ReducedWord& a, const ReducedWord& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.letters_ <=> b.letters_;
  }

 private:
  std::vector<Letter> letters_;
};

/// Boundary point: a prefix followed by an optional infinitely repeated
/// period. With an empty period the point is only known to `prefix.size()`
/// letters and any request beyond that throws InsufficientDepth.
struct BoundaryWord {
  std::vector<Letter> prefix;
  std::vector<Letter> period;

  bool periodic() const { return !period.empty(); }
  std::size_t known_depth() const;  // SIZE_MAX when periodic
  std::optional<Letter> letter(std::size_t i) const;
  /// First n letters; throws InsufficientDepth when unknown.
  std::vector<Letter> head(std::size_t n) const;
  friend bool operator==(const BoundaryWord&, const BoundaryWord&) = default;
};

/// Point of the tree: `vertex` plus a fraction of the edge towards
/// vertex*toward. frac is in [0, 1); when it is zero `toward` is ignored.
struct TreePoint {
  ReducedWord vertex;
  Letter toward = 0;
  Rational frac{0};

  static TreePoint at(ReducedWord w) { return TreePoint{std::move(w), 0, Rational(0)}; }
  Rational length_in_edges() const { return Rational(static_cast<long>(vertex.size())) + frac; }
  friend bool operator==(const TreePoint& a, const TreePoint& b) {
    if (a.vertex != b.vertex || a.frac != b.frac) return false;
    return a.frac == 0 || a.toward == b.toward;
  }
};

/// F_k with generators named a, b, c, ...
class FreeGroup {
 public:
  explicit FreeGroup(int rank);

  int rank() const { return rank_; }
  int num_letters() const { return 2 * rank_; }
  long branching() const { return 2L * rank_ - 1; }

  char letter_name(Letter l) const;
  Letter parse_letter(char c) const;
  /// Parses a reduced word such as "abA"; "e" or "" is the identity.
  ReducedWord parse(std::string_view text) const;
  /// Parses a boundary word "ab(a)" = ab aaa..., "ab" alone is truncated.
  BoundaryWord parse_boundary(std::string_view text) const;
  std::string to_string(const ReducedWord& w) const;
  std::string to_string(const BoundaryWord& b) const;

  ReducedWord multiply(const ReducedWord& u, const ReducedWord& v) const;
  ReducedWord power(const ReducedWord& u, int n) const;
  ReducedWord random_word(std::size_t length, std::uint64_t& state) const;

  /// Number of reduced words of length n: 2k (2k-1)^(n-1), 1 for n = 0.
  std::uint64_t sphere_size(std::size_t n) const;
  /// Lexicographic rank of a reduced word among the words of its length.
  std::uint64_t cylinder_index(const Letter* letters, std::size_t n) const;
  std::uint64_t cylinder_index(const ReducedWord& w) const { return cylinder_index(w.letters().data(), w.size()); }
  ReducedWord word_at(std::size_t n, std::uint64_t index) const;

  /// Calls visit(word) for every reduced word of length n, in lexicographic
  /// order; restricted to words starting with `first` when given.
  void for_each_word(std::size_t n, const std::function<void(const ReducedWord&)>& visit,
                     std::optional<Letter> first = std::nullopt) const;
  std::vector<ReducedWord> words_of_length(std::size_t n) const;

 private:
  int rank_;
};

/// Finite union of cylinders, stored as the set of depth-`depth` cylinder
/// indices it contains. Depth 0 with index 0 is the whole boundary.
class CylinderSet {
 public:
  CylinderSet() = default;
  CylinderSet(const FreeGroup& g, std::size_t depth, std::vector<std::uint64_t> indices);
  static CylinderSet whole(const FreeGroup& g) { return CylinderSet(g, 0, {0}); }
  static CylinderSet empty(const FreeGroup& g) { return CylinderSet(g, 0, {}); }
  static CylinderSet from_prefixes(const FreeGroup& g, const std::vector<ReducedWord>& prefixes);

  std::size_t depth() const { return depth_; }
  const std::vector<std::uint64_t>& indices() const { return indices_; }
  bool is_empty() const { return indices_.empty(); }

  CylinderSet refined(std::size_t depth) const;
  CylinderSet complement() const;
  CylinderSet intersect(const CylinderSet& o) const;
  CylinderSet unite(const CylinderSet& o) const;

  /// Membership of a boundary point; needs `depth()` known letters.
  bool contains(const BoundaryWord& b) const;
  /// Membership of the cylinder with the given prefix (prefix length >= depth).
  bool contains_prefix(const Letter* letters, std::size_t n) const;
  ExactScalar measure() const;
  std::vector<ReducedWord> prefixes() const;

  friend bool operator==(const CylinderSet& a, const CylinderSet& b);

 private:
  int rank_ = 2;
  std::size_t depth_ = 0;
  std::vector<std::uint64_t> indices_;  // sorted, unique
};

/// The Cayley tree of F_k with all edges of length `edge_length`.
///
/// delta = 0, R = edge_length / 2 (the quotient rose has diameter 1/2 in edge
/// units), eta = log(2k-1) / edge_length, nu_p = uniform cylinder measure.
class FreeTreeModel {
 public:
  using Point = TreePoint;
  using Boundary = BoundaryWord;
  using EndpointT = Endpoint<TreePoint, BoundaryWord>;

  explicit FreeTreeModel(int rank, Rational edge_length = Rational(1));

  const FreeGroup& group() const { return group_; }
  int rank() const { return group_.rank(); }
  long branching() const { return group_.branching(); }
  const Rational& edge_length() const { return edge_; }
  /// Radicand of the field holding all exact values, 2k-1.
  long radicand() const { return group_.branching(); }

  TreePoint basepoint() const { return TreePoint{}; }
  bool is_basepoint(const TreePoint& q) const { return q.vertex.empty() && q.frac == 0; }
  double delta() const { return 0.0; }
  double quotient_radius() const { return to_double(quotient_radius_exact()); }
  Rational quotient_radius_exact() const { return edge_ / 2; }
  double critical_exponent() const;

  Rational distance_exact(const TreePoint& x, const TreePoint& y) const;
  double distance(const TreePoint& x, const TreePoint& y) const { return to_double(distance_exact(x, y)); }
  Rational norm_exact(const TreePoint& x) const { return x.length_in_edges() * edge_; }

  /// Exact Gromov product; throws InfiniteProduct for a boundary point with
  /// itself and InsufficientDepth when truncated words do not decide it.
  Rational gromov_exact(const EndpointT& x, const EndpointT& y, const TreePoint& base) const;
  double gromov_product(const EndpointT& x, const EndpointT& y, const TreePoint& base) const {
    return to_double(gromov_exact(x, y, base));
  }
  Rational busemann_exact(const BoundaryWord& b, const TreePoint& x, const TreePoint& y) const;

  /// z_p^q: the geodesic p -> q continued by repeating its last letter.
  BoundaryWord direction(const TreePoint& q) const;
  BoundaryWord direction(const ReducedWord& w) const { return direction(TreePoint::at(w)); }
  TreePoint ray_point(const BoundaryWord& b, double s) const;
  TreePoint ray_point_exact(const BoundaryWord& b, const Rational& s) const;

  /// Common prefix length of b with w, capped at |w|.
  std::size_t match_length(const ReducedWord& w, const BoundaryWord& b) const;

  /// Reduced words gamma with d(p, gamma p) in (t - R, t + R), lexicographic.
  std::vector<ReducedWord> enumerate_annulus(double t) const;
  /// Word lengths n with n * edge in (t - R, t + R).
  std::vector<std::size_t> annulus_lengths(double t) const;

  /// nu_p(C(prefix)) = (1/2k) (2k-1)^(1 - |prefix|); 1 for the empty prefix.
  ExactScalar cylinder_measure(std::size_t depth) const;
  ExactScalar cylinder_measure(const ReducedWord& prefix) const { return cylinder_measure(prefix.size()); }
  /// d nu_q / d nu_p (b) = e^{-eta beta_b(p, q)} for the vertex q.
  ExactScalar radon_nikodym(const ReducedWord& q, const BoundaryWord& b) const;
  /// e^{-eta/2 * beta} for an exact Busemann value; the exponent must come
  /// out as a half-integer power of 2k-1.
  ExactScalar exp_half_eta(const Rational& beta) const;

  /// Visual-ball membership sets.
  CylinderSet ball_set(const BoundaryWord& center, double radius, bool closed = false) const;
  CylinderSet thicken(const CylinderSet& u, double a) const;

 private:
  FreeGroup group_;
  Rational edge_;
};

/// Number of reduced words of length n whose first letter is `first` and
/// whose last letter is `last`, from powers of the (2k x 2k) non-backtracking
/// transfer matrix.
std::uint64_t transfer_matrix_count(const FreeGroup& g, Letter first, Letter last, std::size_t n);
/// Same with a fixed prefix word and suffix word.
std::uint64_t transfer_matrix_count(const FreeGroup& g, const ReducedWord& prefix, const ReducedWord& suffix,
                                    std::size_t n);

}  // namespace hypbdry
