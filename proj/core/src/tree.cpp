#include "hypbdry/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hypbdry {

namespace {

std::uint64_t ipow(std::uint64_t base, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

// Rounds x to the nearest integer when it is within a few ulps of it, so
// that lengths recovered through log/exp land on the right side of integer
// thresholds.
double snap(double x) {
  double r = std::round(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

long ceil_to_long(const Rational& q) {
  BigInt c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return c.get_si();
}

long floor_to_long(const Rational& q) {
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

}  // namespace

// ---------------------------------------------------------------------------
// ReducedWord / BoundaryWord

ReducedWord::ReducedWord(std::vector<Letter> letters) : letters_(std::move(letters)) {
  for (std::size_t i = 1; i < letters_.size(); ++i) {
    if (letters_[i] == inverse_letter(letters_[i - 1])) throw DomainError("word is not reduced");
  }
}

void ReducedWord::push_back(Letter l) {
  if (!letters_.empty() && l == inverse_letter(letters_.back())) throw DomainError("push_back would cancel");
  letters_.push_back(l);
}

ReducedWord ReducedWord::prefix(std::size_t n) const {
  ReducedWord r;
  r.letters_.assign(letters_.begin(), letters_.begin() + static_cast<long>(std::min(n, letters_.size())));
  return r;
}

ReducedWord ReducedWord::inverse() const {
  ReducedWord r;
  r.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) r.letters_.push_back(inverse_letter(*it));
  return r;
}

std::size_t BoundaryWord::known_depth() const {
  return periodic() ? std::numeric_limits<std::size_t>::max() : prefix.size();
}

std::optional<Letter> BoundaryWord::letter(std::size_t i) const {
  if (i < prefix.size()) return prefix[i];
  if (period.empty()) return std::nullopt;
  return period[(i - prefix.size()) % period.size()];
}

std::vector<Letter> BoundaryWord::head(std::size_t n) const {
  std::vector<Letter> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto l = letter(i);
    if (!l) throw InsufficientDepth("boundary word known to depth " + std::to_string(prefix.size()) +
                                    ", needed " + std::to_string(n));
    out.push_back(*l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// FreeGroup

FreeGroup::FreeGroup(int rank) : rank_(rank) {
  if (rank < 2 || rank > 13) throw DomainError("free group rank must be in [2, 13]");
}

char FreeGroup::letter_name(Letter l) const {
  char base = static_cast<char>('a' + l / 2);
  return (l & 1U) ? static_cast<char>(base - 'a' + 'A') : base;
}

Letter FreeGroup::parse_letter(char c) const {
  int idx;
  if (c >= 'a' && c <= 'z') {
    idx = 2 * (c - 'a');
  } else if (c >= 'A' && c <= 'Z') {
    idx = 2 * (c - 'A') + 1;
  } else {
    throw DomainError(std::string("invalid letter '") + c + "'");
  }
  if (idx >= num_letters()) throw DomainError(std::string("letter '") + c + "' outside the rank");
  return static_cast<Letter>(idx);
}

ReducedWord FreeGroup::parse(std::string_view text) const {
  if (text == "e" || text.empty()) return {};
  std::vector<Letter> letters;
  for (char c : text) letters.push_back(parse_letter(c));
  return ReducedWord(std::move(letters));
}

BoundaryWord FreeGroup::parse_boundary(std::string_view text) const {
  BoundaryWord b;
  auto open = text.find('(');
  std::string_view head = text.substr(0, open);
  for (char c : head) b.prefix.push_back(parse_letter(c));
  if (open != std::string_view::npos) {
    auto close = text.find(')', open);
    if (close == std::string_view::npos || close + 1 != text.size()) throw DomainError("malformed boundary word");
    for (char c : text.substr(open + 1, close - open - 1)) b.period.push_back(parse_letter(c));
    if (b.period.empty()) throw DomainError("empty period");
  }
  // Reducedness across the whole infinite word.
  std::size_t check = b.prefix.size() + 2 * b.period.size() + 1;
  if (!b.periodic()) check = b.prefix.size();
  for (std::size_t i = 1; i < check; ++i) {
    if (*b.letter(i) == inverse_letter(*b.letter(i - 1))) throw DomainError("boundary word is not reduced");
  }
  return b;
}

std::string FreeGroup::to_string(const ReducedWord& w) const {
  if (w.empty()) return "e";
  std::string s;
  for (Letter l : w.letters()) s.push_back(letter_name(l));
  return s;
}

std::string FreeGroup::to_string(const BoundaryWord& b) const {
  std::string s;
  for (Letter l : b.prefix) s.push_back(letter_name(l));
  if (b.periodic()) {
    s.push_back('(');
    for (Letter l : b.period) s.push_back(letter_name(l));
    s.push_back(')');
  }
  return s;
}

ReducedWord FreeGroup::multiply(const ReducedWord& u, const ReducedWord& v) const {
  std::vector<Letter> out(u.letters());
  for (Letter l : v.letters()) {
    if (!out.empty() && out.back() == inverse_letter(l)) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return ReducedWord(std::move(out));
}

ReducedWord FreeGroup::power(const ReducedWord& u, int n) const {
  ReducedWord base = n >= 0 ? u : u.inverse();
  ReducedWord r;
  for (int i = 0; i < std::abs(n); ++i) r = multiply(r, base);
  return r;
}

ReducedWord FreeGroup::random_word(std::size_t length, std::uint64_t& state) const {
  auto next = [&state]() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::vector<Letter> letters;
  for (std::size_t i = 0; i < length; ++i) {
    if (letters.empty()) {
      letters.push_back(static_cast<Letter>(next() % static_cast<std::uint64_t>(num_letters())));
    } else {
      auto r = static_cast<Letter>(next() % static_cast<std::uint64_t>(num_letters() - 1));
      Letter forbidden = inverse_letter(letters.back());
      letters.push_back(r >= forbidden ? static_cast<Letter>(r + 1) : r);
    }
  }
  return ReducedWord(std::move(letters));
}

std::uint64_t FreeGroup::sphere_size(std::size_t n) const {
  if (n == 0) return 1;
  return static_cast<std::uint64_t>(num_letters()) * ipow(static_cast<std::uint64_t>(branching()), n - 1);
}

std::uint64_t FreeGroup::cylinder_index(const Letter* letters, std::size_t n) const {
  if (n == 0) return 0;
  std::uint64_t idx = letters[0];
  const auto b = static_cast<std::uint64_t>(branching());
  for (std::size_t i = 1; i < n; ++i) {
    Letter forbidden = inverse_letter(letters[i - 1]);
    std::uint64_t r = letters[i] > forbidden ? letters[i] - 1U : letters[i];
    idx = idx * b + r;
  }
  return idx;
}

ReducedWord FreeGroup::word_at(std::size_t n, std::uint64_t index) const {
  if (n == 0) return {};
  const auto b = static_cast<std::uint64_t>(branching());
  std::vector<std::uint64_t> digits(n);
  for (std::size_t i = n - 1; i >= 1; --i) {
    digits[i] = index % b;
    index /= b;
  }
  if (index >= static_cast<std::uint64_t>(num_letters())) throw DomainError("cylinder index out of range");
  digits[0] = index;
  std::vector<Letter> letters(n);
  letters[0] = static_cast<Letter>(digits[0]);
  for (std::size_t i = 1; i < n; ++i) {
    auto r = static_cast<Letter>(digits[i]);
    Letter forbidden = inverse_letter(letters[i - 1]);
    letters[i] = r >= forbidden ? static_cast<Letter>(r + 1) : r;
  }
  return ReducedWord(std::move(letters));
}

void FreeGroup::for_each_word(std::size_t n, const std::function<void(const ReducedWord&)>& visit,
                              std::optional<Letter> first) const {
  if (n == 0) {
    if (!first) visit(ReducedWord{});
    return;
  }
  const std::uint64_t total = sphere_size(n);
  const std::uint64_t per_first = total / static_cast<std::uint64_t>(num_letters());
  std::uint64_t lo = 0, hi = total;
  if (first) {
    lo = per_first * *first;
    hi = lo + per_first;
  }
  // Odometer over the mixed-radix digits; avoids re-validating every word.
  ReducedWord w = word_at(n, lo);
  std::vector<Letter> letters = w.letters();
  const auto nl = static_cast<Letter>(num_letters());
  for (std::uint64_t idx = lo; idx < hi; ++idx) {
    visit(ReducedWord(letters));
    if (idx + 1 == hi) break;
    // increment
    std::size_t pos = n - 1;
    while (true) {
      Letter forbidden = pos > 0 ? inverse_letter(letters[pos - 1]) : nl;
      Letter next = static_cast<Letter>(letters[pos] + 1);
      if (next == forbidden) ++next;
      if (next < nl) {
        letters[pos] = next;
        break;
      }
      --pos;
    }
    for (std::size_t i = pos + 1; i < n; ++i) {
      Letter forbidden = inverse_letter(letters[i - 1]);
      letters[i] = forbidden == 0 ? 1 : 0;
    }
  }
}

std::vector<ReducedWord> FreeGroup::words_of_length(std::size_t n) const {
  std::vector<ReducedWord> out;
  out.reserve(sphere_size(n));
  for_each_word(n, [&out](const ReducedWord& w) { out.push_back(w); });
  return out;
}

// ---------------------------------------------------------------------------
// CylinderSet

CylinderSet::CylinderSet(const FreeGroup& g, std::size_t depth, std::vector<std::uint64_t> indices)
    : rank_(g.rank()), depth_(depth), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && indices_.back() >= g.sphere_size(depth)) throw DomainError("cylinder index out of range");
}

CylinderSet CylinderSet::from_prefixes(const FreeGroup& g, const std::vector<ReducedWord>& prefixes) {
  std::size_t depth = 0;
  for (const auto& p : prefixes) depth = std::max(depth, p.size());
  std::vector<std::uint64_t> idx;
  for (const auto& p : prefixes) {
    CylinderSet single(g, p.size(), {g.cylinder_index(p)});
    auto r = single.refined(depth);
    idx.insert(idx.end(), r.indices_.begin(), r.indices_.end());
  }
  return CylinderSet(g, depth, std::move(idx));
}

CylinderSet CylinderSet::refined(std::size_t depth) const {
  if (depth < depth_) throw DomainError("refined: cannot coarsen a cylinder set");
  FreeGroup g(rank_);
  const auto b = static_cast<std::uint64_t>(g.branching());
  std::vector<std::uint64_t> cur = indices_;
  for (std::size_t d = depth_; d < depth; ++d) {
    std::vector<std::uint64_t> next;
    if (d == 0) {
      if (!cur.empty()) {
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(g.num_letters()); ++i) next.push_back(i);
      }
    } else {
      next.reserve(cur.size() * b);
      for (auto idx : cur) {
        for (std::uint64_t r = 0; r < b; ++r) next.push_back(idx * b + r);
      }
    }
    cur.swap(next);
  }
  CylinderSet out;
  out.rank_ = rank_;
  out.depth_ = depth;
  out.indices_ = std::move(cur);
  return out;
}

CylinderSet CylinderSet::complement() const {
  FreeGroup g(rank_);
  std::vector<std::uint64_t> out;
  std::uint64_t total = g.sphere_size(depth_);
  std::size_t j = 0;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (j < indices_.size() && indices_[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return CylinderSet(g, depth_, std::move(out));
}

CylinderSet CylinderSet::intersect(const CylinderSet& o) const {
  std::size_t d = std::max(depth_, o.depth_);
  auto a = refined(d), b = o.refined(d);
  std::vector<std::uint64_t> out;
  std::set_intersection(a.indices_.begin(), a.indices_.end(), b.indices_.begin(), b.indices_.end(),
                        std::back_inserter(out));
  return CylinderSet(FreeGroup(rank_), d, std::move(out));
}

CylinderSet CylinderSet::unite(const CylinderSet& o) const {
  std::size_t d = std::max(depth_, o.depth_);
  auto a = refined(d), b = o.refined(d);
  std::vector<std::uint64_t> out;
  std::set_union(a.indices_.begin(), a.indices_.end(), b.indices_.begin(), b.indices_.end(), std::back_inserter(out));
  return CylinderSet(FreeGroup(rank_), d, std::move(out));
}

bool CylinderSet::contains_prefix(const Letter* letters, std::size_t n) const {
  if (n < depth_) throw InsufficientDepth("cylinder membership needs more letters");
  FreeGroup g(rank_);
  auto idx = g.cylinder_index(letters, depth_);
  return std::binary_search(indices_.begin(), indices_.end(), idx);
}

bool CylinderSet::contains(const BoundaryWord& b) const {
  auto head = b.head(depth_);
  return contains_prefix(head.data(), head.size());
}

ExactScalar CylinderSet::measure() const {
  FreeGroup g(rank_);
  FreeTreeModel m(rank_);
  return ExactScalar(static_cast<long>(indices_.size())) * m.cylinder_measure(depth_);
}

std::vector<ReducedWord> CylinderSet::prefixes() const {
  FreeGroup g(rank_);
  std::vector<ReducedWord> out;
  for (auto idx : indices_) out.push_back(g.word_at(depth_, idx));
  return out;
}

bool operator==(const CylinderSet& a, const CylinderSet& b) {
  if (a.rank_ != b.rank_) return false;
  std::size_t d = std::max(a.depth_, b.depth_);
  return a.refined(d).indices_ == b.refined(d).indices_;
}

// ---------------------------------------------------------------------------
// FreeTreeModel

FreeTreeModel::FreeTreeModel(int rank, Rational edge_length) : group_(rank), edge_(std::move(edge_length)) {
  edge_.canonicalize();
  if (edge_ <= 0) throw DomainError("edge length must be positive");
}

double FreeTreeModel::critical_exponent() const {
  return std::log(static_cast<double>(branching())) / to_double(edge_);
}

namespace {

// Length (in edges) shared by the geodesics from the identity to x and y.
Rational common_length(const TreePoint& x, const TreePoint& y) {
  const auto& xv = x.vertex.letters();
  const auto& yv = y.vertex.letters();
  std::size_t j = 0;
  while (j < xv.size() && j < yv.size() && xv[j] == yv[j]) ++j;
  if (j < xv.size() && j < yv.size()) return Rational(static_cast<long>(j));
  Rational base(static_cast<long>(j));
  if (xv.size() == yv.size()) {
    if (x.frac > 0 && y.frac > 0 && x.toward == y.toward) return base + std::min(x.frac, y.frac);
    return base;
  }
  const TreePoint& shorter = xv.size() < yv.size() ? x : y;
  const TreePoint& longer = xv.size() < yv.size() ? y : x;
  if (shorter.frac > 0 && shorter.toward == longer.vertex[j]) return base + shorter.frac;
  return base;
}

// Common length of the geodesic to x with the ray towards b.
Rational common_length(const TreePoint& x, const BoundaryWord& b) {
  const auto& xv = x.vertex.letters();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    auto l = b.letter(i);
    if (!l) throw InsufficientDepth("boundary word too short for Gromov product");
    if (*l != xv[i]) return Rational(static_cast<long>(i));
  }
  Rational base(static_cast<long>(xv.size()));
  if (x.frac == 0) return base;
  auto l = b.letter(xv.size());
  if (!l) throw InsufficientDepth("boundary word too short for Gromov product");
  return *l == x.toward ? base + x.frac : base;
}

std::size_t common_prefix(const BoundaryWord& a, const BoundaryWord& b) {
  std::size_t bound = std::numeric_limits<std::size_t>::max();
  if (a.periodic() && b.periodic()) {
    bound = std::max(a.prefix.size(), b.prefix.size()) + a.period.size() * b.period.size() + 1;
  }
  for (std::size_t i = 0;; ++i) {
    if (i >= bound) throw InfiniteProduct("Gromov product of a boundary point with itself");
    auto la = a.letter(i), lb = b.letter(i);
    if (!la || !lb) throw InsufficientDepth("truncated boundary words agree on all known letters");
    if (*la != *lb) return i;
  }
}

}  // namespace

Rational FreeTreeModel::distance_exact(const TreePoint& x, const TreePoint& y) const {
  return (x.length_in_edges() + y.length_in_edges() - 2 * common_length(x, y)) * edge_;
}

Rational FreeTreeModel::gromov_exact(const EndpointT& x, const EndpointT& y, const TreePoint& base) const {
  const TreePoint* px = std::get_if<TreePoint>(&x);
  const TreePoint* py = std::get_if<TreePoint>(&y);
  const BoundaryWord* bx = std::get_if<BoundaryWord>(&x);
  const BoundaryWord* by = std::get_if<BoundaryWord>(&y);

  if (is_basepoint(base)) {
    if (px && py) return common_length(*px, *py) * edge_;
    if (px && by) return common_length(*px, *by) * edge_;
    if (bx && py) return common_length(*py, *bx) * edge_;
    return Rational(static_cast<long>(common_prefix(*bx, *by))) * edge_;
  }

  // General base: replace boundary points by vertices far enough out that
  // the product has stabilised.
  long reach = ceil_to_long(base.length_in_edges());
  if (px) reach = std::max(reach, ceil_to_long(px->length_in_edges()));
  if (py) reach = std::max(reach, ceil_to_long(py->length_in_edges()));
  if (bx && by) reach = std::max(reach, static_cast<long>(common_prefix(*bx, *by)));
  auto depth = static_cast<std::size_t>(reach + 1);
  auto far = [&](const BoundaryWord& b) { return TreePoint::at(ReducedWord(b.head(depth))); };
  TreePoint tx = px ? *px : far(*bx);
  TreePoint ty = py ? *py : far(*by);
  return (distance_exact(tx, base) + distance_exact(ty, base) - distance_exact(tx, ty)) / 2;
}

Rational FreeTreeModel::busemann_exact(const BoundaryWord& b, const TreePoint& x, const TreePoint& y) const {
  return distance_exact(x, y) - 2 * gromov_exact(EndpointT(y), EndpointT(b), x);
}

BoundaryWord FreeTreeModel::direction(const TreePoint& q) const {
  if (is_basepoint(q)) throw DomainError("direction: the basepoint has no direction");
  BoundaryWord b;
  b.prefix = q.vertex.letters();
  if (q.frac > 0) {
    b.prefix.push_back(q.toward);
    b.period = {q.toward};
  } else {
    b.period = {q.vertex.back()};
  }
  return b;
}

TreePoint FreeTreeModel::ray_point_exact(const BoundaryWord& b, const Rational& s) const {
  if (s < 0) throw DomainError("ray_point: negative distance");
  Rational edges = s / edge_;
  long n = floor_to_long(edges);
  TreePoint p;
  p.vertex = ReducedWord(b.head(static_cast<std::size_t>(n)));
  p.frac = edges - n;
  if (p.frac > 0) {
    auto l = b.letter(static_cast<std::size_t>(n));
    if (!l) throw InsufficientDepth("ray_point beyond the known depth");
    p.toward = *l;
  }
  return p;
}

TreePoint FreeTreeModel::ray_point(const BoundaryWord& b, double s) const {
  return ray_point_exact(b, Rational(snap(s / to_double(edge_))) * edge_);
}

std::size_t FreeTreeModel::match_length(const ReducedWord& w, const BoundaryWord& b) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto l = b.letter(i);
    if (!l) throw InsufficientDepth("boundary word too short to compare with |q| = " + std::to_string(w.size()));
    if (*l != w[i]) return i;
  }
  return w.size();
}

std::vector<std::size_t> FreeTreeModel::annulus_lengths(double t) const {
  const double R = quotient_radius();
  if (t <= R) throw DomainError("annulus: t must exceed R");
  const double e = to_double(edge_);
  std::vector<std::size_t> out;
  auto lo = static_cast<long>(std::floor((t - R) / e));
  auto hi = static_cast<long>(std::ceil((t + R) / e));
  for (long n = std::max(0L, lo); n <= hi; ++n) {
    double len = static_cast<double>(n) * e;
    if (len > t - R && len < t + R) out.push_back(static_cast<std::size_t>(n));
  }
  return out;
}

std::vector<ReducedWord> FreeTreeModel::enumerate_annulus(double t) const {
  std::vector<ReducedWord> out;
  for (auto n : annulus_lengths(t)) {
    auto words = group_.words_of_length(n);
    out.insert(out.end(), words.begin(), words.end());
  }
  return out;
}

ExactScalar FreeTreeModel::cylinder_measure(std::size_t depth) const {
  if (depth == 0) return ExactScalar(1);
  Rational m = make_rational(1, group_.num_letters()) * pow_rational(Rational(branching()), 1 - static_cast<long>(depth));
  return ExactScalar(m);
}

ExactScalar FreeTreeModel::exp_half_eta(const Rational& beta) const {
  // e^{-eta beta / 2} = (2k-1)^{-beta / (2 edge)}; half-exponent = -beta / edge.
  Rational half = -beta / edge_;
  half.canonicalize();
  if (half.get_den() != 1) throw DomainError("Busemann value is not a multiple of the edge length");
  return ExactScalar::half_power(radicand(), half.get_num().get_si());
}

ExactScalar FreeTreeModel::radon_nikodym(const ReducedWord& q, const BoundaryWord& b) const {
  // beta_b(p, q) = edge * (|q| - 2j); e^{-eta beta} = (2k-1)^{2j - |q|}.
  auto j = static_cast<long>(match_length(q, b));
  Rational beta = Rational(static_cast<long>(q.size()) - 2 * j) * edge_;
  auto root = exp_half_eta(beta);
  return root * root;
}

CylinderSet FreeTreeModel::ball_set(const BoundaryWord& center, double radius, bool closed) const {
  if (radius <= 0) return CylinderSet::empty(group_);
  // sigma(b, c) = e^{-edge * j}; b in the ball iff edge * j > -log r (>= if closed).
  double x = snap(-std::log(radius) / to_double(edge_));
  long jmin;
  if (x < 0 || (closed && x <= 0)) return CylinderSet::whole(group_);
  if (std::floor(x) == x) {
    jmin = closed ? static_cast<long>(x) : static_cast<long>(x) + 1;
  } else {
    jmin = static_cast<long>(std::floor(x)) + 1;
  }
  if (jmin == 0) return CylinderSet::whole(group_);
  auto head = center.head(static_cast<std::size_t>(jmin));
  return CylinderSet(group_, head.size(), {group_.cylinder_index(head.data(), head.size())});
}

CylinderSet FreeTreeModel::thicken(const CylinderSet& u, double a) const {
  if (a <= 0) throw DomainError("thicken: a must be positive");
  if (u.is_empty()) return u;
  double x = snap(a / to_double(edge_));
  auto jstar = static_cast<std::size_t>(std::floor(x)) + 1;
  if (jstar > u.depth()) return u;
  std::vector<std::uint64_t> idx;
  for (const auto& w : u.prefixes()) idx.push_back(group_.cylinder_index(w.letters().data(), jstar));
  return CylinderSet(group_, jstar, std::move(idx));
}

// ---------------------------------------------------------------------------
// Transfer matrix

std::uint64_t transfer_matrix_count(const FreeGroup& g, Letter first, Letter last, std::size_t n) {
  if (n == 0) return 0;
  const int nl = g.num_letters();
  std::vector<std::uint64_t> v(static_cast<std::size_t>(nl), 0), next(v.size());
  v[first] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::uint64_t total = std::accumulate(v.begin(), v.end(), std::uint64_t{0});
    for (int l = 0; l < nl; ++l) next[static_cast<std::size_t>(l)] = total - v[inverse_letter(static_cast<Letter>(l))];
    v.swap(next);
  }
  return v[last];
}

std::uint64_t transfer_matrix_count(const FreeGroup& g, const ReducedWord& prefix, const ReducedWord& suffix,
                                    std::size_t n) {
  if (prefix.size() + suffix.size() > n || prefix.empty() || suffix.empty()) {
    // Overlapping or one-sided constraints: enumerate (only reached for short words).
    std::uint64_t count = 0;
    std::optional<Letter> first;
    if (!prefix.empty()) first = prefix[0];
    if (prefix.size() > n || suffix.size() > n) return 0;
    g.for_each_word(
        n,
        [&](const ReducedWord& w) {
          for (std::size_t i = 0; i < prefix.size(); ++i)
            if (w[i] != prefix[i]) return;
          for (std::size_t i = 0; i < suffix.size(); ++i)
            if (w[n - suffix.size() + i] != suffix[i]) return;
          ++count;
        },
        first);
    return count;
  }
  if (prefix.size() + suffix.size() == n) {
    return prefix.back() == inverse_letter(suffix[0]) ? 0 : 1;
  }
  // Walks from the last prefix letter to the first suffix letter with the
  // middle letters free: n - |P| - |S| + 1 transitions.
  std::size_t transitions = n - prefix.size() - suffix.size() + 1;
  const int nl = g.num_letters();
  std::vector<std::uint64_t> v(static_cast<std::size_t>(nl), 0), next(v.size());
  v[prefix.back()] = 1;
  for (std::size_t step = 0; step < transitions; ++step) {
    std::uint64_t total = std::accumulate(v.begin(), v.end(), std::uint64_t{0});
    for (int l = 0; l < nl; ++l) next[static_cast<std::size_t>(l)] = total - v[inverse_letter(static_cast<Letter>(l))];
    v.swap(next);
  }
  return v[suffix[0]];
}

}  // namespace hypbdry
