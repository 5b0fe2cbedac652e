#include "hypbdry/rep.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "enumerate.hpp"
#include "hypbdry/parallel.hpp"

namespace hypbdry {

namespace {

ExactScalar cell_weight(long radicand, int num_letters, long E) {
  return ExactScalar::half_power(radicand, E) / ExactScalar(static_cast<long>(num_letters));
}

struct WeightCache {
  long radicand;
  int num_letters;
  std::map<long, ExactScalar> cache;
  const ExactScalar& operator()(long E) {
    auto it = cache.find(E);
    if (it == cache.end()) it = cache.emplace(E, cell_weight(radicand, num_letters, E)).first;
    return it->second;
  }
};

void check_same_group(const FreeTreeModel& m, const SimpleFunction& f) {
  if (f.rank() != m.rank()) throw DomainError("simple function belongs to a different free group");
}

}  // namespace

// ---------------------------------------------------------------------------

SimpleFunction::SimpleFunction(const FreeGroup& g, std::size_t depth, std::vector<ExactScalar> values)
    : rank_(g.rank()), depth_(depth), values_(std::move(values)) {
  if (values_.size() != g.sphere_size(depth)) throw DomainError("simple function: wrong number of cell values");
}

SimpleFunction SimpleFunction::constant(const FreeGroup& g, ExactScalar c) { return {g, 0, {std::move(c)}}; }

SimpleFunction SimpleFunction::indicator(const FreeGroup& g, const CylinderSet& s) {
  std::vector<ExactScalar> v(g.sphere_size(s.depth()), ExactScalar(0));
  for (auto i : s.indices()) v[i] = ExactScalar(1);
  return {g, s.depth(), std::move(v)};
}

const ExactScalar& SimpleFunction::value_at(const Letter* letters) const {
  if (depth_ == 0) return values_[0];
  FreeGroup g(rank_);
  return values_[g.cylinder_index(letters, depth_)];
}

ExactScalar SimpleFunction::evaluate(const BoundaryWord& b) const {
  auto head = b.head(depth_);
  return value_at(head.data());
}

SimpleFunction SimpleFunction::refined(std::size_t depth) const {
  if (depth < depth_) throw DomainError("refined: cannot coarsen a simple function");
  if (depth == depth_) return *this;
  FreeGroup g(rank_);
  std::vector<ExactScalar> out;
  out.reserve(g.sphere_size(depth));
  g.for_each_word(depth, [&](const ReducedWord& w) { out.push_back(value_at(w.letters().data())); });
  return {g, depth, std::move(out)};
}

bool operator==(const SimpleFunction& a, const SimpleFunction& b) {
  if (a.rank_ != b.rank_) return false;
  std::size_t d = std::max(a.depth_, b.depth_);
  return a.refined(d).values_ == b.refined(d).values_;
}

ExactScalar inner_product(const FreeTreeModel& m, const SimpleFunction& u, const SimpleFunction& v) {
  check_same_group(m, u);
  check_same_group(m, v);
  std::size_t d = std::max(u.depth(), v.depth());
  auto a = u.refined(d), b = v.refined(d);
  ExactScalar s(0);
  for (std::size_t i = 0; i < a.cells(); ++i) s += a.cell_value(i) * b.cell_value(i);
  return s * m.cylinder_measure(d);
}

// ---------------------------------------------------------------------------

ExactScalar lambda_eval(const FreeTreeModel& m, const TreePoint& q, const BoundaryWord& b) {
  return m.exp_half_eta(m.busemann_exact(b, m.basepoint(), q));
}

ExactScalar chopped_lambda_eval(const FreeTreeModel& m, const TreePoint& q, const BoundaryWord& b) {
  if (m.is_basepoint(q)) return ExactScalar(1);
  Rational len = m.norm_exact(q);
  Rational along;
  try {
    along = m.gromov_exact(m.direction(q), b, m.basepoint());
  } catch (const InfiniteProduct&) {
    along = len;
  }
  Rational chopped = along < len ? along : len;
  return m.exp_half_eta(len - 2 * chopped);
}

SimpleFunction lambda_function(const FreeTreeModel& m, const ReducedWord& q) {
  const auto& g = m.group();
  const long n = static_cast<long>(q.size());
  std::vector<ExactScalar> v;
  v.reserve(g.sphere_size(q.size()));
  g.for_each_word(q.size(), [&](const ReducedWord& u) {
    long j = 0;
    while (j < n && u[static_cast<std::size_t>(j)] == q[static_cast<std::size_t>(j)]) ++j;
    v.push_back(m.exp_half_eta(Rational(n - 2 * j) * m.edge_length()));
  });
  return {g, q.size(), std::move(v)};
}

ExactScalar lambda_l1(const FreeTreeModel& m, std::size_t n) {
  if (n == 0) return ExactScalar(1);
  const long B = m.branching();
  const long two_k = m.group().num_letters();
  const long nn = static_cast<long>(n);
  ExactScalar total(0);
  for (long j = 0; j <= nn; ++j) {
    // measure of the set of b agreeing with q in exactly j letters
    Rational mass;
    if (j == nn)
      mass = make_rational(1, two_k) * pow_rational(Rational(B), 1 - nn);
    else if (j == 0)
      mass = make_rational(B, two_k);
    else
      mass = make_rational(B - 1, two_k) * pow_rational(Rational(B), -j);
    total += ExactScalar(mass) * ExactScalar::half_power(B, 2 * j - nn);
  }
  return total;
}

ExactScalar lambda_l1(const FreeTreeModel& m, const ReducedWord& q) { return lambda_l1(m, q.size()); }

SimpleFunction apply_rho(const FreeTreeModel& m, const ReducedWord& gamma, const SimpleFunction& v,
                         std::size_t max_depth) {
  check_same_group(m, v);
  const auto& g = m.group();
  const std::size_t n = gamma.size();
  const std::size_t D = n + v.depth();
  if (D > max_depth) {
    throw ResolutionBudgetExceeded("apply_rho needs depth " + std::to_string(D) + " > budget " +
                                       std::to_string(max_depth),
                                   static_cast<int>(max_depth));
  }
  if (D == 0) return v;
  const TreePoint q = TreePoint::at(gamma);
  std::vector<ExactScalar> out;
  out.reserve(g.sphere_size(D));
  std::vector<Letter> pulled;
  g.for_each_word(D, [&](const ReducedWord& u) {
    BoundaryWord b{u.letters(), {}};
    ExactScalar lam = lambda_eval(m, q, b);
    std::size_t j = m.match_length(gamma, b);
    // gamma^-1 u, reduced: inverse of gamma's unmatched tail, then u past j
    pulled.clear();
    for (std::size_t i = n; i-- > j;) pulled.push_back(inverse_letter(gamma[i]));
    for (std::size_t i = j; i < D && pulled.size() < v.depth(); ++i) pulled.push_back(u[i]);
    out.push_back(lam * v.value_at(pulled.data()));
  });
  return {g, D, std::move(out)};
}

ExactScalar matrix_coefficient(const FreeTreeModel& m, const ReducedWord& gamma, const SimpleFunction& g,
                               const SimpleFunction& h) {
  check_same_group(m, g);
  check_same_group(m, h);
  std::map<std::tuple<long, std::uint64_t, std::uint64_t>, std::uint64_t> hist;
  for_each_coefficient_cell(m.group(), gamma, g.depth(), h.depth(),
                            [&](long E, std::uint64_t gc, std::uint64_t hc) { ++hist[{E, gc, hc}]; });
  WeightCache weight{m.branching(), m.group().num_letters(), {}};
  ExactScalar total(0);
  for (const auto& [key, count] : hist) {
    auto [E, gc, hc] = key;
    const ExactScalar& gv = g.cell_value(gc);
    const ExactScalar& hv = h.cell_value(hc);
    if (gv.is_zero() || hv.is_zero()) continue;
    total += ExactScalar(static_cast<long>(count)) * gv * hv * weight(E);
  }
  return total;
}

ExactScalar matrix_coefficient_direct(const FreeTreeModel& m, const ReducedWord& gamma, const SimpleFunction& g,
                                      const SimpleFunction& h, std::size_t max_depth) {
  return inner_product(m, apply_rho(m, gamma, g, max_depth), h);
}

// ---------------------------------------------------------------------------

ExactScalar GroupAlgebraVector::total() const {
  ExactScalar s(0);
  for (const auto& c : coefficients) s += c;
  return s;
}

GroupAlgebraVector build_Tt(const FreeTreeModel& m, const SimpleFunction& f, double t) {
  check_same_group(m, f);
  GroupAlgebraVector T;
  T.support = m.enumerate_annulus(t);
  const ExactScalar size(static_cast<long>(T.support.size()));
  std::map<std::size_t, ExactScalar> norms;
  for (const auto& w : T.support) {
    auto it = norms.find(w.size());
    if (it == norms.end()) it = norms.emplace(w.size(), lambda_l1(m, w.size())).first;
    ExactScalar fv = f.evaluate(m.direction(w));
    T.coefficients.push_back(fv.is_zero() ? ExactScalar(0) : fv / (size * it->second));
  }
  return T;
}

ExactScalar pair_group_algebra(const FreeTreeModel& m, const GroupAlgebraVector& T, const SimpleFunction& g,
                               const SimpleFunction& h) {
  ExactScalar s(0);
  for (std::size_t i = 0; i < T.support.size(); ++i) {
    if (T.coefficients[i].is_zero()) continue;
    s += T.coefficients[i] * matrix_coefficient(m, T.support[i], g, h);
  }
  return s;
}

// ---------------------------------------------------------------------------

SupNormResult sup_norm_Tt1(const FreeTreeModel& m, double t) {
  const auto& g = m.group();
  const auto lengths = m.annulus_lengths(t);
  const std::size_t N = std::max<std::size_t>(1, *std::max_element(lengths.begin(), lengths.end()));
  const int nl = g.num_letters();
  const long B = m.branching();

  // cont[r][l]: reduced continuations of length r after letter l
  std::vector<std::vector<std::uint64_t>> cont(N + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(nl), 0));
  for (int l = 0; l < nl; ++l) cont[0][static_cast<std::size_t>(l)] = 1;
  for (std::size_t r = 1; r <= N; ++r)
    for (int l = 0; l < nl; ++l) {
      std::uint64_t s = 0;
      for (int c = 0; c < nl; ++c)
        if (c != inverse_letter(static_cast<Letter>(l))) s += cont[r - 1][static_cast<std::size_t>(c)];
      cont[r][static_cast<std::size_t>(l)] = s;
    }
  // words of length n with the given prefix of u (length i)
  auto with_prefix = [&](const std::vector<Letter>& u, std::size_t i, std::size_t n) -> std::uint64_t {
    if (i == 0) {
      if (n == 0) return 1;
      std::uint64_t s = 0;
      for (int l = 0; l < nl; ++l) s += cont[n - 1][static_cast<std::size_t>(l)];
      return s;
    }
    return cont[n - i][u[i - 1]];
  };

  std::map<std::vector<std::uint64_t>, bool> profiles;
  std::vector<std::uint64_t> profile;
  g.for_each_word(N, [&](const ReducedWord& cell) {
    profile.clear();
    for (auto n : lengths)
      for (std::size_t j = 0; j <= n; ++j) {
        std::uint64_t here = with_prefix(cell.letters(), j, n);
        std::uint64_t deeper = j < n ? with_prefix(cell.letters(), j + 1, n) : 0;
        profile.push_back(here - deeper);
      }
    profiles.emplace(profile, true);
  });

  std::uint64_t total = 0;
  for (auto n : lengths) total += g.sphere_size(n);
  std::vector<ExactScalar> norms;
  for (auto n : lengths) norms.push_back(lambda_l1(m, n));

  SupNormResult res;
  res.classes = profiles.size();
  bool first = true;
  for (const auto& [prof, unused] : profiles) {
    (void)unused;
    ExactScalar v(0);
    std::size_t k = 0;
    for (std::size_t li = 0; li < lengths.size(); ++li) {
      const long n = static_cast<long>(lengths[li]);
      for (long j = 0; j <= n; ++j, ++k) {
        if (prof[k] == 0) continue;
        v += ExactScalar(static_cast<long>(prof[k])) * ExactScalar::half_power(B, 2 * j - n) / norms[li];
      }
    }
    v /= ExactScalar(static_cast<long>(total));
    if (first || v > res.sup) res.sup = v;
    if (first || v < res.inf) res.inf = v;
    first = false;
  }
  return res;
}

PlaneSupNorm sup_norm_Tt1(const PlaneModel& m, const OrbitCache& cache, double t, std::size_t samples,
                          int threads) {
  const auto S = cache.annulus(t, m.quotient_radius());
  if (S.empty()) throw DomainError("sup_norm_Tt1: empty annulus");
  if (samples == 0) throw DomainError("sup_norm_Tt1: need boundary samples");
  // lambda^{gamma p}(b) = (X0 - X1 cos b - X2 sin b)^{-1/2}; the cancellation
  // near the peak costs at most ~1e-5 relative for |gamma p| <= 13
  std::vector<std::array<double, 4>> terms_of;
  terms_of.reserve(S.size());
  for (auto i : S) {
    auto X = cache.image(i);
    terms_of.push_back({X[0], X[1], X[2], 1.0 / plane_lambda_l1(cache.entries()[i].distance)});
  }
  std::vector<double> values(samples);
  parallel_chunks(samples, 64, threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> terms(terms_of.size());
    for (std::size_t s = lo; s < hi; ++s) {
      const double angle = 2.0 * std::numbers::pi * (static_cast<double>(s) + 0.5) / static_cast<double>(samples);
      const double cb = std::cos(angle), sb = std::sin(angle);
      for (std::size_t i = 0; i < terms_of.size(); ++i) {
        const auto& X = terms_of[i];
        terms[i] = X[3] / std::sqrt(X[0] - X[1] * cb - X[2] * sb);
      }
      values[s] = pairwise_sum(terms) / static_cast<double>(terms_of.size());
    }
  });
  PlaneSupNorm r;
  r.sup = *std::max_element(values.begin(), values.end());
  r.inf = *std::min_element(values.begin(), values.end());
  r.s_t_size = S.size();
  r.samples = samples;
  return r;
}

// ---------------------------------------------------------------------------

TailBound tail_bound_check(const FreeTreeModel& m, const ReducedWord& q, const CylinderSet& V, double a,
                           double lambda_lower_constant) {
  if (!(a > 0)) throw DomainError("tail bound: a must be positive");
  if (q.empty()) throw DomainError("tail bound: q must differ from the basepoint");
  if (!(lambda_lower_constant > 0)) throw DomainError("tail bound: Lambda constant must be positive");
  const auto& g = m.group();
  if (!V.is_empty() && m.thicken(V, a).contains(m.direction(q)))
    throw DomainError("tail bound: z_p^q lies in V(a)");
  TailBound r;
  r.lhs_exact = V.is_empty() ? ExactScalar(0)
                             : inner_product(m, lambda_function(m, q), SimpleFunction::indicator(g, V)) /
                                   lambda_l1(m, q);
  r.lhs = r.lhs_exact.to_double();
  const double eta = m.critical_exponent();
  const double delta = m.delta();
  const double nu_B = 1.0;
  r.C0 = std::exp(delta * eta) * nu_B * std::exp(delta) / lambda_lower_constant;
  const double len = to_double(m.norm_exact(TreePoint::at(q)));
  if (len <= a) {
    r.short_branch = true;
    r.rhs = std::exp(a) / a;
  } else {
    r.rhs = r.C0 * std::exp(eta * a) / len;
  }
  r.holds = r.lhs <= r.rhs;
  return r;
}

// ---------------------------------------------------------------------------

ExactScalar Tt_coefficient(const FreeTreeModel& m, const SimpleFunction& f, const SimpleFunction& g,
                           const SimpleFunction& h, double t, int threads, std::uint64_t* s_t_size) {
  check_same_group(m, f);
  check_same_group(m, g);
  check_same_group(m, h);
  const auto& grp = m.group();
  const auto lengths = m.annulus_lengths(t);
  constexpr std::size_t kMaxCellDepth = 9;  // cell indices must fit 16 bits
  if (std::max({f.depth(), g.depth(), h.depth()}) > kMaxCellDepth)
    throw ResolutionBudgetExceeded("Tt_coefficient: simple functions deeper than 9", static_cast<int>(kMaxCellDepth));

  std::uint64_t total = 0;
  for (auto n : lengths) total += grp.sphere_size(n);
  if (s_t_size) *s_t_size = total;

  auto pack = [](long E, std::uint64_t fc, std::uint64_t gc, std::uint64_t hc) {
    return (static_cast<std::uint64_t>(E + 512) << 48) | (fc << 32) | (gc << 16) | hc;
  };

  WeightCache weight{m.branching(), grp.num_letters(), {}};
  ExactScalar value(0);
  std::vector<bool> f_zero(f.cells());
  for (std::size_t i = 0; i < f.cells(); ++i) f_zero[i] = f.cell_value(i).is_zero();

  for (auto n : lengths) {
    if (n == 0) throw DomainError("Tt_coefficient: annulus contains the identity");
    const std::uint64_t words = grp.sphere_size(n);
    const std::size_t chunks = 64;
    std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> parts(chunks);
    parallel_chunks(words, chunks, threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      auto& hist = parts[c];
      std::vector<Letter> dir(f.depth());
      detail::for_words_in_range(grp, n, lo, hi, [&](const std::vector<Letter>& w) {
        for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = i < n ? w[i] : w[n - 1];
        std::uint64_t fc = f.depth() ? grp.cylinder_index(dir.data(), dir.size()) : 0;
        if (f_zero[fc]) return;
        ReducedWord rw(w);
        for_each_coefficient_cell(grp, rw, g.depth(), h.depth(), [&](long E, std::uint64_t gc, std::uint64_t hc) {
          ++hist[pack(E, fc, gc, hc)];
        });
      });
    });
    std::map<std::uint64_t, std::uint64_t> merged;
    for (const auto& part : parts)
      for (const auto& [k, v] : part) merged[k] += v;
    ExactScalar sum(0);
    for (const auto& [key, count] : merged) {
      long E = static_cast<long>(key >> 48) - 512;
      std::uint64_t fc = (key >> 32) & 0xFFFF, gc = (key >> 16) & 0xFFFF, hc = key & 0xFFFF;
      const ExactScalar& gv = g.cell_value(gc);
      const ExactScalar& hv = h.cell_value(hc);
      if (gv.is_zero() || hv.is_zero()) continue;
      sum += ExactScalar(static_cast<long>(count)) * f.cell_value(fc) * gv * hv * weight(E);
    }
    value += sum / lambda_l1(m, n);
  }
  return value / ExactScalar(static_cast<long>(total));
}

std::vector<ConvergenceRow> convergence_experiment(const FreeTreeModel& m, const CylinderSet& U,
                                                   const CylinderSet& V, const CylinderSet& W,
                                                   const std::vector<double>& t_list, int threads,
                                                   std::size_t max_word_length) {
  const auto& g = m.group();
  auto f = SimpleFunction::indicator(g, U);
  auto gv = SimpleFunction::indicator(g, V);
  auto h = SimpleFunction::indicator(g, W);
  ExactScalar target = U.intersect(W).measure() * V.measure();
  std::vector<ConvergenceRow> rows;
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : t_list) {
    if (!(t > prev)) throw DomainError("convergence_experiment: t values must increase");
    prev = t;
    auto lengths = m.annulus_lengths(t);
    std::size_t longest = lengths.empty() ? 0 : *std::max_element(lengths.begin(), lengths.end());
    if (longest > max_word_length) {
      double feasible = to_double(m.edge_length()) * static_cast<double>(max_word_length);
      throw ResolutionBudgetExceeded("convergence_experiment: t = " + format_double(t, 6) +
                                         " exceeds the word-length budget; largest feasible t is about " +
                                         format_double(feasible, 6),
                                     static_cast<int>(max_word_length));
    }
    auto start = std::chrono::steady_clock::now();
    ConvergenceRow row;
    row.t = t;
    row.value = Tt_coefficient(m, f, gv, h, t, threads, &row.s_t_size);
    row.target = target;
    row.abs_error = std::abs((row.value - target).to_double());
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::vector<double> compressed_operator(const FreeTreeModel& m, const ReducedWord& gamma, std::size_t n) {
  const auto& g = m.group();
  const std::size_t D = g.sphere_size(n);
  std::vector<double> M(D * D, 0.0);
  const double B = static_cast<double>(m.branching());
  // weight / nu(depth-n cell) = (2k-1)^(E/2 - 1 + n)
  for_each_coefficient_cell(g, gamma, n, n, [&](long E, std::uint64_t gc, std::uint64_t hc) {
    M[hc * D + gc] += std::pow(B, 0.5 * static_cast<double>(E) - 1.0 + static_cast<double>(n));
  });
  return M;
}

RankSweep truncation_rank(const FreeTreeModel& m, std::size_t n, std::size_t max_L, double rel_tol,
                          std::size_t max_dimension) {
  const auto& g = m.group();
  RankSweep sweep;
  sweep.dimension = g.sphere_size(n);
  const std::size_t D = sweep.dimension;
  if (D > max_dimension)
    throw ResolutionBudgetExceeded("truncation_rank: dimension " + std::to_string(D) + " exceeds budget",
                                   static_cast<int>(max_dimension));
  std::vector<std::vector<double>> columns;
  for (std::size_t L = 0; L <= max_L; ++L) {
    g.for_each_word(L, [&](const ReducedWord& w) { columns.push_back(compressed_operator(m, w, n)); });
    Eigen::MatrixXd A(static_cast<Eigen::Index>(D * D), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
      for (std::size_t r = 0; r < D * D; ++r) A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = columns[c][r];
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * smax) ++rank;
    sweep.rank_by_length.push_back(rank);
    if (!sweep.full_rank_length && rank == D * D) sweep.full_rank_length = L;
  }
  return sweep;
}

// ---------------------------------------------------------------------------

PlaneFunction apply_rho(const MobiusIsometry& gamma, PlaneFunction v) {
  auto image = gamma.basepoint_image();
  MobiusIsometry inv = gamma.inverse();
  return [image, inv, v = std::move(v)](const CirclePoint& b) { return plane_lambda(image, b) * v(inv.apply(b)); };
}

double matrix_coefficient(const MobiusIsometry& gamma, const PlaneFunction& g, const PlaneFunction& h,
                          const std::vector<double>& breakpoints) {
  auto rg = apply_rho(gamma, g);
  std::vector<double> bp = breakpoints;
  bp.push_back(hyperboloid_direction(gamma.basepoint_image()).angle);
  return quadrature_boundary_integral([&](const CirclePoint& b) { return rg(b) * h(b); }, bp);
}

}  // namespace hypbdry
