#include "hypbdry/measure.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include "json.hpp"
#include <numbers>

#include "hypbdry/parallel.hpp"
#include "hypbdry/rep.hpp"

namespace hypbdry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13, &err);
}

// Integral of f over [a, b] with 0 < a in the variable log u; integrable
// singularities of f at 0 become smooth decay.
double integrate_log(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return integrate([&](double v) { return f(std::exp(v)) * std::exp(v); }, std::log(a), std::log(b));
}

void check_decreasing(const std::function<double(double)>& f, double lo, double hi, std::size_t grid) {
  double prev = f(lo);
  if (!(prev > 0)) throw DomainError("f must be positive, f(" + format_double(lo, 6) + ") = " + format_double(prev, 6));
  for (std::size_t i = 1; i <= grid; ++i) {
    double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid);
    double v = f(u);
    if (!(v > 0)) throw DomainError("f must be positive, f(" + format_double(u, 6) + ") = " + format_double(v, 6));
    if (v > prev * (1 + 1e-12) + 1e-300)
      throw DomainError("f is not decreasing: f(" + format_double(u, 6) + ") = " + format_double(v, 6) + " > " +
                        format_double(prev, 6));
    prev = v;
  }
}

bool within(double lower, double x, double upper, double slack) {
  double tol = slack * std::max({1.0, std::abs(lower), std::abs(upper), std::abs(x)});
  return lower <= x + tol && x <= upper + tol;
}

// Depth-m classes of the tree boundary seen from b: mass of {c : (b|c) = m edge}.
struct MatchShell {
  long m;
  double sigma;
  double mass;
};

std::vector<MatchShell> match_shells(const FreeTreeModel& m, const BoundaryWord& b, double s) {
  const double edge = to_double(m.edge_length());
  std::vector<MatchShell> out;
  for (long j = 0;; ++j) {
    double sigma = std::exp(-edge * static_cast<double>(j));
    if (sigma < s * (1 - 1e-12)) break;
    ExactScalar mass = m.ball_set(b, sigma, true).measure() - m.ball_set(b, sigma, false).measure();
    out.push_back({j, sigma, mass.to_double()});
  }
  return out;
}

// Half-width of the arc {c : sigma(b, c) < r} around b.
double plane_half_width(const PlaneModel& m, const CirclePoint& b, double r) {
  auto sigma = [&](double w) { return visual_distance(m, b, CirclePoint(b.angle + w)); };
  if (r > sigma(std::numbers::pi)) return std::numbers::pi;
  double lo = 0.0, hi = std::numbers::pi;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    (sigma(mid) < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string RegularityCertificate::to_json() const {
  nlohmann::ordered_json j;
  j["eta"] = eta;
  j["k"] = k;
  j["kprime"] = kprime;
  j["samples"] = samples;
  j["worst_ratio_low"] = worst_ratio_low;
  j["worst_ratio_high"] = worst_ratio_high;
  j["description"] = description;
  if (k_exact) j["k_exact"] = k_exact->to_exact_string();
  if (kprime_exact) j["kprime_exact"] = kprime_exact->to_exact_string();
  return j.dump(2);
}

RegularityCertificate certify_from_samples(double eta, const std::vector<std::pair<double, double>>& mass_radius,
                                           std::string description, double max_spread) {
  if (mass_radius.empty()) throw DomainError("certify_from_samples: no balls");
  RegularityCertificate c;
  c.eta = eta;
  c.description = std::move(description);
  c.samples = mass_radius.size();
  c.worst_ratio_low = std::numeric_limits<double>::infinity();
  c.worst_ratio_high = 0.0;
  for (auto [mass, r] : mass_radius) {
    double ratio = mass / std::pow(r, eta);
    c.worst_ratio_low = std::min(c.worst_ratio_low, ratio);
    c.worst_ratio_high = std::max(c.worst_ratio_high, ratio);
  }
  if (!(c.worst_ratio_low > 0) || c.worst_ratio_high / c.worst_ratio_low > max_spread)
    throw AssertionFailure("regularity ratios unbounded: [" + format_double(c.worst_ratio_low) + ", " +
                           format_double(c.worst_ratio_high) + "]");
  c.k = c.worst_ratio_low;
  c.kprime = c.worst_ratio_high;
  return c;
}

RegularityCertificate certify_regularity(const FreeTreeModel& m, std::size_t max_depth, std::size_t interior) {
  if (max_depth == 0) throw DomainError("certify_regularity: need depth >= 1");
  const auto& g = m.group();
  const double edge = to_double(m.edge_length());
  const double eta = m.critical_exponent();
  const long B = m.branching();

  // one exact (inf, sup) per radius class, shared by every centre; each
  // centre's balls are still computed and compared against it
  std::vector<std::optional<ExactScalar>> mass(max_depth);
  ExactScalar lo_ratio, hi_ratio;
  bool first = true;
  double worst_low = std::numeric_limits<double>::infinity(), worst_high = 0.0;
  std::size_t samples = 0;

  std::vector<double> mass_d(max_depth);
  std::vector<std::size_t> depth_of(max_depth);
  g.for_each_word(max_depth, [&](const ReducedWord& cell) {
    BoundaryWord b{cell.letters(), {}};
    for (std::size_t j = 0; j < max_depth; ++j) {
      const double r_hi = std::exp(-edge * static_cast<double>(j));
      const double r_lo = std::exp(-edge * static_cast<double>(j + 1));
      auto ball = m.ball_set(b, r_hi);
      auto near_lo = m.ball_set(b, r_lo * (1 + 1e-6));  // clear of the snapping tolerance
      if (!(ball == near_lo)) throw AssertionFailure("ball changes inside a radius class");
      if (!mass[j]) {
        ExactScalar nu = ball.measure();
        mass[j] = nu;
        mass_d[j] = nu.to_double();
        depth_of[j] = ball.depth();
        // nu / r^eta at r = e^{-j edge} is nu (2k-1)^j; the supremum as r
        // drops to e^{-(j+1) edge} is nu (2k-1)^{j+1}
        ExactScalar at_hi = nu * ExactScalar(pow_rational(Rational(B), static_cast<long>(j)));
        ExactScalar sup = at_hi * ExactScalar(B);
        if (first || at_hi < lo_ratio) lo_ratio = at_hi;
        if (first || sup > hi_ratio) hi_ratio = sup;
        first = false;
      } else if (ball.depth() != depth_of[j] || ball.indices().size() != 1) {
        // a single cylinder of the same depth has the same measure
        if (!(ball.measure() == *mass[j]))
          throw AssertionFailure("ball measure depends on the centre at depth " + std::to_string(j + 1));
      }
      for (std::size_t i = 1; i <= interior; ++i) {
        double r = r_hi * std::exp(-edge * static_cast<double>(i) / static_cast<double>(interior + 1));
        if (!(m.ball_set(b, r) == ball)) throw AssertionFailure("ball changes inside a radius class");
        double ratio = mass_d[j] / std::pow(r, eta);
        worst_low = std::min(worst_low, ratio);
        worst_high = std::max(worst_high, ratio);
        ++samples;
      }
      double ratio = mass_d[j] / std::pow(r_hi, eta);
      worst_low = std::min(worst_low, ratio);
      worst_high = std::max(worst_high, ratio);
      ++samples;
    }
  });

  RegularityCertificate c;
  c.eta = eta;
  c.k = lo_ratio.to_double();
  c.kprime = hi_ratio.to_double();
  c.k_exact = lo_ratio;
  c.kprime_exact = hi_ratio;
  c.samples = samples;
  c.worst_ratio_low = worst_low;
  c.worst_ratio_high = std::max(worst_high, c.kprime);
  c.description = "free group rank " + std::to_string(m.rank()) + ", all balls of cylinder depth <= " +
                  std::to_string(max_depth) + "; kprime is a supremum, approached as r decreases to e^{-(j+1)}";
  if (worst_low < c.k * (1 - 1e-12) || worst_high > c.kprime * (1 + 1e-12))
    throw AssertionFailure("interior radius outside the class bounds");
  return c;
}

double plane_ball_measure(const PlaneModel& m, const CirclePoint& b, double r) {
  return 2.0 * plane_half_width(m, b, r) / kTwoPi;
}

RegularityCertificate certify_regularity(const PlaneModel& m, std::size_t balls, std::uint64_t seed,
                                         double max_log_radius) {
  std::uint64_t state = seed;
  std::vector<std::pair<double, double>> samples;
  samples.reserve(balls);
  for (std::size_t i = 0; i < balls; ++i) {
    CirclePoint b(kTwoPi * unit_uniform(splitmix64(state)));
    double r = std::exp(-max_log_radius * unit_uniform(splitmix64(state)));
    samples.emplace_back(plane_ball_measure(m, b, r), r);
  }
  return certify_from_samples(m.critical_exponent(), samples,
                              preset_name(m.group().preset) + ", " + std::to_string(balls) +
                                  " random balls, radius e^{-u}, u in [0, " + format_double(max_log_radius, 6) + "]");
}

// ---------------------------------------------------------------------------

ShellBounds decreasing_integral_bounds(const FreeTreeModel& m, const std::function<double(double)>& f,
                                       const BoundaryWord& b, double s, double t, const RegularityCertificate& cert,
                                       std::size_t grid) {
  if (!(s > 0 && s < t && t <= 1.0)) throw DomainError("decreasing_integral_bounds: need 0 < s < t <= diam = 1");
  const double eta = m.critical_exponent();
  const double se = std::pow(s, eta), te = std::pow(t, eta);
  check_decreasing(f, se, te, grid);
  ShellBounds r;
  for (const auto& sh : match_shells(m, b, s))
    if (sh.sigma < t) r.actual += sh.mass * f(std::pow(sh.sigma, eta));
  r.integral_f = integrate_log(f, se, te);
  r.lower = cert.k * r.integral_f - (cert.kprime - cert.k) * f(se);
  r.upper = cert.kprime * r.integral_f + (cert.kprime - cert.k) * se * f(se);
  r.holds = within(r.lower, r.actual, r.upper, 1e-9);
  return r;
}

ShellBounds decreasing_integral_bounds(const PlaneModel& m, const std::function<double(double)>& f,
                                       const CirclePoint& b, double s, double t, const RegularityCertificate& cert,
                                       std::size_t grid) {
  if (!(s > 0 && s < t && t <= 1.0)) throw DomainError("decreasing_integral_bounds: need 0 < s < t <= diam = 1");
  const double eta = m.critical_exponent();
  const double se = std::pow(s, eta), te = std::pow(t, eta);
  check_decreasing(f, se, te, grid);
  const double ws = plane_half_width(m, b, s), wt = plane_half_width(m, b, t);
  auto integrand = [&](double w) {
    double sigma = visual_distance(m, b, CirclePoint(b.angle + w));
    return f(std::pow(sigma, eta));
  };
  ShellBounds r;
  r.actual = 2.0 * integrate(integrand, ws, wt) / kTwoPi;
  r.actual_error = 1e-9;
  r.integral_f = integrate_log(f, se, te);
  r.lower = cert.k * r.integral_f - (cert.kprime - cert.k) * f(se);
  r.upper = cert.kprime * r.integral_f + (cert.kprime - cert.k) * se * f(se);
  r.holds = within(r.lower, r.actual, r.upper, 1e-8);
  return r;
}

ShellBounds int_as_log(const FreeTreeModel& m, const BoundaryWord& b, double s, const RegularityCertificate& cert) {
  if (!(s > 0 && s < 1)) throw DomainError("int_as_log: need 0 < s < 1");
  const double eta = m.critical_exponent();
  ShellBounds r;
  for (const auto& sh : match_shells(m, b, s)) r.actual += sh.mass * std::pow(sh.sigma, -eta);
  r.integral_f = -std::log(s);
  r.lower = -cert.k * std::log(s) - (cert.kprime - cert.k);
  r.upper = -cert.kprime * std::log(s) + (cert.kprime - cert.k);
  r.holds = within(r.lower, r.actual, r.upper, 1e-9);
  return r;
}

ShellBounds int_as_log(const PlaneModel& m, const CirclePoint& b, double s, const RegularityCertificate& cert) {
  if (!(s > 0 && s < 1)) throw DomainError("int_as_log: need 0 < s < 1");
  const double eta = m.critical_exponent();
  const double ws = plane_half_width(m, b, s);
  auto integrand = [&](double w) { return std::pow(visual_distance(m, b, CirclePoint(b.angle + w)), -eta); };
  ShellBounds r;
  r.actual = 2.0 * integrate(integrand, ws, std::numbers::pi) / kTwoPi;
  r.actual_error = 1e-9;
  r.integral_f = -std::log(s);
  r.lower = -cert.k * std::log(s) - (cert.kprime - cert.k);
  r.upper = -cert.kprime * std::log(s) + (cert.kprime - cert.k);
  r.holds = within(r.lower, r.actual, r.upper, 1e-8);
  return r;
}

// ---------------------------------------------------------------------------

TreeSamplingSet build_sampling_set(const FreeTreeModel& m, double t) {
  const double R = m.quotient_radius(), delta = m.delta();
  if (!(t > R + 2 * delta)) throw DomainError("build_sampling_set: need t > R + 2 delta");
  const auto& g = m.group();
  TreeSamplingSet S;
  S.t = t;
  S.elements = m.enumerate_annulus(t);
  for (const auto& w : S.elements) S.directions.push_back(m.direction(w));
  S.radius = std::exp(-t + R + 2 * delta);
  const double edge = to_double(m.edge_length());
  for (std::size_t n = 0; static_cast<double>(n) * edge < 3 * R + 4 * delta; ++n) S.multiplicity_bound += g.sphere_size(n);

  // every ball of radius r is a cylinder of one fixed depth
  BoundaryWord probe{{}, {0}};
  const std::size_t depth = m.ball_set(probe, S.radius).depth();
  std::map<std::uint64_t, std::size_t> hist;
  for (const auto& d : S.directions) {
    auto head = d.head(depth);
    ++hist[depth ? g.cylinder_index(head.data(), depth) : 0];
  }
  for (const auto& [cell, count] : hist) S.observed_multiplicity = std::max(S.observed_multiplicity, count);
  S.covers = hist.size() == g.sphere_size(depth);
  return S;
}

PlaneSamplingSet build_sampling_set(const PlaneModel& m, const OrbitCache& cache, double t) {
  const double R = m.quotient_radius(), delta = m.delta();
  if (!(t > R + 2 * delta)) throw DomainError("build_sampling_set: need t > R + 2 delta");
  const double inner = 3 * R + 4 * delta;
  if (inner > cache.radius()) throw CacheExhausted("build_sampling_set: cache radius below 3R + 4 delta");
  PlaneSamplingSet S;
  S.t = t;
  S.elements = cache.annulus(t, R);
  for (auto i : S.elements) S.directions.push_back(hyperboloid_direction(cache.image(i)));
  S.radius = std::exp(-t + R + 2 * delta);
  S.multiplicity_bound = cache.window(-1.0, inner).size();

  std::vector<double> a;
  for (const auto& d : S.directions) a.push_back(d.angle);
  std::sort(a.begin(), a.end());
  const double w = plane_half_width(m, CirclePoint(0.0), S.radius);
  if (!a.empty()) {
    for (std::size_t i = 0; i + 1 < a.size(); ++i) S.largest_gap = std::max(S.largest_gap, a[i + 1] - a[i]);
    S.largest_gap = std::max(S.largest_gap, a.front() + kTwoPi - a.back());
    // an open arc of length 2w holds the most points when it starts at one
    const std::size_t n = a.size();
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (j < i) j = i;
      auto unwrap = [&](std::size_t k) { return k < n ? a[k] : a[k - n] + kTwoPi; };
      while (j + 1 < i + n && unwrap(j + 1) < a[i] + 2 * w) ++j;
      S.observed_multiplicity = std::max(S.observed_multiplicity, j - i + 1);
    }
  }
  S.covers = !a.empty() && S.largest_gap < 2 * w;
  return S;
}

double sampling_constant(std::size_t multiplicity, double L, const RegularityCertificate& cert) {
  return static_cast<double>(multiplicity) * (L * std::exp(L) + 1.0) * cert.kprime / cert.k;
}

double esstimation_L(double eta, double R, double delta) { return eta * (2 * R + 3 * delta); }

SamplingCheck sampled_lambda_integral(const FreeTreeModel& m, const TreeSamplingSet& S, const ReducedWord& q,
                                      double L, const RegularityCertificate& cert) {
  if (S.elements.empty()) throw DomainError("sampled_lambda_integral: empty sampling set");
  const auto& g = m.group();
  const TreePoint qp = TreePoint::at(q);
  SamplingCheck c;
  c.L = L;

  // audit: pairs at visual distance <= r share at least M letters; the
  // largest change of log lambda^q is between a point following q and one
  // leaving it right after those M letters
  const double edge = to_double(m.edge_length());
  const double x = -std::log(S.radius) / edge;
  const auto M = static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-12)));
  if (!q.empty()) {
    BoundaryWord along = m.direction(q);
    auto head = along.head(M);
    Letter next = *along.letter(M);
    Letter dev = 0;
    while (dev == next || (M > 0 && dev == inverse_letter(head.back()))) ++dev;
    BoundaryWord away{head, {dev}};
    double va = std::log(lambda_eval(m, qp, along).to_double());
    double vb = std::log(lambda_eval(m, qp, away).to_double());
    c.audit_variation = std::abs(va - vb);
    if (c.audit_variation > L + 1e-12)
      throw DomainError("almost-continuity fails for lambda^" + g.to_string(q) + ": |log f(" + g.to_string(along) +
                        ") - log f(" + g.to_string(away) + ")| = " + format_double(c.audit_variation) + " > L = " +
                        format_double(L));
  }

  std::map<std::size_t, std::uint64_t> hist;
  for (const auto& d : S.directions) ++hist[m.match_length(q, d)];
  ExactScalar sum(0);
  for (const auto& [j, count] : hist) {
    Rational beta = Rational(static_cast<long>(q.size()) - 2 * static_cast<long>(j)) * m.edge_length();
    sum += ExactScalar(static_cast<long>(count)) * m.exp_half_eta(beta);
  }
  c.estimate_exact = sum / ExactScalar(static_cast<long>(S.elements.size()));
  c.integral_exact = lambda_l1(m, q);
  c.estimate = c.estimate_exact.to_double();
  c.integral = c.integral_exact.to_double();
  c.C_L = sampling_constant(S.multiplicity_bound, L, cert);
  c.holds = c.estimate <= c.C_L * c.integral * (1 + 1e-12) && c.integral <= c.C_L * c.estimate * (1 + 1e-12);
  return c;
}

PlaneSamplingCheck sampled_integral(const PlaneModel& m, const PlaneSamplingSet& S,
                                    const std::function<double(const CirclePoint&)>& f, double L,
                                    const RegularityCertificate& cert, std::size_t audit_pairs, std::uint64_t seed,
                                    const std::vector<double>& breakpoints) {
  if (S.directions.empty()) throw DomainError("sampled_integral: empty sampling set");
  PlaneSamplingCheck c;
  c.L = L;
  const double w = plane_half_width(m, CirclePoint(0.0), S.radius);
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < audit_pairs; ++i) {
    CirclePoint x(kTwoPi * unit_uniform(splitmix64(state)));
    CirclePoint y(x.angle + w * (2.0 * unit_uniform(splitmix64(state)) - 1.0));
    double fx = f(x), fy = f(y);
    if (!(fx > 0 && fy > 0)) throw DomainError("sampled_integral: f must be positive");
    double v = std::abs(std::log(fx) - std::log(fy));
    if (v > c.audit_variation) c.audit_variation = v;
    if (v > L)
      throw DomainError("almost-continuity fails: |log f(" + format_double(x.angle) + ") - log f(" +
                        format_double(y.angle) + ")| = " + format_double(v) + " > L = " + format_double(L));
  }
  std::vector<double> vals;
  vals.reserve(S.directions.size());
  for (const auto& d : S.directions) vals.push_back(f(d));
  c.estimate = pairwise_sum(vals) / static_cast<double>(vals.size());
  std::vector<double> bp = breakpoints;
  c.integral = quadrature_boundary_integral(f, bp);
  c.C_L = sampling_constant(S.multiplicity_bound, L, cert);
  c.holds = c.estimate <= c.C_L * c.integral * (1 + 1e-9) && c.integral <= c.C_L * c.estimate * (1 + 1e-9);
  return c;
}

}  // namespace hypbdry
