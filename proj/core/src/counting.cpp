#include "hypbdry/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "enumerate.hpp"
#include "hypbdry/parallel.hpp"

namespace hypbdry {

namespace {

// Head of z_p^{w}: w continued by its last letter.
void direction_head(const std::vector<Letter>& w, std::size_t depth, std::vector<Letter>& out) {
  out.resize(depth);
  for (std::size_t i = 0; i < depth; ++i) out[i] = i < w.size() ? w[i] : w.back();
}

}  // namespace

std::uint64_t equidistribution_oracle(const FreeTreeModel& m, const CylinderSet& U, const CylinderSet& Uprime,
                                      std::size_t n) {
  const auto& g = m.group();
  if (n < std::max(U.depth(), Uprime.depth()))
    throw DomainError("equidistribution_oracle: words shorter than the cylinders");
  std::uint64_t total = 0;
  // z^{gamma^-1} in C(u) iff gamma ends with u^-1; z^{gamma} in C(v) iff gamma starts with v
  for (const auto& u : U.prefixes())
    for (const auto& v : Uprime.prefixes()) total += transfer_matrix_count(g, v, u.inverse(), n);
  return total;
}

EquidistributionRow equidistribution(const FreeTreeModel& m, const CylinderSet& U, const CylinderSet& Uprime,
                                     double t, int threads) {
  const auto& g = m.group();
  const auto lengths = m.annulus_lengths(t);
  EquidistributionRow row;
  row.t = t;
  std::optional<std::uint64_t> oracle = 0;
  for (auto n : lengths) {
    if (n == 0) throw DomainError("equidistribution: annulus contains the identity");
    const std::uint64_t words = g.sphere_size(n);
    row.s_t_size += words;
    std::vector<std::uint64_t> part(64, 0);
    parallel_chunks(words, part.size(), threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      std::vector<Letter> inv, head_fwd, head_inv;
      detail::for_words_in_range(g, n, lo, hi, [&](const std::vector<Letter>& w) {
        direction_head(w, Uprime.depth(), head_fwd);
        if (!Uprime.contains_prefix(head_fwd.data(), head_fwd.size())) return;
        inv.assign(w.rbegin(), w.rend());
        for (auto& l : inv) l = inverse_letter(l);
        direction_head(inv, U.depth(), head_inv);
        if (U.contains_prefix(head_inv.data(), head_inv.size())) ++part[c];
      });
    });
    row.count += std::accumulate(part.begin(), part.end(), std::uint64_t{0});
    if (oracle && n >= std::max(U.depth(), Uprime.depth()))
      *oracle += equidistribution_oracle(m, U, Uprime, n);
    else
      oracle.reset();
  }
  if (row.s_t_size == 0) throw DomainError("equidistribution: empty annulus");
  row.freq_exact = Rational(static_cast<long>(row.count)) / Rational(static_cast<long>(row.s_t_size));
  row.freq = to_double(*row.freq_exact);
  row.target = (U.measure() * Uprime.measure()).to_double();
  row.abs_error = std::abs(to_double(*row.freq_exact - (U.measure() * Uprime.measure()).rational_part()));
  row.oracle = oracle;
  return row;
}

EquidistributionRow equidistribution(const PlaneModel& m, const OrbitCache& cache, const ArcSet& U,
                                     const ArcSet& Uprime, double t) {
  auto S = cache.annulus(t, m.quotient_radius());
  EquidistributionRow row;
  row.t = t;
  row.s_t_size = S.size();
  if (S.empty()) throw DomainError("equidistribution: empty annulus");
  for (auto i : S) {
    if (U.contains(hyperboloid_direction(cache.inverse_image(i))) &&
        Uprime.contains(hyperboloid_direction(cache.image(i))))
      ++row.count;
  }
  row.freq = static_cast<double>(row.count) / static_cast<double>(row.s_t_size);
  row.target = U.measure() * Uprime.measure();
  row.abs_error = std::abs(row.freq - row.target);
  return row;
}

GrowthFit fit_growth(const std::vector<double>& radii, const std::vector<double>& counts) {
  if (radii.size() != counts.size()) throw DomainError("fit_growth: size mismatch");
  if (radii.size() < 3) throw DomainError("fit_growth: need at least three radii");
  const auto n = static_cast<double>(radii.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(counts[i] > 0)) throw DomainError("fit_growth: zero count at t = " + format_double(radii[i], 6));
    double y = std::log(counts[i]);
    sx += radii[i];
    sy += y;
    sxx += radii[i] * radii[i];
    sxy += radii[i] * y;
  }
  double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0)) throw DomainError("fit_growth: radii must not all coincide");
  GrowthFit f;
  f.eta_hat = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.eta_hat * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double r = std::log(counts[i]) - f.intercept - f.eta_hat * radii[i];
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.radii = radii;
  f.counts = counts;
  return f;
}

GrowthFit growth_exponent(const FreeTreeModel& m, const std::vector<double>& radii) {
  const auto& g = m.group();
  const double edge = to_double(m.edge_length());
  std::vector<double> counts;
  std::vector<std::uint64_t> sphere;  // counted, not taken from the closed form
  for (double t : radii) {
    auto nmax = static_cast<std::size_t>(std::floor(t / edge + 1e-12));
    while (sphere.size() <= nmax) {
      std::size_t n = sphere.size();
      std::uint64_t c = 0;
      if (n == 0) {
        c = 1;
      } else {
        for (int l = 0; l < g.num_letters(); ++l)
          for (int r = 0; r < g.num_letters(); ++r)
            c += transfer_matrix_count(g, static_cast<Letter>(l), static_cast<Letter>(r), n);
      }
      sphere.push_back(c);
    }
    counts.push_back(static_cast<double>(std::accumulate(sphere.begin(), sphere.begin() + static_cast<long>(nmax) + 1,
                                                         std::uint64_t{0})));
  }
  return fit_growth(radii, counts);
}

GrowthFit growth_exponent(const OrbitCache& cache, const std::vector<double>& radii) {
  std::vector<double> counts;
  for (double t : radii) {
    if (t > cache.radius()) throw CacheExhausted("growth_exponent: t beyond the orbit cache");
    counts.push_back(static_cast<double>(cache.count_within(t)));
  }
  return fit_growth(radii, counts);
}

MargulisFit margulis_fit(const PlaneModel& m, const OrbitCache& cache, const ArcSet& U, const ArcSet& Uprime,
                         double a, const std::vector<double>& t_list) {
  if (!(a > 0)) throw DomainError("margulis_fit: a must be positive");
  const double mass = U.measure() * Uprime.measure();
  if (!(mass > 0)) throw DomainError("margulis_fit: U and U' must have positive measure");
  if (t_list.empty()) throw DomainError("margulis_fit: empty t list");
  MargulisFit fit;
  for (double t : t_list) {
    if (t + a > cache.radius()) throw CacheExhausted("margulis_fit: t + a beyond the orbit cache");
    std::uint64_t count = 0;
    for (auto i : cache.window(t - a, t + a))
      if (U.contains(hyperboloid_direction(cache.inverse_image(i))) &&
          Uprime.contains(hyperboloid_direction(cache.image(i))))
        ++count;
    fit.t.push_back(t);
    fit.counts.push_back(count);
    fit.normalized.push_back(std::exp(-m.critical_exponent() * t) * static_cast<double>(count) / mass);
  }
  fit.C_hat = pairwise_sum(fit.normalized) / static_cast<double>(fit.normalized.size());
  for (double v : fit.normalized) fit.residuals.push_back(v - fit.C_hat);
  return fit;
}

}  // namespace hypbdry
