#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hypbdry/counting.hpp"
#include "hypbdry/io.hpp"
#include "hypbdry/measure.hpp"
#include "hypbdry/parallel.hpp"
#include "hypbdry/rep.hpp"
#include "hypbdry/spectra.hpp"
#include "selftest.hpp"

namespace hypbdry::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot read " + what + " from '" + s + "'");
  }
}

Rational parse_rational(const std::string& s, const std::string& what) {
  try {
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      // terminating decimal, read exactly
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      if (s.find('/') != std::string::npos || digits.empty() || digits.find('.') != std::string::npos)
        throw std::invalid_argument(s);
      Rational q(mpz_class(digits), mpz_class("1" + std::string(s.size() - dot - 1, '0')));
      q.canonicalize();
      return q;
    }
    Rational q(s);
    q.canonicalize();
    return q;
  } catch (const std::exception&) {
    throw ConfigError("cannot read " + what + " from '" + s + "'");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing

ModelSpec ModelSpec::parse(const std::string& text) {
  ModelSpec s;
  auto colon = text.find(':');
  std::string family = text.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (family == "free") {
    s.kind = Kind::Free;
    if (!rest.empty()) {
      for (const auto& kv : split(rest, ',')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("model: expected key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "rank") {
          double r = parse_number(val, "rank");
          if (r < 1 || r > 26 || r != std::floor(r)) throw ConfigError("model: rank must be an integer in 1..26");
          s.rank = static_cast<int>(r);
        } else if (key == "edge") {
          s.edge = parse_rational(val, "edge");
          if (s.edge <= 0) throw ConfigError("model: edge must be positive");
        } else {
          throw ConfigError("model: unknown key '" + key + "'");
        }
      }
    }
    if (s.rank < 2) throw ConfigError("model: the free-group model needs rank >= 2");
  } else if (family == "plane") {
    s.kind = Kind::Plane;
    try {
      s.preset = parse_preset(rest);
    } catch (const std::exception&) {
      throw ConfigError("model: unknown plane group '" + rest + "' (genus2 or triangle237)");
    }
  } else {
    throw ConfigError("model: unknown family '" + family + "' (free or plane)");
  }
  return s;
}

std::string ModelSpec::canonical() const {
  if (kind == Kind::Plane) return "plane:" + preset_name(preset);
  return "free:rank=" + std::to_string(rank) + ",edge=" + rational_string(edge);
}

std::vector<double> parse_t_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw ConfigError("--t: empty entry");
    auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number(part, "--t"));
      continue;
    }
    std::string hi_text = part.substr(dots + 2);
    double step = 1.0;
    if (auto c = hi_text.find(':'); c != std::string::npos) {
      step = parse_number(hi_text.substr(c + 1), "--t step");
      hi_text = hi_text.substr(0, c);
    }
    double lo = parse_number(part.substr(0, dots), "--t");
    double hi = parse_number(hi_text, "--t");
    if (!(step > 0)) throw ConfigError("--t: step must be positive");
    if (hi < lo) throw ConfigError("--t: empty range '" + part + "'");
    // integer multiples of the step avoid accumulated rounding
    auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  }
  for (double t : out)
    if (!(t > 0)) throw ConfigError("--t: values must be positive");
  return out;
}

CylinderSet parse_tree_set(const FreeGroup& g, const std::string& text) {
  std::string body = text;
  bool complement = !body.empty() && body[0] == '!';
  if (complement) body = body.substr(1);
  CylinderSet s;
  if (body == "all" || body == "*") {
    s = CylinderSet::whole(g);
  } else if (body == "none") {
    s = CylinderSet::empty(g);
  } else {
    std::vector<ReducedWord> prefixes;
    for (const auto& p : split(body, ',')) {
      if (p.empty()) throw ConfigError("set: empty prefix in '" + text + "'");
      try {
        prefixes.push_back(g.parse(p));
      } catch (const std::exception& e) {
        throw ConfigError("set: " + std::string(e.what()));
      }
    }
    s = CylinderSet::from_prefixes(g, prefixes);
  }
  return complement ? s.complement() : s;
}

ArcSet parse_arc_set(const std::string& text) {
  std::string body = text;
  bool complement = !body.empty() && body[0] == '!';
  if (complement) body = body.substr(1);
  ArcSet s;
  if (body == "all" || body == "*") {
    s = ArcSet::whole();
  } else if (body != "none") {
    for (const auto& p : split(body, ',')) {
      auto dots = p.find("..");
      if (dots == std::string::npos) throw ConfigError("set: expected an interval a..b in turns, got '" + p + "'");
      double lo = parse_number(p.substr(0, dots), "arc start");
      double hi = parse_number(p.substr(dots + 2), "arc end");
      s = s.unite(ArcSet::from_turns(lo, hi));
    }
  }
  return complement ? s.complement() : s;
}

std::vector<std::size_t> parse_plane_word(const PlaneGroup& g, const std::string& text) {
  std::vector<std::size_t> out;
  if (text == "e") return out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == ' ' || text[pos] == '.') {
      ++pos;
      continue;
    }
    std::size_t best = g.generator_names.size(), best_len = 0;
    for (std::size_t i = 0; i < g.generator_names.size(); ++i) {
      const auto& n = g.generator_names[i];
      if (n.size() > best_len && text.compare(pos, n.size(), n) == 0) {
        best = i;
        best_len = n.size();
      }
    }
    if (best_len == 0) throw ConfigError("word: no generator name at '" + text.substr(pos) + "'");
    out.push_back(best);
    pos += best_len;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct Flags {
  std::string model = "free:rank=2,edge=1";
  std::string t, U, V, W, gamma, scale, out;
  std::string format = "csv";
  std::optional<double> t_max;
  std::optional<int> depth;
  std::uint64_t seed = 1;
  int threads = 0;
  bool timing = false;
};

struct Outcome {
  Table table;
  RunConfig config;
  std::vector<std::string> failures;  // witnesses of failed in-experiment assertions
};

class Runner {
 public:
  Runner(const std::string& command, const Flags& f) : command_(command), f_(f), spec_(ModelSpec::parse(f.model)) {
    if (f.threads < 0) throw ConfigError("--threads must be nonnegative");
    if (f.depth && *f.depth <= 0) throw ConfigError("--depth must be positive");
    if (f.t_max && !(*f.t_max > 0)) throw ConfigError("--t-max must be positive");
    if (f.format != "csv" && f.format != "json") throw ConfigError("--format must be csv or json");
    config_.emplace_back("command", command);
    config_.emplace_back("model", spec_.canonical());
    config_.emplace_back("seed", std::to_string(f.seed));
  }

  Outcome run();

 private:
  bool tree() const { return spec_.kind == ModelSpec::Kind::Free; }
  FreeTreeModel tree_model() const { return FreeTreeModel(spec_.rank, spec_.edge); }
  void echo(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }
  void require_tree() const {
    if (!tree()) throw ConfigError(command_ + " runs on the free-group model only");
  }
  void require_plane() const {
    if (tree()) throw ConfigError(command_ + " runs on a plane model only");
  }

  std::vector<double> t_list(const std::string& fallback) {
    std::string text = f_.t.empty() ? fallback : f_.t;
    echo("t", text);
    return parse_t_list(text);
  }
  std::vector<std::size_t> integer_lengths(const std::vector<double>& ts) const {
    std::vector<std::size_t> out;
    for (double t : ts) {
      if (t != std::floor(t)) throw ConfigError("--t: " + command_ + " needs integer values");
      out.push_back(static_cast<std::size_t>(t));
    }
    return out;
  }
  std::string set_flag(const std::string& name, const std::string& value, const std::string& fallback) {
    std::string v = value.empty() ? fallback : value;
    echo(name, v);
    return v;
  }
  std::vector<std::string> gamma_list(const std::string& fallback) {
    std::string v = f_.gamma.empty() ? fallback : f_.gamma;
    if (v.empty()) throw ConfigError(command_ + " needs --gamma");
    echo("gamma", v);
    return split(v, ',');
  }
  double wall(double ms) const { return f_.timing ? ms : 0.0; }

  const OrbitCache& cache(double needed) {
    double t_max = f_.t_max.value_or(std::max(12.5, std::ceil(2.0 * needed) / 2.0));
    echo("t_max", format_double(t_max));
    if (t_max < needed)
      throw ConfigError("--t-max " + format_double(t_max) + " is below the radius " + format_double(needed) +
                        " this run needs");
    PlaneGroup g = build_group(spec_.preset);
    cache_.emplace(OrbitCache::obtain(g, OrbitCacheParams{spec_.preset, t_max, 0.0, f_.threads},
                                      OrbitCache::default_dir()));
    return *cache_;
  }

  Outcome coeff();
  Outcome norms();
  Outcome bounded();
  Outcome tt_converge();
  Outcome equidist();
  Outcome regularity();
  Outcome sampling();
  Outcome tailbound();
  Outcome rank();
  Outcome mls();
  Outcome rescale_check();
  Outcome growth();
  Outcome margulis_fit();

  Outcome finish(Table t, std::vector<std::string> failures = {}) {
    return Outcome{std::move(t), config_, std::move(failures)};
  }

  std::string command_;
  Flags f_;
  ModelSpec spec_;
  RunConfig config_;
  std::optional<OrbitCache> cache_;
};

Outcome Runner::run() {
  static const std::map<std::string, Outcome (Runner::*)()> table{
      {"coeff", &Runner::coeff},
      {"norms", &Runner::norms},
      {"bounded", &Runner::bounded},
      {"tt-converge", &Runner::tt_converge},
      {"equidist", &Runner::equidist},
      {"regularity", &Runner::regularity},
      {"sampling", &Runner::sampling},
      {"tailbound", &Runner::tailbound},
      {"rank", &Runner::rank},
      {"mls", &Runner::mls},
      {"rescale-check", &Runner::rescale_check},
      {"growth", &Runner::growth},
      {"margulis-fit", &Runner::margulis_fit},
  };
  auto it = table.find(command_);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + command_ + "'");
  return (this->*(it->second))();
}

Outcome Runner::coeff() {
  Table t{{"gamma", "value", "cauchy_schwarz_bound", "cross_check"}, {}};
  std::vector<std::string> failures;
  auto words = gamma_list("");
  if (tree()) {
    FreeTreeModel m = tree_model();
    const auto& g = m.group();
    CylinderSet U = parse_tree_set(g, set_flag("U", f_.U, "all"));
    CylinderSet V = parse_tree_set(g, set_flag("V", f_.V, "all"));
    auto gf = SimpleFunction::indicator(g, U), hf = SimpleFunction::indicator(g, V);
    for (const auto& w : words) {
      ReducedWord gamma = g.parse(w);
      ExactScalar v = matrix_coefficient(m, gamma, gf, hf);
      std::string check = "skipped";
      if (gamma.size() + std::max(U.depth(), V.depth()) <= 12) {
        bool same = matrix_coefficient_direct(m, gamma, gf, hf) == v;
        check = same ? "equal" : "DIFFERENT";
        if (!same) failures.push_back("gamma = " + w + ": streaming and direct coefficients differ");
      }
      // |<rho(g) chi_U, chi_V>| <= sqrt(nu(U) nu(V))
      ExactScalar bound2 = U.measure() * V.measure();
      if (v * v > bound2) failures.push_back("gamma = " + w + ": coefficient exceeds the Cauchy-Schwarz bound");
      t.add({cell(g.to_string(gamma)), cell(v), cell(std::sqrt(bound2.to_double())), cell(check)});
    }
  } else {
    PlaneModel m(spec_.preset);
    ArcSet U = parse_arc_set(set_flag("U", f_.U, "all"));
    ArcSet V = parse_arc_set(set_flag("V", f_.V, "all"));
    PlaneFunction gf = [U](const CirclePoint& b) { return U.contains(b) ? 1.0 : 0.0; };
    PlaneFunction hf = [V](const CirclePoint& b) { return V.contains(b) ? 1.0 : 0.0; };
    for (const auto& w : words) {
      MobiusIsometry gamma = evaluate_word(m.group(), parse_plane_word(m.group(), w));
      std::vector<double> bps = V.breakpoints();
      for (double a : U.breakpoints()) bps.push_back(gamma.apply(CirclePoint(a)).angle);
      double v = matrix_coefficient(gamma, gf, hf, bps);
      double bound = std::sqrt(U.measure() * V.measure());
      if (std::abs(v) > bound + 1e-9) failures.push_back("gamma = " + w + ": coefficient exceeds the Cauchy-Schwarz bound");
      t.add({cell(w), cell(v), cell(bound), cell("quadrature")});
    }
  }
  return finish(std::move(t), failures);
}

Outcome Runner::norms() {
  Table t{{"length", "l1_norm", "ratio", "in_window"}, {}};
  std::vector<std::string> failures;
  auto ts = t_list("1..20");
  if (tree()) {
    FreeTreeModel m = tree_model();
    const auto& g = m.group();
    // the [0.45, 1.6] window is a statement about F_2 with unit edges
    bool windowed = spec_.rank == 2 && spec_.edge == 1;
    for (auto n : integer_lengths(ts)) {
      if (n == 0) throw ConfigError("--t: lengths start at 1");
      ExactScalar l1 = lambda_l1(m, n);
      ExactScalar ratio = l1 * ExactScalar::half_power(m.branching(), static_cast<long>(n)) /
                          ExactScalar(Rational(static_cast<long>(n)) * m.edge_length());
      bool in = ratio >= ExactScalar(Rational(45, 100)) && ratio <= ExactScalar(Rational(16, 10));
      if (windowed && !in) failures.push_back("|q| = " + std::to_string(n) + ": ratio " + ratio.to_decimal(17));
      (void)g;
      t.add({cell(static_cast<std::uint64_t>(n)), cell(l1), cell(ratio), windowed ? cell_bool(in) : cell("n/a")});
    }
  } else {
    for (double n : ts) {
      double l1 = plane_lambda_l1(n);
      std::array<double, 3> X{std::cosh(n), std::sinh(n), 0.0};
      double quad = quadrature_boundary_integral([&](const CirclePoint& b) { return plane_lambda(X, b); }, {0.0});
      if (std::abs(quad - l1) > 1e-8 * l1)
        failures.push_back("|q| = " + format_double(n) + ": closed form " + format_double(l1) + " vs quadrature " +
                           format_double(quad));
      t.add({cell(n), cell(l1), cell(l1 / (n * std::exp(-n / 2))), cell("n/a")});
    }
  }
  return finish(std::move(t), failures);
}

Outcome Runner::bounded() {
  std::vector<std::string> failures;
  if (tree()) {
    Table t{{"t", "sup", "inf", "classes"}, {}};
    FreeTreeModel m = tree_model();
    for (double x : t_list("1..12")) {
      auto s = sup_norm_Tt1(m, x);
      if (s.sup > ExactScalar(Rational(1) + Rational(1, 1000000000000L)))
        failures.push_back("t = " + format_double(x) + ": sup " + s.sup.to_exact_string() + " exceeds 1");
      t.add({cell(x), cell(s.sup), cell(s.inf), cell(static_cast<std::uint64_t>(s.classes))});
    }
    return finish(std::move(t), failures);
  }
  Table t{{"t", "s_t_size", "samples", "sup", "inf"}, {}};
  PlaneModel m(spec_.preset);
  auto ts = t_list("6..10");
  int samples = f_.depth.value_or(1024);
  echo("samples", std::to_string(samples));
  const auto& c = cache(*std::max_element(ts.begin(), ts.end()) + m.quotient_radius());
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (double x : ts) {
    auto s = sup_norm_Tt1(m, c, x, static_cast<std::size_t>(samples), f_.threads);
    lo = std::min(lo, s.sup);
    hi = std::max(hi, s.sup);
    t.add({cell(x), cell(static_cast<std::uint64_t>(s.s_t_size)), cell(static_cast<std::uint64_t>(s.samples)),
           cell(s.sup), cell(s.inf)});
  }
  if (ts.size() > 1 && !(hi / lo < 3.0))
    failures.push_back("sampled sup norms spread by " + format_double(hi / lo) + " >= 3");
  return finish(std::move(t), failures);
}

Outcome Runner::tt_converge() {
  require_tree();
  FreeTreeModel m = tree_model();
  const auto& g = m.group();
  std::string u = set_flag("U", f_.U, "a");
  CylinderSet U = parse_tree_set(g, u);
  CylinderSet V = parse_tree_set(g, set_flag("V", f_.V, "b"));
  CylinderSet W = parse_tree_set(g, set_flag("W", f_.W, u));
  auto ts = t_list("2..12");
  std::size_t max_len = static_cast<std::size_t>(f_.depth.value_or(16));
  echo("depth", std::to_string(max_len));
  auto rows = convergence_experiment(m, U, V, W, ts, f_.threads, max_len);
  Table t{{"t", "s_t_size", "value", "target", "abs_error", "wall_ms"}, {}};
  for (const auto& r : rows)
    t.add({cell(r.t), cell(r.s_t_size), cell(r.value), cell(r.target), cell(r.abs_error), cell(wall(r.wall_ms))});
  return finish(std::move(t));
}

Outcome Runner::equidist() {
  std::vector<std::string> failures;
  Table t{{"t", "s_t_size", "count", "freq", "target", "abs_error", "oracle"}, {}};
  auto ts = t_list("1..12");
  if (tree()) {
    FreeTreeModel m = tree_model();
    CylinderSet U = parse_tree_set(m.group(), set_flag("U", f_.U, "a"));
    CylinderSet V = parse_tree_set(m.group(), set_flag("V", f_.V, "b"));
    for (double x : ts) {
      auto r = equidistribution(m, U, V, x, f_.threads);
      if (r.oracle && *r.oracle != r.count)
        failures.push_back("t = " + format_double(x) + ": enumerated " + std::to_string(r.count) +
                           ", transfer matrix " + std::to_string(*r.oracle));
      t.add({cell(x), cell(r.s_t_size), cell(r.count), r.freq_exact ? cell(*r.freq_exact) : cell(r.freq),
             cell(r.target), cell(r.abs_error), r.oracle ? cell(*r.oracle) : cell("n/a")});
    }
  } else {
    PlaneModel m(spec_.preset);
    ArcSet U = parse_arc_set(set_flag("U", f_.U, "0..0.5"));
    ArcSet V = parse_arc_set(set_flag("V", f_.V, "0.25..0.75"));
    const auto& c = cache(*std::max_element(ts.begin(), ts.end()) + m.quotient_radius());
    for (double x : ts) {
      auto r = equidistribution(m, c, U, V, x);
      t.add({cell(x), cell(r.s_t_size), cell(r.count), cell(r.freq), cell(r.target), cell(r.abs_error), cell("n/a")});
    }
  }
  return finish(std::move(t), failures);
}

Outcome Runner::regularity() {
  Table t{{"eta", "k", "kprime", "samples", "worst_ratio_low", "worst_ratio_high", "description"}, {}};
  RegularityCertificate cert;
  if (tree()) {
    int depth = f_.depth.value_or(10);
    echo("depth", std::to_string(depth));
    cert = certify_regularity(tree_model(), static_cast<std::size_t>(depth));
  } else {
    int balls = f_.depth.value_or(2000);
    echo("balls", std::to_string(balls));
    cert = certify_regularity(PlaneModel(spec_.preset), static_cast<std::size_t>(balls), f_.seed);
  }
  t.add({cell(cert.eta), cert.k_exact ? cell(*cert.k_exact) : cell(cert.k),
         cert.kprime_exact ? cell(*cert.kprime_exact) : cell(cert.kprime), cell(static_cast<std::uint64_t>(cert.samples)),
         cell(cert.worst_ratio_low), cell(cert.worst_ratio_high), cell(cert.description)});
  return finish(std::move(t));
}

Outcome Runner::sampling() {
  std::vector<std::string> failures;
  Table t{{"t", "q", "estimate", "integral", "C_L", "holds"}, {}};
  auto ts = t_list("1..8");
  std::uint64_t state = f_.seed;
  if (tree()) {
    FreeTreeModel m = tree_model();
    const auto& g = m.group();
    int depth = f_.depth.value_or(10);
    echo("depth", std::to_string(depth));
    auto cert = certify_regularity(m, static_cast<std::size_t>(depth));
    double L = esstimation_L(m.critical_exponent(), m.quotient_radius(), m.delta());
    std::vector<ReducedWord> given;
    if (!f_.gamma.empty())
      for (const auto& w : gamma_list("")) given.push_back(g.parse(w));
    for (auto n : integer_lengths(ts)) {
      auto S = build_sampling_set(m, static_cast<double>(n));
      if (!S.covers || S.observed_multiplicity > S.multiplicity_bound)
        failures.push_back("t = " + std::to_string(n) + ": sampling set does not cover or exceeds its multiplicity");
      std::vector<ReducedWord> qs;
      if (!given.empty()) {
        for (const auto& q : given)
          if (q.size() <= n) qs.push_back(q);
      } else {
        for (std::size_t len = 0; len <= n; ++len) {
          if (len <= 2) {
            auto all = g.words_of_length(len);
            qs.insert(qs.end(), all.begin(), all.end());
          } else {
            for (int k = 0; k < 4; ++k) qs.push_back(g.random_word(len, state));
          }
        }
      }
      for (const auto& q : qs) {
        auto c = sampled_lambda_integral(m, S, q, L, cert);
        if (!c.holds) failures.push_back("t = " + std::to_string(n) + ", q = " + g.to_string(q));
        t.add({cell(static_cast<std::uint64_t>(n)), cell(g.to_string(q)), cell(c.estimate_exact),
               cell(c.integral_exact), cell(c.C_L), cell_bool(c.holds)});
      }
    }
  } else {
    PlaneModel m(spec_.preset);
    double tmax = *std::max_element(ts.begin(), ts.end());
    const double R = m.quotient_radius();
    const auto& c = cache(std::max(tmax + R, 3 * R + 4 * m.delta()));
    auto cert = certify_regularity(m, 2000, f_.seed);
    double L = esstimation_L(m.critical_exponent(), R, m.delta());
    for (double x : ts) {
      auto S = build_sampling_set(m, c, x);
      if (!S.covers) failures.push_back("t = " + format_double(x) + ": sampling set leaves a gap");
      auto within = c.window(-1.0, x);
      for (int k = 0; k < 6 && !within.empty(); ++k) {
        std::size_t i = within[(within.size() - 1) * static_cast<std::size_t>(k) / 5];
        auto X = c.image(i);
        auto f = [X](const CirclePoint& b) { return plane_lambda(X, b); };
        auto chk = sampled_integral(m, S, f, L, cert, 256, f_.seed + static_cast<std::uint64_t>(k),
                                    {hyperboloid_direction(X).angle});
        if (!chk.holds) failures.push_back("t = " + format_double(x) + ", q = " + c.word(i));
        t.add({cell(x), cell(c.word(i)), cell(chk.estimate), cell(chk.integral), cell(chk.C_L), cell_bool(chk.holds)});
      }
    }
  }
  return finish(std::move(t), failures);
}

Outcome Runner::tailbound() {
  require_tree();
  std::vector<std::string> failures;
  FreeTreeModel m = tree_model();
  const auto& g = m.group();
  CylinderSet V = parse_tree_set(g, set_flag("V", f_.V, "a"));
  double a = parse_number(set_flag("scale", f_.scale, "1"), "--scale");
  if (!(a > 0)) throw ConfigError("--scale (the thickening a) must be positive");
  const double C = 0.45;  // lower end of the lambda-norm window
  CylinderSet thick = m.thicken(V, a);
  std::vector<ReducedWord> qs;
  if (!f_.gamma.empty()) {
    for (const auto& w : gamma_list("")) qs.push_back(g.parse(w));
  } else {
    for (auto n : integer_lengths(t_list("1..12"))) {
      // first word of length n whose direction stays away from V
      for (std::uint64_t i = 0; i < g.sphere_size(n); ++i) {
        ReducedWord q = g.word_at(n, i);
        if (!thick.contains(m.direction(q))) {
          qs.push_back(q);
          break;
        }
      }
    }
  }
  Table t{{"q", "length", "lhs", "rhs", "C0", "short_branch", "holds"}, {}};
  for (const auto& q : qs) {
    auto r = tail_bound_check(m, q, V, a, C);
    if (!r.holds)
      failures.push_back("q = " + g.to_string(q) + ": " + format_double(r.lhs) + " > " + format_double(r.rhs));
    t.add({cell(g.to_string(q)), cell(static_cast<std::uint64_t>(q.size())), cell(r.lhs_exact), cell(r.rhs),
           cell(r.C0), cell_bool(r.short_branch), cell_bool(r.holds)});
  }
  return finish(std::move(t), failures);
}

Outcome Runner::rank() {
  require_tree();
  std::vector<std::string> failures;
  int n = f_.depth.value_or(1);
  echo("depth", std::to_string(n));
  std::size_t max_L = f_.t.empty() ? (n == 1 ? 6 : 7) : 0;
  if (!f_.t.empty()) {
    auto ls = integer_lengths(t_list(""));
    max_L = *std::max_element(ls.begin(), ls.end());
  } else {
    echo("t", std::to_string(max_L));
  }
  auto s = truncation_rank(tree_model(), static_cast<std::size_t>(n), max_L);
  Table t{{"L", "rank", "dimension_squared", "full"}, {}};
  for (std::size_t L = 0; L < s.rank_by_length.size(); ++L) {
    if (L > 0 && s.rank_by_length[L] < s.rank_by_length[L - 1])
      failures.push_back("rank drops at L = " + std::to_string(L));
    t.add({cell(static_cast<std::uint64_t>(L)), cell(static_cast<std::uint64_t>(s.rank_by_length[L])),
           cell(static_cast<std::uint64_t>(s.dimension * s.dimension)),
           cell_bool(s.rank_by_length[L] == s.dimension * s.dimension)});
  }
  return finish(std::move(t), failures);
}

Outcome Runner::mls() {
  std::vector<std::string> failures;
  Table t{{"word", "length", "ratio_1", "ratio_6", "limit_check"}, {}};
  if (tree()) {
    FreeTreeModel m = tree_model();
    const auto& g = m.group();
    for (const auto& w : gamma_list("a,b,ab,aB,abAB,aab,abA,aabb")) {
      ReducedWord q = g.parse(w);
      Rational l = translation_length(m, q);
      auto ratios = displacement_ratios(m, q, 6);
      // d(p, gamma^j p) = j l + 2 |conjugator| edge exactly
      bool ok = true;
      for (std::size_t j = 0; j < ratios.size(); ++j) {
        Rational jj(static_cast<long>(j + 1));
        if ((ratios[j] - l) * jj != ratios[0] - l) ok = false;
      }
      if (!ok) failures.push_back(w + ": d(p, gamma^j p) - j l is not constant");
      t.add({cell(g.to_string(q)), cell(l), cell(ratios.front()), cell(ratios.back()), cell_bool(ok)});
    }
  } else {
    PlaneModel m(spec_.preset);
    const auto& grp = m.group();
    std::string fallback;
    for (std::size_t i = 0; i < grp.generator_names.size(); i += 2) {
      fallback += (fallback.empty() ? "" : ",") + grp.generator_names[i];
      if (i + 2 < grp.generator_names.size()) fallback += "," + grp.generator_names[i] + grp.generator_names[i + 2];
    }
    for (const auto& w : gamma_list(fallback)) {
      MobiusIsometry gamma = evaluate_word(grp, parse_plane_word(grp, w));
      double l = 0;
      try {
        l = translation_length(gamma);
      } catch (const EllipticElement&) {
        t.add({cell(w + " (elliptic)"), cell(0.0), cell(gamma.displacement()), cell("n/a"), cell("n/a")});
        continue;
      }
      auto ratios = displacement_ratios(gamma, 6);
      bool ok = true;
      if (l > 0) {
        // j l <= d(p, gamma^j p) <= j l + 2 r with r the distance from p to the axis
        double r = std::acosh(std::max(1.0, std::sinh(ratios[0] / 2) / std::sinh(l / 2)));
        for (std::size_t j = 0; j < ratios.size(); ++j) {
          double jd = static_cast<double>(j + 1);
          double d = ratios[j] * jd;
          if (d < jd * l - 1e-9 || d > jd * l + 2 * r + 1e-9) ok = false;
        }
      }
      if (!ok) failures.push_back(w + ": displacement outside [j l, j l + 2 r]");
      t.add({cell(w), cell(l), cell(ratios.front()), cell(ratios.back()), cell_bool(ok)});
    }
  }
  return finish(std::move(t), failures);
}

Outcome Runner::rescale_check() {
  require_tree();
  FreeGroup g(spec_.rank);
  Rational c = parse_rational(set_flag("scale", f_.scale, "2"), "--scale");
  if (c <= 0) throw ConfigError("--scale must be positive");
  std::vector<ReducedWord> words;
  for (const auto& w : gamma_list("e,a,ab,aB,abA,abAB,aabA")) words.push_back(g.parse(w));
  CylinderSet U = parse_tree_set(g, set_flag("U", f_.U, "a"));
  CylinderSet V = parse_tree_set(g, set_flag("V", f_.V, "b"));
  std::vector<std::pair<SimpleFunction, SimpleFunction>> pairs{
      {SimpleFunction::constant(g, ExactScalar(1)), SimpleFunction::constant(g, ExactScalar(1))},
      {SimpleFunction::indicator(g, U), SimpleFunction::indicator(g, V)}};
  auto rep = rescaling_invariance_check(spec_.rank, c, words, pairs);
  std::vector<std::string> failures;
  Table t{{"word", "length_1", "length_c", "coeff_1", "coeff_c", "length_scaled", "coeff_equal"}, {}};
  for (const auto& r : rep.rows) {
    if (!r.length_scaled || !r.coeff_equal) failures.push_back("word " + r.word);
    t.add({cell(r.word), cell(r.length_1), cell(r.length_c), cell(r.coeff_1), cell(r.coeff_c),
           cell_bool(r.length_scaled), cell_bool(r.coeff_equal)});
  }
  if (!rep.holds && failures.empty()) failures.push_back("rescaling report does not hold");
  return finish(std::move(t), failures);
}

Outcome Runner::growth() {
  GrowthFit fit;
  double eta = 0;
  if (tree()) {
    FreeTreeModel m = tree_model();
    eta = m.critical_exponent();
    fit = growth_exponent(m, t_list("4..12"));
  } else {
    PlaneModel m(spec_.preset);
    eta = m.critical_exponent();
    auto ts = t_list("8..12:0.5");
    fit = growth_exponent(cache(*std::max_element(ts.begin(), ts.end())), ts);
  }
  Table t{{"t", "count", "eta_hat", "eta", "residual"}, {}};
  for (std::size_t i = 0; i < fit.radii.size(); ++i)
    t.add({cell(fit.radii[i]), cell(static_cast<std::uint64_t>(fit.counts[i])), cell(fit.eta_hat), cell(eta),
           cell(fit.residual)});
  return finish(std::move(t));
}

Outcome Runner::margulis_fit() {
  require_plane();
  PlaneModel m(spec_.preset);
  ArcSet U = parse_arc_set(set_flag("U", f_.U, "0..0.5"));
  ArcSet V = parse_arc_set(set_flag("V", f_.V, "0.25..0.75"));
  double a = parse_number(set_flag("scale", f_.scale, "1"), "--scale");
  if (!(a > 0)) throw ConfigError("--scale (the window half-width a) must be positive");
  auto ts = t_list("8..11.5:0.5");
  const auto& c = cache(*std::max_element(ts.begin(), ts.end()) + a);
  auto fit = hypbdry::margulis_fit(m, c, U, V, a, ts);
  Table t{{"t", "count", "normalized", "C_hat"}, {}};
  for (std::size_t i = 0; i < fit.t.size(); ++i)
    t.add({cell(fit.t[i]), cell(fit.counts[i]), cell(fit.normalized[i]), cell(fit.C_hat)});
  return finish(std::move(t));
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open --out file '" + path + "'");
  f << text;
}

constexpr const char* kSetHelp =
    "Boundary sets (--U/--V/--W): on the tree a comma-separated list of cylinder prefixes such as a,bA; on the "
    "plane a comma-separated list of intervals in turns such as 0.1..0.3,0.6..0.7. 'all' and 'none' name the "
    "whole and the empty set, and a leading '!' takes the complement of the union.";

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary representations of hyperbolic groups on free-group trees and Fuchsian groups"};
  app.footer(kSetHelp);
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--model", f.model, "free:rank=2,edge=1 | plane:genus2 | plane:triangle237")->capture_default_str();
  app.add_option("--t", f.t, "t values: 2..12, 8..12:0.5 or 2,4,6");
  app.add_option("--t-max", f.t_max, "orbit cache radius (plane)");
  app.add_option("--depth", f.depth,
                 "depth budget: certificate depth, word-length cap, compression depth n, or plane sample count");
  app.add_option("--seed", f.seed, "random seed")->capture_default_str();
  app.add_option("--threads", f.threads, "worker count, 0 = all cores")->capture_default_str();
  app.add_option("--out", f.out, "output file (default stdout)");
  app.add_option("--format", f.format, "csv or json")->capture_default_str();
  app.add_option("--U", f.U, "boundary set U");
  app.add_option("--V", f.V, "boundary set V (U' for equidist)");
  app.add_option("--W", f.W, "boundary set W");
  app.add_option("--gamma", f.gamma, "comma-separated group words (tree: abA; plane: a1B2)");
  app.add_option("--scale", f.scale, "rescaling factor c (rescale-check) or the width a (tailbound, margulis-fit)");
  app.add_flag("--timing", f.timing, "report wall-clock times (otherwise 0 for byte-stable output)");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"coeff", "matrix coefficient <rho(gamma) chi_U, chi_V>"},
      {"norms", "||lambda^q||_1 against |q| e^{-eta |q| / 2}"},
      {"bounded", "sup norm of (rho o T_t^1)(1)"},
      {"tt-converge", "<(rho o T_t^{chi_U}) chi_V, chi_W> against nu(U cap W) nu(V)"},
      {"equidist", "frequency of gamma in S_t with z^{gamma^-1} in U and z^{gamma} in V"},
      {"regularity", "eta-regularity certificate (k, k')"},
      {"sampling", "sampling-set sandwich for lambda^q"},
      {"tailbound", "<lambda^q, chi_V> / ||lambda^q||_1 against C0 e^{eta a} / |q|"},
      {"rank", "rank of span{P_n rho(gamma) P_n : |gamma| <= L}"},
      {"mls", "marked length spectrum"},
      {"rescale-check", "translation lengths and coefficients after rescaling the edge length"},
      {"growth", "growth exponent fit of the orbit count"},
      {"margulis-fit", "Margulis constant fit on the plane"},
      {"selftest", "run the acceptance suite"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "selftest") {
      if (f.threads < 0) throw ConfigError("--threads must be nonnegative");
      selftest::Options opt{f.threads, f.seed, OrbitCache::default_dir()};
      auto results = selftest::run(opt);
      std::string report = selftest::format_report(results, f.timing);
      write_output(report, f.out, out);
      if (!f.out.empty()) out << report;
      return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; }) ? 0 : 1;
    }
    Runner runner(command, f);
    Outcome o = runner.run();
    write_output(render(o.table, o.config, f.format), f.out, out);
    for (const auto& w : o.failures) err << "assertion failed: " << w << '\n';
    return o.failures.empty() ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const AssertionFailure& e) {
    err << "assertion failed: " << e.what() << '\n';
    return 1;
  } catch (const CacheExhausted& e) {
    err << "config error: " << e.what() << " (raise --t-max)\n";
    return 2;
  } catch (const ResolutionBudgetExceeded& e) {
    err << "config error: " << e.what() << " (raise --depth)\n";
    return 2;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace hypbdry::cli
