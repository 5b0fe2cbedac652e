#include "hypbdry/plane.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numbers>
#include <unordered_map>

#include "hypbdry/exact.hpp"
#include "hypbdry/parallel.hpp"

namespace hypbdry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using cd = std::complex<double>;

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

struct CMat {
  cd m00{1}, m01{0}, m10{0}, m11{1};
  CMat operator*(const CMat& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11, m10 * o.m00 + m11 * o.m10,
            m10 * o.m01 + m11 * o.m11};
  }
  cd apply(cd w) const { return (m00 * w + m01) / (m10 * w + m11); }
};

const cd I{0.0, 1.0};
// disk w = (z - i)/(z + i)
const CMat kCayley{1.0, -I, 1.0, I};
const CMat kCayleyInv{0.5, 0.5, 0.5 * I, -0.5 * I};

CMat to_disk(const MobiusIsometry& g) { return kCayley * CMat{g.a, g.b, g.c, g.d} * kCayleyInv; }

MobiusIsometry from_disk(const CMat& m) {
  CMat r = kCayleyInv * m * kCayley;
  MobiusIsometry g{r.m00.real(), r.m01.real(), r.m10.real(), r.m11.real()};
  double det = g.det();
  double s = 1.0 / std::sqrt(det);
  return {g.a * s, g.b * s, g.c * s, g.d * s};
}

CMat disk_rotation(double theta) { return {std::polar(1.0, theta / 2), 0.0, 0.0, std::polar(1.0, -theta / 2)}; }

// z -> (z - c)/(1 - conj(c) z), sends c to the origin
CMat disk_translation_to_origin(cd c) {
  double s = 1.0 / std::sqrt(1.0 - std::norm(c));
  return {s, -c * s, -std::conj(c) * s, s};
}

CMat disk_translation_from_origin(cd c) {
  double s = 1.0 / std::sqrt(1.0 - std::norm(c));
  return {s, c * s, std::conj(c) * s, s};
}

CMat rotation_about(cd c, double theta) {
  return disk_translation_from_origin(c) * disk_rotation(theta) * disk_translation_to_origin(c);
}

cd disk_point_at(double dist, double angle) { return std::polar(std::tanh(dist / 2), angle); }

double disk_distance(cd x, cd y) {
  double num = std::abs(x - y);
  double den = std::abs(1.0 - std::conj(x) * y);
  return 2.0 * std::atanh(std::min(num / den, 1.0));
}

void add_pair(PlaneGroup& grp, const MobiusIsometry& g, const std::string& name) {
  grp.generators.push_back(g);
  grp.generators.push_back(g.inverse());
  grp.generator_names.push_back(name);
  std::string inv = name;
  inv[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(inv[0])));
  grp.generator_names.push_back(inv);
}

PlaneGroup build_octagon() {
  const double pi = std::numbers::pi;
  const double r_in = std::acosh(1.0 + std::sqrt(2.0));
  // half-turn about the midpoint of side 0; vertices sit at angles k pi/4
  const CMat half_turn = rotation_about(disk_point_at(r_in, pi / 8), pi);
  auto pair = [&](int i, int j) {
    return from_disk(disk_rotation(i * pi / 4) * half_turn * disk_rotation(-j * pi / 4));
  };
  MobiusIsometry A = pair(2, 0), B = pair(3, 1), C = pair(6, 4), D = pair(7, 5);
  PlaneGroup grp{PlanePreset::Genus2Octagon, {}, {}, std::acosh(std::pow(1.0 + std::sqrt(2.0), 2))};
  add_pair(grp, A.inverse(), "a1");
  add_pair(grp, B, "b1");
  add_pair(grp, C.inverse(), "a2");
  add_pair(grp, D, "b2");
  return grp;
}

PlaneGroup build_triangle() {
  const double pi = std::numbers::pi;
  // triangle with angles pi/7 at the origin, pi/2 at P2, pi/3 at P3
  const double d72 = std::acosh(std::cos(pi / 3) / std::sin(pi / 7));
  const double d73 = std::acosh(std::cos(pi / 7) * std::cos(pi / 3) / (std::sin(pi / 7) * std::sin(pi / 3)));
  const cd p7{0.0, 0.0};
  const cd p2 = disk_point_at(d72, 0.0);
  const cd p3 = disk_point_at(d73, pi / 7);
  CMat x = rotation_about(p2, pi);
  CMat z = disk_rotation(2 * pi / 7);
  // pick the orientation of the order-3 rotation that closes up x y z = 1
  CMat y = rotation_about(p3, 2 * pi / 3);
  {
    MobiusIsometry prod = from_disk(x * y * z);
    if (prod.distance_to_identity() > 1e-9) y = rotation_about(p3, -2 * pi / 3);
  }
  // move an interior point to the origin so the basepoint has trivial stabiliser
  const cd centre = (p7 + p2 + p3) / 3.0;
  CMat to = disk_translation_to_origin(centre), from = disk_translation_from_origin(centre);
  auto conj = [&](const CMat& g) { return from_disk(to * g * from); };
  PlaneGroup grp{PlanePreset::Triangle237, {}, {}, 0.0};
  add_pair(grp, conj(x), "x");
  add_pair(grp, conj(y), "y");
  add_pair(grp, conj(z), "z");
  // fundamental domain: the triangle plus its mirror across P2P3, i.e. the
  // geodesic triangle (P7, P3, P7') with P7' the half-turn image of P7
  const cd p7m = x.apply(p7);
  grp.covering_radius = std::max({disk_distance(centre, p7), disk_distance(centre, p3), disk_distance(centre, p7m)});
  return grp;
}

}  // namespace

CirclePoint::CirclePoint(double a) : angle(wrap_angle(a)) {}

MobiusIsometry MobiusIsometry::operator*(const MobiusIsometry& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

std::array<double, 3> MobiusIsometry::basepoint_image() const {
  double aa = a * a, bb = b * b, cc = c * c, dd = d * d;
  return {(aa + bb + cc + dd) / 2, (aa + bb - cc - dd) / 2, -(a * c + b * d)};
}

double MobiusIsometry::displacement() const {
  double x0 = (a * a + b * b + c * c + d * d) / 2;
  return std::acosh(std::max(1.0, x0));
}

DiskPoint MobiusIsometry::apply(DiskPoint w) const { return to_disk(*this).apply(w); }

CirclePoint MobiusIsometry::apply(const CirclePoint& p) const {
  return CirclePoint(std::arg(to_disk(*this).apply(p.unit())));
}

double MobiusIsometry::distance_to_identity() const {
  double plus = std::max({std::abs(a - 1), std::abs(b), std::abs(c), std::abs(d - 1)});
  double minus = std::max({std::abs(a + 1), std::abs(b), std::abs(c), std::abs(d + 1)});
  return std::min(plus, minus);
}

PlanePreset parse_preset(const std::string& name) {
  if (name == "genus2" || name == "genus2-octagon") return PlanePreset::Genus2Octagon;
  if (name == "triangle237" || name == "triangle-2-3-7") return PlanePreset::Triangle237;
  throw DomainError("unknown plane preset: " + name);
}

std::string preset_name(PlanePreset p) { return p == PlanePreset::Genus2Octagon ? "genus2" : "triangle237"; }

PlaneGroup build_group(PlanePreset preset) {
  return preset == PlanePreset::Genus2Octagon ? build_octagon() : build_triangle();
}

MobiusIsometry evaluate_word(const PlaneGroup& g, const std::vector<std::size_t>& generator_indices) {
  MobiusIsometry r;
  for (std::size_t i : generator_indices) {
    if (i >= g.generators.size()) throw DomainError("generator index out of range");
    r = r * g.generators[i];
  }
  return r;
}

// ---------------------------------------------------------------------------

PlaneModel::PlaneModel(PlanePreset preset, double delta) : group_(build_group(preset)), delta_(delta) {
  if (!(delta >= 0)) throw DomainError("delta must be nonnegative");
}

double PlaneModel::distance(const DiskPoint& x, const DiskPoint& y) const {
  if (std::abs(x) >= 1 || std::abs(y) >= 1) throw DomainError("distance: point outside the open disk");
  return disk_distance(x, y);
}

double PlaneModel::gromov_product(const EndpointT& x, const EndpointT& y, const DiskPoint& base) const {
  if (std::abs(base) >= 1) throw DomainError("gromov_product: base outside the disk");
  const CMat move = disk_translation_to_origin(base);
  auto moved = [&](const EndpointT& e) -> std::pair<cd, bool> {
    if (const auto* p = std::get_if<DiskPoint>(&e)) {
      if (std::abs(*p) >= 1) throw DomainError("gromov_product: point outside the disk");
      return {move.apply(*p), false};
    }
    cd u = move.apply(std::get<CirclePoint>(e).unit());
    return {u / std::abs(u), true};
  };
  auto [u, ub] = moved(x);
  auto [v, vb] = moved(y);
  auto radius = [](cd z) { return 2.0 * std::atanh(std::abs(z)); };
  // (z|b)_0 = (|z| + log((1-|z|^2)/|b-z|^2)) / 2
  auto point_boundary = [&](cd z, cd b) {
    return 0.5 * (radius(z) + std::log((1.0 - std::norm(z)) / std::norm(b - z)));
  };
  if (ub && vb) {
    double chord = std::abs(u - v);
    if (chord == 0.0 || std::get<CirclePoint>(x) == std::get<CirclePoint>(y))
      throw InfiniteProduct("gromov_product: coincident boundary points");
    return -std::log(chord / 2.0);
  }
  if (ub) return std::max(0.0, point_boundary(v, u));
  if (vb) return std::max(0.0, point_boundary(u, v));
  return std::max(0.0, 0.5 * (radius(u) + radius(v) - disk_distance(u, v)));
}

CirclePoint PlaneModel::direction(const DiskPoint& q) const {
  if (std::abs(q) == 0.0) throw DomainError("direction: q is the basepoint");
  return CirclePoint(std::arg(q));
}

DiskPoint PlaneModel::ray_point(const CirclePoint& b, double s) const { return disk_point_at(s, b.angle); }

double PlaneModel::busemann_disk(const CirclePoint& b, const DiskPoint& x, const DiskPoint& y) const {
  if (std::abs(x) >= 1 || std::abs(y) >= 1) throw DomainError("busemann_disk: point outside the open disk");
  cd u = b.unit();
  return std::log(std::norm(u - y) * (1.0 - std::norm(x)) / (std::norm(u - x) * (1.0 - std::norm(y))));
}

double PlaneModel::audit_delta(std::size_t samples, std::uint64_t seed) const {
  std::uint64_t state = seed;
  auto uniform = [&] { return unit_uniform(splitmix64(state)); };
  auto endpoint = [&]() -> EndpointT {
    double theta = kTwoPi * uniform();
    if (uniform() < 0.25) return CirclePoint(theta);
    return disk_point_at(8.0 * uniform(), theta);
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    DiskPoint base = disk_point_at(3.0 * uniform(), kTwoPi * uniform());
    EndpointT x = endpoint(), y = endpoint(), w = endpoint();
    worst = std::max(worst, hyperbolicity_defect(*this, x, y, w, base));
  }
  return worst;
}

// ---------------------------------------------------------------------------

CirclePoint hyperboloid_direction(const std::array<double, 3>& X) { return CirclePoint(std::atan2(X[2], X[1])); }

DiskPoint hyperboloid_to_disk(const std::array<double, 3>& X) { return cd(X[1], X[2]) / (1.0 + X[0]); }

double plane_lambda(const std::array<double, 3>& X, const CirclePoint& b) {
  // e^{-beta_b(p,q)} = 1 / (X0 - <X, b>); split to avoid cancellation when
  // b is close to the direction of q
  double d = std::acosh(std::max(1.0, X[0]));
  double s = std::hypot(X[1], X[2]);
  double half = 0.0;
  if (s > 0) {
    double phi = std::atan2(X[2], X[1]);
    half = std::sin((b.angle - phi) / 2);
  }
  double denom = std::exp(-d) + 2.0 * s * half * half;
  return 1.0 / std::sqrt(denom);
}

double plane_lambda_l1(double norm) {
  if (norm <= 0) return 1.0;
  return (2.0 / std::numbers::pi) / std::cosh(norm / 2) * std::comp_ellint_1(std::tanh(norm / 2));
}

// ---------------------------------------------------------------------------

namespace {

struct GridKey {
  std::int64_t i, j;
  std::uint64_t pack() const {
    return (static_cast<std::uint64_t>(i) << 32) ^ (static_cast<std::uint64_t>(j) & 0xFFFFFFFFULL);
  }
};

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

double auto_tolerance(const PlaneGroup& group) {
  std::vector<std::array<double, 3>> pts;
  std::vector<MobiusIsometry> layer{MobiusIsometry::identity()};
  pts.push_back(layer[0].basepoint_image());
  for (int depth = 0; depth < 3; ++depth) {
    std::vector<MobiusIsometry> next;
    for (const auto& g : layer)
      for (const auto& s : group.generators) {
        next.push_back(g * s);
        pts.push_back(next.back().basepoint_image());
      }
    layer = std::move(next);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double ch = pts[i][0] * pts[j][0] - pts[i][1] * pts[j][1] - pts[i][2] * pts[j][2];
      double dist = std::acosh(std::max(1.0, ch));
      if (dist > 1e-6) best = std::min(best, dist);
    }
  return best / 2;
}

constexpr char kMagic[8] = {'H', 'Y', 'P', 'O', 'R', 'B', '0', '2'};

}  // namespace

OrbitCache OrbitCache::build(const PlaneGroup& group, OrbitCacheParams params) {
  if (!(params.t_max > 0)) throw DomainError("orbit cache: t_max must be positive");
  if (group.preset != params.preset) throw DomainError("orbit cache: preset mismatch");
  OrbitCache cache;
  cache.params_ = params;
  cache.generator_names_ = group.generator_names;
  const double tol = params.tolerance > 0 ? params.tolerance : auto_tolerance(group);
  cache.tolerance_used_ = tol;
  const double bound = params.t_max + group.covering_radius + 1e-9;

  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
  std::vector<std::array<double, 2>> chart;
  auto key_of = [&](double x, double y) {
    return GridKey{static_cast<std::int64_t>(std::floor(x / tol)), static_cast<std::int64_t>(std::floor(y / tol))};
  };
  auto insert = [&](const OrbitEntry& e) {
    auto X = e.element.basepoint_image();
    chart.push_back({X[1], X[2]});
    grid[key_of(X[1], X[2]).pack()].push_back(static_cast<std::uint32_t>(cache.entries_.size()));
    cache.entries_.push_back(e);
  };
  // chart distance of the hyperboloid projection dominates hyperbolic distance
  auto nearest_gap = [&](double x, double y) {
    GridKey k = key_of(x, y);
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t di = -1; di <= 1; ++di)
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = grid.find(GridKey{k.i + di, k.j + dj}.pack());
        if (it == grid.end()) continue;
        for (std::uint32_t idx : it->second) best = std::min(best, std::hypot(chart[idx][0] - x, chart[idx][1] - y));
      }
    return best;
  };

  insert(OrbitEntry{MobiusIsometry::identity(), 0.0, 0, 0});
  std::vector<std::uint32_t> frontier{0};
  const std::size_t ngen = group.generators.size();
  while (!frontier.empty()) {
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(256, frontier.size() / 64 + 1));
    std::vector<std::vector<OrbitEntry>> found(chunks);
    parallel_chunks(frontier.size(), chunks, params.threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      for (std::size_t f = lo; f < hi; ++f) {
        const OrbitEntry& parent = cache.entries_[frontier[f]];
        for (std::size_t g = 0; g < ngen; ++g) {
          MobiusIsometry m = parent.element * group.generators[g];
          double dist = m.displacement();
          if (dist <= bound)
            found[c].push_back(OrbitEntry{m, dist, frontier[f], static_cast<std::uint16_t>(g)});
        }
      }
    });
    std::vector<std::uint32_t> next;
    for (const auto& chunk : found)
      for (const auto& e : chunk) {
        auto X = e.element.basepoint_image();
        double gap = nearest_gap(X[1], X[2]);
        if (gap < tol) {
          cache.max_merged_gap_ = std::max(cache.max_merged_gap_, gap);
          continue;
        }
        next.push_back(static_cast<std::uint32_t>(cache.entries_.size()));
        insert(e);
      }
    frontier = std::move(next);
    ++cache.layers_;
  }
  cache.finalize();
  return cache;
}

void OrbitCache::finalize() {
  order_.clear();
  for (std::uint32_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].distance <= params_.t_max) order_.push_back(i);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::uint32_t x, std::uint32_t y) { return entries_[x].distance < entries_[y].distance; });
  sorted_distance_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) sorted_distance_[i] = entries_[order_[i]].distance;
  min_separation_ = sorted_distance_.size() > 1 ? sorted_distance_[1] : std::numeric_limits<double>::infinity();
}

std::string OrbitCache::word(std::size_t index) const {
  std::vector<std::string> parts;
  while (index != 0) {
    parts.push_back(generator_names_.at(entries_[index].generator));
    index = entries_[index].parent;
  }
  if (parts.empty()) return "e";
  std::string out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (!out.empty()) out += '.';
    out += *it;
  }
  return out;
}

std::vector<std::size_t> OrbitCache::window(double lo, double hi) const {
  auto first = std::upper_bound(sorted_distance_.begin(), sorted_distance_.end(), lo);
  auto last = std::lower_bound(sorted_distance_.begin(), sorted_distance_.end(), hi);
  std::vector<std::size_t> out;
  for (auto it = first; it < last; ++it) out.push_back(order_[static_cast<std::size_t>(it - sorted_distance_.begin())]);
  return out;
}

std::vector<std::size_t> OrbitCache::annulus(double t, double R) const {
  if (t <= R) throw DomainError("annulus: t must exceed R");
  if (t + R > params_.t_max)
    throw CacheExhausted("orbit cache radius " + format_double(params_.t_max, 6) + " is below t + R = " +
                         format_double(t + R, 6));
  return window(t - R, t + R);
}

std::size_t OrbitCache::count_within(double t) const {
  if (t > params_.t_max) throw CacheExhausted("orbit cache radius is below the requested t");
  return static_cast<std::size_t>(std::upper_bound(sorted_distance_.begin(), sorted_distance_.end(), t) -
                                  sorted_distance_.begin());
}

std::string OrbitCache::cache_file_name(const OrbitCacheParams& params) {
  std::string name = preset_name(params.preset);
  std::uint64_t h = fnv1a(name.data(), name.size());
  h = fnv1a(&params.t_max, sizeof params.t_max, h);
  h = fnv1a(&params.tolerance, sizeof params.tolerance, h);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return "orbit-" + name + "-" + buf + ".bin";
}

std::filesystem::path OrbitCache::default_dir() {
  if (const char* env = std::getenv("HYPBDRY_CACHE_DIR"); env && *env) return env;
  return ".hypbdry-cache";
}

void OrbitCache::save(const std::filesystem::path& file) const {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write orbit cache " + tmp.string());
    auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
    out.write(kMagic, sizeof kMagic);
    put(static_cast<std::int32_t>(params_.preset));
    put(params_.t_max);
    put(params_.tolerance);
    put(tolerance_used_);
    put(max_merged_gap_);
    put(static_cast<std::uint64_t>(layers_));
    put(static_cast<std::uint64_t>(entries_.size()));
    for (const auto& e : entries_) {
      put(e.element.a);
      put(e.element.b);
      put(e.element.c);
      put(e.element.d);
      put(e.distance);
      put(e.parent);
      put(e.generator);
    }
    if (!out) throw std::runtime_error("short write on orbit cache " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

OrbitCache OrbitCache::load(const std::filesystem::path& file, const PlaneGroup& group) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open orbit cache " + file.string());
  auto get = [&](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof v); };
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("not an orbit cache file");
  OrbitCache cache;
  std::int32_t preset = 0;
  std::uint64_t layers = 0, n = 0;
  get(preset);
  cache.params_.preset = static_cast<PlanePreset>(preset);
  get(cache.params_.t_max);
  get(cache.params_.tolerance);
  get(cache.tolerance_used_);
  get(cache.max_merged_gap_);
  get(layers);
  get(n);
  if (!in || cache.params_.preset != group.preset) throw std::runtime_error("orbit cache header mismatch");
  cache.layers_ = layers;
  cache.entries_.resize(n);
  for (auto& e : cache.entries_) {
    get(e.element.a);
    get(e.element.b);
    get(e.element.c);
    get(e.element.d);
    get(e.distance);
    get(e.parent);
    get(e.generator);
  }
  if (!in) throw std::runtime_error("truncated orbit cache " + file.string());
  cache.generator_names_ = group.generator_names;
  cache.finalize();
  return cache;
}

OrbitCache OrbitCache::obtain(const PlaneGroup& group, OrbitCacheParams params, const std::filesystem::path& dir) {
  if (dir.empty()) return build(group, params);
  auto file = dir / cache_file_name(params);
  if (std::filesystem::exists(file)) {
    try {
      OrbitCache c = load(file, group);
      if (c.params_ == params) {
        c.params_.threads = params.threads;
        return c;
      }
    } catch (const std::exception&) {
      // stale or foreign file: rebuild below
    }
  }
  OrbitCache c = build(group, params);
  try {
    c.save(file);
  } catch (const std::exception&) {
    // a read-only cache dir only costs a rebuild next time
  }
  return c;
}

// ---------------------------------------------------------------------------

ArcSet ArcSet::whole() {
  ArcSet s;
  s.arcs_.push_back({0.0, kTwoPi});
  return s;
}

ArcSet ArcSet::arc(double start, double end) {
  ArcSet s;
  if (end - start >= kTwoPi) return whole();
  double lo = wrap_angle(start), hi = wrap_angle(end);
  if (lo == hi) {
    if (end > start) return whole();
    return s;
  }
  if (lo < hi) {
    s.arcs_.push_back({lo, hi});
  } else {
    s.arcs_.push_back({lo, kTwoPi});
    if (hi > 0) s.arcs_.push_back({0.0, hi});
  }
  s.normalize();
  return s;
}

ArcSet ArcSet::from_turns(double start_turn, double end_turn) {
  if (end_turn < start_turn) throw DomainError("arc: end turn precedes start turn");
  if (end_turn - start_turn >= 1.0) return whole();
  if (end_turn == start_turn) return {};
  return arc(kTwoPi * start_turn, kTwoPi * end_turn);
}

// endpoints computed from turns differ by an ulp or so after wrapping
constexpr double kArcEps = 1e-12;

void ArcSet::normalize() {
  std::sort(arcs_.begin(), arcs_.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& a : arcs_) {
    if (a.second - a.first <= kArcEps) continue;
    if (!merged.empty() && a.first <= merged.back().second + kArcEps)
      merged.back().second = std::max(merged.back().second, a.second);
    else
      merged.push_back(a);
  }
  arcs_ = std::move(merged);
}

bool ArcSet::contains(const CirclePoint& b) const {
  for (const auto& [lo, hi] : arcs_)
    if (b.angle >= lo && b.angle < hi) return true;
  return false;
}

double ArcSet::measure() const {
  double s = 0.0;
  for (const auto& [lo, hi] : arcs_) s += hi - lo;
  return s / kTwoPi;
}

ArcSet ArcSet::complement() const {
  ArcSet out;
  double cursor = 0.0;
  for (const auto& [lo, hi] : arcs_) {
    if (lo > cursor) out.arcs_.push_back({cursor, lo});
    cursor = hi;
  }
  if (cursor < kTwoPi) out.arcs_.push_back({cursor, kTwoPi});
  return out;
}

ArcSet ArcSet::unite(const ArcSet& o) const {
  ArcSet out = *this;
  out.arcs_.insert(out.arcs_.end(), o.arcs_.begin(), o.arcs_.end());
  out.normalize();
  return out;
}

ArcSet ArcSet::intersect(const ArcSet& o) const {
  ArcSet out;
  for (const auto& a : arcs_)
    for (const auto& b : o.arcs_) {
      double lo = std::max(a.first, b.first), hi = std::min(a.second, b.second);
      if (hi - lo > kArcEps) out.arcs_.push_back({lo, hi});
    }
  out.normalize();
  return out;
}

ArcSet ArcSet::thicken(double a) const {
  if (!(a > 0)) throw DomainError("thicken: a must be positive");
  if (arcs_.empty()) return {};
  double r = std::exp(-a);
  if (r >= 1.0) return whole();
  // sigma(b, c) = sin(|b - c| / 2) at the origin
  double w = 2.0 * std::asin(r);
  ArcSet out;
  for (const auto& [lo, hi] : arcs_) out = out.unite(arc(lo - w, hi + w));
  return out;
}

std::vector<double> ArcSet::breakpoints() const {
  std::vector<double> out;
  for (const auto& [lo, hi] : arcs_) {
    out.push_back(lo);
    out.push_back(hi);
  }
  return out;
}

// ---------------------------------------------------------------------------

McEstimate mc_boundary_integral(const std::function<double(const CirclePoint&)>& f, std::size_t n_samples,
                                std::uint64_t seed, int threads) {
  if (n_samples == 0) throw DomainError("mc_boundary_integral: need at least one sample");
  constexpr std::size_t kChunks = 64;
  std::vector<double> sums(kChunks, 0.0), squares(kChunks, 0.0);
  parallel_chunks(n_samples, kChunks, threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    std::uint64_t state = stream_seed(seed, c);
    std::vector<double> vals;
    vals.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) vals.push_back(f(CirclePoint(kTwoPi * unit_uniform(splitmix64(state)))));
    sums[c] = pairwise_sum(vals);
    for (double& v : vals) v *= v;
    squares[c] = pairwise_sum(vals);
  });
  const double n = static_cast<double>(n_samples);
  double mean = pairwise_sum(sums) / n;
  double second = pairwise_sum(squares) / n;
  double var = n > 1 ? std::max(0.0, second - mean * mean) * n / (n - 1) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double quadrature_boundary_integral(const std::function<double(const CirclePoint&)>& f,
                                    std::vector<double> breakpoints, double tol) {
  for (double& b : breakpoints) b = wrap_angle(b);
  breakpoints.push_back(0.0);
  breakpoints.push_back(kTwoPi);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  auto g = [&](double theta) { return f(CirclePoint(theta)); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    double lo = breakpoints[i], hi = breakpoints[i + 1];
    if (hi - lo < 1e-15) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, lo, hi, 20, tol);
  }
  return total / kTwoPi;
}

}  // namespace hypbdry
