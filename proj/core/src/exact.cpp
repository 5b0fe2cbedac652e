#include "hypbdry/exact.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hypbdry {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational pow_rational(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw std::domain_error("zero to a negative power");
    Rational inv = 1 / base;
    return pow_rational(inv, -exponent);
  }
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string rational_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

namespace {

// Splits m = f^2 * m' with m' squarefree.
void squarefree_split(long m, long& factor, long& core) {
  factor = 1;
  core = m;
  for (long p = 2; p * p <= core; ++p) {
    while (core % (p * p) == 0) {
      core /= p * p;
      factor *= p;
    }
  }
}

BigInt floor_sqrt(const BigInt& n) {
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

// floor(x + y*sqrt(m)) for the exact value.
BigInt exact_floor(const Rational& x, const Rational& y, long m) {
  if (y == 0 || m == 0) {
    BigInt f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return f;
  }
  BigInt den;
  mpz_lcm(den.get_mpz_t(), x.get_den_mpz_t(), y.get_den_mpz_t());
  BigInt p = x.get_num() * (den / x.get_den());
  BigInt q = y.get_num() * (den / y.get_den());
  BigInt q2m = q * q * m;
  BigInt root = floor_sqrt(q2m);
  BigInt f;
  if (q >= 0) {
    f = root;
  } else {
    f = -root;
    if (root * root != q2m) f -= 1;
  }
  BigInt out;
  BigInt sum = p + f;
  mpz_fdiv_q(out.get_mpz_t(), sum.get_mpz_t(), den.get_mpz_t());
  return out;
}

}  // namespace

ExactScalar::ExactScalar(Rational x, Rational y, long radicand)
    : x_(std::move(x)), y_(std::move(y)), m_(radicand) {
  if (radicand < 0) throw std::domain_error("negative radicand");
  x_.canonicalize();
  y_.canonicalize();
  normalize();
}

ExactScalar ExactScalar::sqrt_of(long radicand) { return ExactScalar(0, 1, radicand); }

ExactScalar ExactScalar::half_power(long radicand, long half_exponent) {
  if (radicand <= 0) throw std::domain_error("half_power needs a positive radicand");
  long whole = half_exponent >= 0 ? half_exponent / 2 : -((-half_exponent + 1) / 2);
  bool odd = (half_exponent - 2 * whole) != 0;
  Rational base = pow_rational(Rational(radicand), whole);
  if (!odd) return ExactScalar(base);
  return ExactScalar(0, base, radicand);
}

void ExactScalar::normalize() {
  if (y_ == 0) {
    m_ = 0;
    return;
  }
  if (m_ == 0) {
    y_ = 0;
    return;
  }
  long factor = 1, core = m_;
  squarefree_split(m_, factor, core);
  if (factor != 1) y_ *= factor;
  m_ = core;
  if (m_ == 1) {
    x_ += y_;
    y_ = 0;
    m_ = 0;
  }
}

void ExactScalar::unify(const ExactScalar& o) {
  if (o.m_ == 0 || o.y_ == 0) return;
  if (m_ == 0 || y_ == 0) {
    m_ = o.m_;
    return;
  }
  if (m_ != o.m_) throw std::domain_error("ExactScalar: mixing distinct quadratic fields");
}

int ExactScalar::sign() const {
  int sx = sgn(x_);
  int sy = (m_ == 0) ? 0 : sgn(y_);
  if (sy == 0) return sx;
  if (sx == 0) return sy;
  if (sx == sy) return sx;
  // x and y*sqrt(m) have opposite signs; compare squares.
  Rational lhs = x_ * x_;
  Rational rhs = y_ * y_ * m_;
  int c = cmp(lhs, rhs);
  if (c == 0) return 0;
  return c > 0 ? sx : sy;
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) {
  unify(o);
  x_ += o.x_;
  if (o.m_ != 0) y_ += o.y_;
  normalize();
  return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& o) {
  unify(o);
  x_ -= o.x_;
  if (o.m_ != 0) y_ -= o.y_;
  normalize();
  return *this;
}

ExactScalar& ExactScalar::operator*=(const ExactScalar& o) {
  unify(o);
  long m = m_ != 0 ? m_ : o.m_;
  Rational oy = o.m_ != 0 ? o.y_ : Rational(0);
  Rational y = m_ != 0 ? y_ : Rational(0);
  Rational nx = x_ * o.x_ + y * oy * m;
  Rational ny = x_ * oy + y * o.x_;
  x_ = nx;
  y_ = ny;
  m_ = m;
  normalize();
  return *this;
}

ExactScalar ExactScalar::conjugate() const {
  ExactScalar c = *this;
  c.y_ = -c.y_;
  return c;
}

ExactScalar& ExactScalar::operator/=(const ExactScalar& o) {
  if (o.is_zero()) throw std::domain_error("ExactScalar: division by zero");
  ExactScalar conj = o.conjugate();
  ExactScalar norm = o * conj;  // rational
  *this *= conj;
  x_ /= norm.x_;
  y_ /= norm.x_;
  normalize();
  return *this;
}

ExactScalar ExactScalar::operator-() const {
  ExactScalar r = *this;
  r.x_ = -r.x_;
  r.y_ = -r.y_;
  return r;
}

bool operator==(const ExactScalar& a, const ExactScalar& b) { return (a - b).sign() == 0; }

double ExactScalar::to_double() const {
  if (m_ == 0 || y_ == 0) return x_.get_d();
  // Route through the correctly rounded decimal so the conversion does not
  // depend on evaluation order.
  return std::stod(to_decimal(17));
}

std::string ExactScalar::to_decimal(int digits) const {
  if (digits < 1) throw std::invalid_argument("to_decimal: digits must be positive");
  if (is_zero()) return "0";
  ExactScalar mag = sign() < 0 ? -*this : *this;

  double approx = std::fabs(x_.get_d() + (m_ ? y_.get_d() * std::sqrt(static_cast<double>(m_)) : 0.0));
  long e10 = approx > 0 ? static_cast<long>(std::floor(std::log10(approx))) : 0;
  auto pow10 = [](long e) { return ExactScalar(pow_rational(Rational(10), e)); };
  // Pin the decimal exponent exactly: 10^e10 <= mag < 10^(e10+1).
  while (mag < pow10(e10)) --e10;
  while (mag >= pow10(e10 + 1)) ++e10;

  long shift = digits - 1 - e10;
  ExactScalar scaled = mag * pow10(shift) + ExactScalar(make_rational(1, 2));
  BigInt n = exact_floor(scaled.x_, scaled.y_, scaled.m_);
  BigInt limit;
  mpz_ui_pow_ui(limit.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  if (n >= limit) {
    n /= 10;
    ++e10;
  }
  std::string ds = n.get_str();
  // Strip trailing zeros like printf's %g.
  while (ds.size() > 1 && ds.back() == '0') ds.pop_back();

  std::string out = sign() < 0 ? "-" : "";
  if (e10 < -5 || e10 >= digits) {
    out += ds.substr(0, 1);
    if (ds.size() > 1) out += "." + ds.substr(1);
    char buf[64];
    std::snprintf(buf, sizeof buf, "e%c%02ld", e10 < 0 ? '-' : '+', e10 < 0 ? -e10 : e10);
    out += buf;
  } else if (e10 < 0) {
    out += "0." + std::string(static_cast<std::size_t>(-e10 - 1), '0') + ds;
  } else {
    auto int_len = static_cast<std::size_t>(e10 + 1);
    if (ds.size() <= int_len) {
      out += ds + std::string(int_len - ds.size(), '0');
    } else {
      out += ds.substr(0, int_len) + "." + ds.substr(int_len);
    }
  }
  return out;
}

std::string ExactScalar::to_exact_string() const {
  if (m_ == 0 || y_ == 0) return rational_string(x_);
  std::ostringstream os;
  if (x_ != 0) os << rational_string(x_) << " + ";
  os << rational_string(y_) << "*sqrt(" << m_ << ")";
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const ExactScalar& v) { return os << v.to_exact_string(); }

std::string format_double(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace hypbdry
