#pragma once

// Exact arithmetic in Q(sqrt(m)).
//
// Every measure, lambda value and matrix coefficient of the free-group model
// lives in the quadratic field generated by sqrt(2k-1), so the tree side of
// the library never touches floating point until a value is printed.

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <string>

namespace hypbdry {

using Rational = mpq_class;
using BigInt = mpz_class;

Rational make_rational(long num, long den = 1);
Rational pow_rational(const Rational& base, long exponent);
std::string rational_string(const Rational& q);  // "p/q" or "p"
double to_double(const Rational& q);

/// Value x + y*sqrt(m) with rational x, y.
///
/// The radicand is carried along with the value. A scalar whose irrational
/// part is zero is compatible with every radicand; mixing two scalars with
/// distinct radicands and nonzero irrational parts throws std::domain_error.
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(long v) : x_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(Rational x) : x_(std::move(x)) { x_.canonicalize(); }  // NOLINT
  ExactScalar(Rational x, Rational y, long radicand);

  static ExactScalar sqrt_of(long radicand);
  /// radicand^(half_exponent / 2), exact for any integer half_exponent.
  static ExactScalar half_power(long radicand, long half_exponent);

  const Rational& rational_part() const { return x_; }
  const Rational& irrational_part() const { return y_; }
  long radicand() const { return m_; }
  bool is_rational() const { return y_ == 0; }

  int sign() const;
  bool is_zero() const { return x_ == 0 && y_ == 0; }

  ExactScalar& operator+=(const ExactScalar& o);
  ExactScalar& operator-=(const ExactScalar& o);
  ExactScalar& operator*=(const ExactScalar& o);
  ExactScalar& operator/=(const ExactScalar& o);
  ExactScalar operator-() const;

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(ExactScalar a, const ExactScalar& b) { return a *= b; }
  friend ExactScalar operator/(ExactScalar a, const ExactScalar& b) { return a /= b; }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b);
  friend bool operator<(const ExactScalar& a, const ExactScalar& b) { return (a - b).sign() < 0; }
  friend bool operator<=(const ExactScalar& a, const ExactScalar& b) { return (a - b).sign() <= 0; }
  friend bool operator>(const ExactScalar& a, const ExactScalar& b) { return b < a; }
  friend bool operator>=(const ExactScalar& a, const ExactScalar& b) { return b <= a; }

  /// Conjugate x - y*sqrt(m).
  ExactScalar conjugate() const;

  double to_double() const;
  /// Correctly rounded decimal with `digits` significant digits (round half
  /// away from zero), computed from the exact value.
  std::string to_decimal(int digits = 17) const;
  /// "p/q", or "p/q + r/s*sqrt(m)" when irrational.
  std::string to_exact_string() const;

 private:
  void normalize();
  void unify(const ExactScalar& o);

  Rational x_{0};
  Rational y_{0};
  long m_{0};
};

std::ostream& operator<<(std::ostream& os, const ExactScalar& v);

/// Shortest round-trip-safe formatting used everywhere floats are emitted.
std::string format_double(double v, int digits = 17);

}  // namespace hypbdry
