#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace smf {

// Exact rational arithmetic over a checked 128-bit integer.  The symbolic
// identities this project certifies (determinants, series orders, gradient
// algebra) must hold at the coefficient level, so every polynomial and series
// coefficient is one of these.  Anything that would wrap the 128-bit range
// throws std::overflow_error rather than silently losing exactness.
class Rational {
 public:
  using Int = __int128;

  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d);

  static Rational make(Int n, Int d);

  // Exact conversion of a finite double (doubles are dyadic rationals).
  // Throws for magnitudes so extreme that the dyadic form exceeds 128 bits.
  static Rational from_double(double x);

  // Parses "n", "-n", or "n/d".
  static Rational parse(const std::string& text);

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }
  Rational abs() const { return num_ < 0 ? -*this : *this; }

  Rational pow(unsigned k) const;

  // Exact square root when numerator and denominator are perfect squares.
  std::optional<Rational> exact_sqrt() const;

  double to_double() const;
  std::string str() const;

  Int numerator() const { return num_; }
  Int denominator() const { return den_; }

 private:
  Int num_;
  Int den_;  // > 0, gcd(|num_|, den_) == 1
  void normalize();
};

inline Rational operator*(long long a, const Rational& b) { return Rational(a) * b; }

}  // namespace smf
