#include "smf/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace smf {

namespace {

using Int = Rational::Int;
using UInt = unsigned __int128;

UInt uabs(Int v) { return v < 0 ? UInt(0) - UInt(v) : UInt(v); }

UInt ugcd(UInt a, UInt b) {
  while (b != 0) {
    UInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational: add overflow");
  return r;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational: mul overflow");
  return r;
}

std::string int128_str(Int v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  UInt u = uabs(v);
  std::string s;
  while (u != 0) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

Int int128_parse(const std::string& s, std::size_t lo, std::size_t hi) {
  if (lo >= hi) throw std::invalid_argument("rational: empty integer");
  bool neg = false;
  if (s[lo] == '-') { neg = true; ++lo; } else if (s[lo] == '+') { ++lo; }
  if (lo >= hi) throw std::invalid_argument("rational: empty integer");
  Int v = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("rational: bad digit");
    v = checked_add(checked_mul(v, 10), s[i] - '0');
  }
  return neg ? -v : v;
}

// Integer square root of a non-negative 128-bit value, or nullopt when the
// input is not a perfect square.
std::optional<UInt> perfect_sqrt(UInt v) {
  if (v == 0) return UInt(0);
  UInt r = UInt(std::sqrt(double(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  if (r * r == v) return r;
  return std::nullopt;
}

}  // namespace

void Rational::normalize() {
  if (den_ == 0) throw std::domain_error("rational: zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  UInt g = ugcd(uabs(num_), UInt(den_));
  if (g > 1) {
    num_ /= Int(g);
    den_ /= Int(g);
  }
}

Rational::Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

Rational Rational::make(Int n, Int d) {
  Rational r;
  r.num_ = n;
  r.den_ = d;
  r.normalize();
  return r;
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("rational: non-finite double");
  if (x == 0.0) return Rational();
  int e = 0;
  double f = std::frexp(x, &e);        // x = f * 2^e, |f| in [0.5, 1)
  auto mant = (long long)std::ldexp(f, 53);  // exact: f has <= 53 mantissa bits
  int e2 = e - 53;
  Int num = mant;
  Int den = 1;
  if (e2 >= 0) {
    if (e2 > 70) throw std::overflow_error("rational: double too large for exact form");
    num = checked_mul(num, Int(1) << e2);
  } else {
    if (-e2 > 120) throw std::overflow_error("rational: double too small for exact form");
    den = Int(1) << (-e2);
  }
  return make(num, den);
}

Rational Rational::parse(const std::string& text) {
  std::size_t slash = text.find('/');
  if (slash == std::string::npos) return make(int128_parse(text, 0, text.size()), 1);
  Int n = int128_parse(text, 0, slash);
  Int d = int128_parse(text, slash + 1, text.size());
  return make(n, d);
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  UInt g = ugcd(UInt(den_), UInt(o.den_));
  Int dg = o.den_ / Int(g);
  Int n = checked_add(checked_mul(num_, dg), checked_mul(o.num_, den_ / Int(g)));
  Int d = checked_mul(den_, dg);
  num_ = n;
  den_ = d;
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  // cross-reduce first to keep intermediates small
  UInt g1 = ugcd(uabs(num_), UInt(o.den_));
  UInt g2 = ugcd(uabs(o.num_), UInt(den_));
  Int n1 = num_ / Int(g1);
  Int d2 = o.den_ / Int(g1);
  Int n2 = o.num_ / Int(g2);
  Int d1 = den_ / Int(g2);
  num_ = checked_mul(n1, n2);
  den_ = checked_mul(d1, d2);
  normalize();
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("rational: division by zero");
  Rational inv;
  inv.num_ = o.den_;
  inv.den_ = o.num_;
  if (inv.den_ < 0) {
    inv.num_ = -inv.num_;
    inv.den_ = -inv.den_;
  }
  return *this *= inv;
}

bool Rational::operator<(const Rational& o) const {
  return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
}

Rational Rational::pow(unsigned k) const {
  Rational r(1);
  Rational base = *this;
  while (k != 0) {
    if (k & 1u) r *= base;
    base = (k >>= 1) != 0 ? base * base : base;
  }
  return r;
}

std::optional<Rational> Rational::exact_sqrt() const {
  if (num_ < 0) return std::nullopt;
  auto sn = perfect_sqrt(UInt(num_));
  if (!sn) return std::nullopt;
  auto sd = perfect_sqrt(UInt(den_));
  if (!sd) return std::nullopt;
  return make(Int(*sn), Int(*sd));
}

double Rational::to_double() const {
  return double((long double)num_ / (long double)den_);
}

std::string Rational::str() const {
  if (den_ == 1) return int128_str(num_);
  return int128_str(num_) + "/" + int128_str(den_);
}

}  // namespace smf
