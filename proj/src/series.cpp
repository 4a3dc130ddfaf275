#include "smf/series.hpp"

#include <algorithm>

namespace smf {

Series Series::constant(int trunc, const Rational& v) {
  Series s(trunc);
  s.c_[0] = v;
  return s;
}

Series Series::variable(int trunc) {
  Series s(trunc);
  if (trunc < 1) throw TruncationError("series: truncation below 1");
  s.c_[1] = Rational(1);
  return s;
}

Series Series::from_coeffs(int trunc, const std::vector<Rational>& coeffs) {
  Series s(trunc);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (int(k) > trunc) {
      if (!coeffs[k].is_zero())
        throw TruncationError("series: coefficient beyond truncation");
      continue;
    }
    s.c_[k] = coeffs[k];
  }
  return s;
}

int Series::degree() const {
  for (int k = trunc_; k >= 0; --k)
    if (!c_[std::size_t(k)].is_zero()) return k;
  return -1;
}

int Series::order() const {
  for (int k = 0; k <= trunc_; ++k)
    if (!c_[std::size_t(k)].is_zero()) return k;
  if (exact_) return -1;  // identically zero
  throw TruncationError("series: order undetermined at current truncation");
}

Rational Series::leading() const {
  int k = order();
  return k < 0 ? Rational() : c_[std::size_t(k)];
}

std::pair<Series, Series> Series::aligned(const Series& a, const Series& b) {
  if (a.trunc_ == b.trunc_) return {a, b};
  int t = std::min(a.trunc_, b.trunc_);
  auto cut = [t](const Series& s) {
    Series r(t);
    r.exact_ = s.exact_ && s.degree() <= t;
    for (int k = 0; k <= t; ++k) r.c_[std::size_t(k)] = s.c_[std::size_t(k)];
    return r;
  };
  return {cut(a), cut(b)};
}

Series Series::operator+(const Series& o) const {
  auto [a, b] = aligned(*this, o);
  Series r(a.trunc_);
  r.exact_ = a.exact_ && b.exact_;
  for (int k = 0; k <= a.trunc_; ++k)
    r.c_[std::size_t(k)] = a.c_[std::size_t(k)] + b.c_[std::size_t(k)];
  return r;
}

Series Series::operator-(const Series& o) const { return *this + (-o); }

Series Series::operator-() const {
  Series r(trunc_);
  r.exact_ = exact_;
  for (int k = 0; k <= trunc_; ++k) r.c_[std::size_t(k)] = -c_[std::size_t(k)];
  return r;
}

Series Series::operator*(const Series& o) const {
  auto [a, b] = aligned(*this, o);
  Series r(a.trunc_);
  int da = a.degree(), db = b.degree();
  if (da < 0 || db < 0) {
    // zero times anything: exact iff the zero factor is exact
    r.exact_ = (da < 0 && a.exact_) || (db < 0 && b.exact_);
    return r;
  }
  r.exact_ = a.exact_ && b.exact_ && (da + db <= a.trunc_);
  for (int i = 0; i <= da; ++i) {
    if (a.c_[std::size_t(i)].is_zero()) continue;
    for (int j = 0; j <= db && i + j <= a.trunc_; ++j) {
      if (b.c_[std::size_t(j)].is_zero()) continue;
      r.c_[std::size_t(i + j)] += a.c_[std::size_t(i)] * b.c_[std::size_t(j)];
    }
  }
  return r;
}

Series Series::scaled(const Rational& v) const {
  Series r(trunc_);
  r.exact_ = exact_;
  if (v.is_zero()) return r;
  for (int k = 0; k <= trunc_; ++k) r.c_[std::size_t(k)] = c_[std::size_t(k)] * v;
  return r;
}

Series Series::pow(unsigned n) const {
  Series r = Series::constant(trunc_, Rational(1));
  Series base = *this;
  while (n != 0) {
    if (n & 1u) r = r * base;
    n >>= 1;
    if (n != 0) base = base * base;
  }
  return r;
}

Series Series::sqrt() const {
  const Rational& a0 = c_[0];
  if (a0.sign() <= 0)
    throw std::domain_error("series sqrt: constant term must be positive");
  auto b0 = a0.exact_sqrt();
  if (!b0)
    throw std::domain_error("series sqrt: constant term is not a rational square");
  Series r(trunc_);
  r.exact_ = false;
  r.c_[0] = *b0;
  Rational two_b0 = Rational(2) * (*b0);
  for (int k = 1; k <= trunc_; ++k) {
    Rational conv;
    for (int i = 1; i < k; ++i) conv += r.c_[std::size_t(i)] * r.c_[std::size_t(k - i)];
    r.c_[std::size_t(k)] = (c_[std::size_t(k)] - conv) / two_b0;
  }
  return r;
}

Series Series::cos_of(const Series& u) {
  if (!u.stored_is_zero() && u.order() < 1)
    throw std::domain_error("series cos: argument must have positive order");
  int trunc = u.trunc();
  if (u.is_identically_zero()) return Series::constant(trunc, Rational(1));
  Series acc = Series::constant(trunc, Rational(1));
  Series upow = Series::constant(trunc, Rational(1));
  Rational fact(1);
  int sign = -1;
  for (int j = 2; j <= trunc; j += 2) {
    upow = upow * u * u;
    fact *= Rational(j - 1) * Rational(j);
    acc = acc + upow.scaled(Rational(sign) / fact);
    sign = -sign;
    if (upow.stored_is_zero()) break;
  }
  acc.mark_inexact();
  return acc;
}

Series Series::sin_of(const Series& u) {
  if (!u.stored_is_zero() && u.order() < 1)
    throw std::domain_error("series sin: argument must have positive order");
  int trunc = u.trunc();
  if (u.is_identically_zero()) return Series::constant(trunc, Rational(0));
  Series acc = u;
  Series upow = u;
  Rational fact(1);
  int sign = -1;
  for (int j = 3; j <= trunc; j += 2) {
    upow = upow * u * u;
    fact *= Rational(j - 1) * Rational(j);
    acc = acc + upow.scaled(Rational(sign) / fact);
    sign = -sign;
    if (upow.stored_is_zero()) break;
  }
  acc.mark_inexact();
  return acc;
}

double Series::eval(double s) const {
  double acc = 0.0;
  for (int k = trunc_; k >= 0; --k) acc = acc * s + c_[std::size_t(k)].to_double();
  return acc;
}

std::string Series::str() const {
  std::string out;
  for (int k = 0; k <= trunc_; ++k) {
    if (c_[std::size_t(k)].is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += c_[std::size_t(k)].str();
    if (k >= 1) out += "*s" + (k > 1 ? "^" + std::to_string(k) : "");
  }
  if (out.empty()) out = "0";
  if (!exact_) out += " + O(s^" + std::to_string(trunc_ + 1) + ")";
  return out;
}

Series series_dot(std::span<const Series> a, std::span<const Series> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("series_dot: length mismatch");
  Series acc = Series::constant(a[0].trunc(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

Series series_norm2(std::span<const Series> a) { return series_dot(a, a); }

}  // namespace smf
