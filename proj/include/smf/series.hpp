#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smf/rational.hpp"

namespace smf {

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Truncated univariate power series in s with exact rational coefficients.
//
// `exact()` means the represented function is exactly the stored polynomial
// (all coefficients above the truncation degree are zero).  Products of exact
// series stay exact while their true degree fits under the truncation; square
// roots and trig compositions are inexact by nature.  Order queries on an
// inexact series that is zero through the truncation degree cannot be decided
// and throw TruncationError (callers retry with a larger truncation).
class Series {
 public:
  explicit Series(int trunc = 16)
      : trunc_(trunc), exact_(true), c_(std::size_t(trunc) + 1) {}

  static Series constant(int trunc, const Rational& v);
  static Series variable(int trunc);  // the series "s"
  // coefficients low to high; trailing ones beyond trunc must be zero
  static Series from_coeffs(int trunc, const std::vector<Rational>& coeffs);

  int trunc() const { return trunc_; }
  bool exact() const { return exact_; }
  void mark_inexact() { exact_ = false; }

  const Rational& coeff(int k) const { return c_[std::size_t(k)]; }
  void set_coeff(int k, const Rational& v) { c_[std::size_t(k)] = v; }

  // highest stored nonzero degree, -1 when all stored coefficients vanish
  int degree() const;
  bool stored_is_zero() const { return degree() < 0; }
  // identically zero as a function (only decidable for exact series)
  bool is_identically_zero() const { return exact_ && stored_is_zero(); }

  // order of the first nonzero coefficient; throws TruncationError when the
  // series is zero through trunc() but not known to vanish identically.
  // Returns -1 for the identically-zero function ("order infinity").
  int order() const;
  Rational leading() const;  // coefficient at order(); 0 for identically zero

  Series operator+(const Series& o) const;
  Series operator-(const Series& o) const;
  Series operator-() const;
  Series operator*(const Series& o) const;
  Series scaled(const Rational& v) const;
  Series pow(unsigned n) const;

  // sqrt of a series whose constant term is a positive perfect square
  Series sqrt() const;
  // cos/sin composed with a series of order >= 1
  static Series cos_of(const Series& u);
  static Series sin_of(const Series& u);

  double eval(double s) const;
  std::string str() const;

 private:
  int trunc_;
  bool exact_;
  std::vector<Rational> c_;
  static std::pair<Series, Series> aligned(const Series& a, const Series& b);
};

Series series_dot(std::span<const Series> a, std::span<const Series> b);
Series series_norm2(std::span<const Series> a);

}  // namespace smf
