#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "smf/rational.hpp"

namespace smf {

inline double next_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}
inline double next_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

// Closed interval with outward-rounded arithmetic.  Every operation widens by
// one ulp per rounding, so the true value of the represented expression is
// always contained in the result.  Tightness is not promised.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double v) { return {v, v}; }

  static Interval make(double a, double b) {
    return a <= b ? Interval{a, b} : Interval{b, a};
  }

  // Encloses an exact rational: rounds to double, then widens by 4 ulps to
  // absorb the conversion roundings.
  static Interval from_rational(const Rational& r) {
    double v = r.to_double();
    double lo = v, hi = v;
    for (int i = 0; i < 4; ++i) {
      lo = next_down(lo);
      hi = next_up(hi);
    }
    return {lo, hi};
  }

  static Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
  }

  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
  bool excludes_zero() const { return lo > 0.0 || hi < 0.0; }
  // distance from 0 to the interval; positive iff the interval excludes 0
  double zero_gap() const { return lo > 0.0 ? lo : (hi < 0.0 ? -hi : 0.0); }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }

  Interval operator-() const { return {-hi, -lo}; }

  Interval operator+(const Interval& o) const {
    return {next_down(lo + o.lo), next_up(hi + o.hi)};
  }
  Interval operator-(const Interval& o) const { return *this + (-o); }

  Interval operator*(const Interval& o) const {
    double p1 = lo * o.lo, p2 = lo * o.hi, p3 = hi * o.lo, p4 = hi * o.hi;
    double mn = std::min(std::min(p1, p2), std::min(p3, p4));
    double mx = std::max(std::max(p1, p2), std::max(p3, p4));
    return {next_down(mn), next_up(mx)};
  }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }

  Interval pow(unsigned n) const {
    if (n == 0) return point(1.0);
    if (n == 1) return *this;
    if (n % 2 == 1) {
      double l = lo >= 0.0 ? pow_down(lo, n) : -pow_up(-lo, n);
      double h = hi >= 0.0 ? pow_up(hi, n) : -pow_down(-hi, n);
      return {l, h};
    }
    double m = mag();
    if (contains_zero()) return {0.0, pow_up(m, n)};
    if (lo > 0.0) return {pow_down(lo, n), pow_up(hi, n)};
    return {pow_down(-hi, n), pow_up(-lo, n)};
  }

  Interval sqr() const { return pow(2); }

  std::string str() const {
    return "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  }

 private:
  // directed bounds of x^n for x >= 0
  static double pow_up(double x, unsigned n) {
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) r = next_up(r * x);
    return r;
  }
  static double pow_down(double x, unsigned n) {
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) r = std::max(0.0, next_down(r * x));
    return r;
  }
};

// Axis-aligned box: one interval per coordinate.
struct Box {
  std::vector<Interval> c;

  Box() = default;
  explicit Box(std::vector<Interval> coords) : c(std::move(coords)) {}

  static Box cube(int dim, double lo, double hi) {
    return Box(std::vector<Interval>(std::size_t(dim), Interval{lo, hi}));
  }
  static Box at_point(const std::vector<double>& x) {
    Box b;
    b.c.reserve(x.size());
    for (double v : x) b.c.push_back(Interval::point(v));
    return b;
  }

  int dim() const { return int(c.size()); }

  double max_width() const {
    double w = 0.0;
    for (const auto& iv : c) w = std::max(w, iv.width());
    return w;
  }

  int widest_axis() const {
    int k = 0;
    double w = -1.0;
    for (int i = 0; i < dim(); ++i) {
      if (c[std::size_t(i)].width() > w) {
        w = c[std::size_t(i)].width();
        k = i;
      }
    }
    return k;
  }

  std::vector<double> midpoint() const {
    std::vector<double> m(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) m[i] = c[i].mid();
    return m;
  }

  std::pair<Box, Box> split(int axis) const {
    Box a = *this, b = *this;
    const Interval& iv = c[std::size_t(axis)];
    double m = iv.mid();
    a.c[std::size_t(axis)] = {iv.lo, m};
    b.c[std::size_t(axis)] = {m, iv.hi};
    return {a, b};
  }

  bool intersects(const Box& o, double slack = 0.0) const {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].lo > o.c[i].hi + slack || o.c[i].lo > c[i].hi + slack) return false;
    }
    return true;
  }

  static Box hull(const Box& a, const Box& b) {
    Box h = a;
    for (std::size_t i = 0; i < h.c.size(); ++i) h.c[i] = Interval::hull(h.c[i], b.c[i]);
    return h;
  }
};

// Canonical ordering for reproducible witness lists.
inline bool box_less(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < a.c.size() && i < b.c.size(); ++i) {
    if (a.c[i].lo != b.c[i].lo) return a.c[i].lo < b.c[i].lo;
    if (a.c[i].hi != b.c[i].hi) return a.c[i].hi < b.c[i].hi;
  }
  return a.c.size() < b.c.size();
}

}  // namespace smf
