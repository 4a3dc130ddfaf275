#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

// Small dense-vector helpers plus compensated (double-double) kernels used
// where a plain double expression would drown in cancellation.

namespace smf {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }
inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline Vec scaled(std::span<const double> a, double c) {
  Vec r(a.begin(), a.end());
  for (double& v : r) v *= c;
  return r;
}

inline Vec axpy(double c, std::span<const double> x, std::span<const double> y) {
  Vec r(y.begin(), y.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * x[i];
  return r;
}

// --- error-free transformations ------------------------------------------

struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  double e = std::fma(a, b, -p);
  return {p, e};
}

inline DD dd_add(DD x, DD y) {
  DD s = two_sum(x.hi, y.hi);
  s.lo += x.lo + y.lo;
  DD r = two_sum(s.hi, s.lo);
  return r;
}

inline DD dd_neg(DD x) { return {-x.hi, -x.lo}; }

inline DD dd_mul(DD x, DD y) {
  DD p = two_prod(x.hi, y.hi);
  p.lo += x.hi * y.lo + x.lo * y.hi;
  DD r = two_sum(p.hi, p.lo);
  return r;
}

// Dot product accumulated in doubled precision (Ogita-Rump-Oishi style).
inline DD dot2(std::span<const double> a, std::span<const double> b) {
  DD acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    DD p = two_prod(a[i], b[i]);
    DD s = two_sum(acc.hi, p.hi);
    acc.hi = s.hi;
    acc.lo += s.lo + p.lo;
  }
  DD r = two_sum(acc.hi, acc.lo);
  return r;
}

// |g|^2 |n|^2 - <g,n>^2, evaluated so that the result is accurate even when
// it is ~1e-30 of the operand scale.  Returns a plain double.
inline double gram_residual(std::span<const double> g, std::span<const double> n) {
  DD gg = dot2(g, g);
  DD nn = dot2(n, n);
  DD gn = dot2(g, n);
  DD r = dd_add(dd_mul(gg, nn), dd_neg(dd_mul(gn, gn)));
  return r.hi;
}

// --- tiny dense solver -----------------------------------------------------

// Solves A x = b in place (row-major n x n) with partial pivoting.
// Returns false when A is numerically singular.
inline bool solve_dense(std::vector<double> A, Vec b, Vec& x) {
  const std::size_t n = b.size();
  if (A.size() != n * n) throw std::invalid_argument("solve_dense: shape");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::fabs(A[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double v = std::fabs(A[r * n + col]);
      if (v > best) { best = v; piv = r; }
    }
    if (!(best > 0.0)) return false;
    if (piv != col) {
      for (std::size_t k = col; k < n; ++k) std::swap(A[piv * n + k], A[col * n + k]);
      std::swap(b[piv], b[col]);
    }
    double d = A[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = A[r * n + col] / d;
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) A[r * n + k] -= f * A[col * n + k];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t k = ri + 1; k < n; ++k) s -= A[ri * n + k] * x[k];
    x[ri] = s / A[ri * n + ri];
  }
  return true;
}

// Wraps an angle into [0, 2*pi).
inline double wrap_angle_2pi(double a) {
  const double two_pi = 6.283185307179586476925286766559;
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r == two_pi) r = 0.0;
  return r;
}

// Smallest-magnitude representative of a (mod 2*pi), in (-pi, pi].
inline double wrap_angle_pm_pi(double a) {
  const double two_pi = 6.283185307179586476925286766559;
  double r = std::remainder(a, two_pi);
  if (r <= -3.14159265358979323846) r += two_pi;
  return r;
}

}  // namespace smf
