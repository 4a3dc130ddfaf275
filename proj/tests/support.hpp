#pragma once

// Shared oracles and generators for the test suites.  Everything here is
// independent of the library code paths it cross-checks: finite differences,
// dense grid scans, closed forms.

#include <cmath>
#include <random>
#include <vector>

#include "smf/germ.hpp"
#include "smf/numeric.hpp"
#include "smf/polynomial.hpp"

namespace smf::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::vector<double> random_point_in(const Box& b, std::mt19937_64& g) {
  std::vector<double> x(b.c.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = uniform(g, b.c[i].lo, b.c[i].hi);
  return x;
}

inline std::vector<double> random_annulus_point(int m, double rin, double rout,
                                                std::mt19937_64& g) {
  std::normal_distribution<double> nd(0.0, 1.0);
  while (true) {
    std::vector<double> x(std::size_t(m), 0.0);
    double n2 = 0.0;
    for (double& v : x) {
      v = nd(g);
      n2 += v * v;
    }
    if (!(n2 > 1e-12)) continue;
    double r = uniform(g, rin, rout);
    double f = r / std::sqrt(n2);
    for (double& v : x) v *= f;
    return x;
  }
}

inline std::vector<double> random_sphere_point(int m, double radius,
                                               std::mt19937_64& g) {
  return random_annulus_point(m, radius, radius, g);
}

// small random polynomial with integer coefficients in [-4, 4]
inline Polynomial random_poly(int dim, unsigned max_deg, std::mt19937_64& g) {
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<unsigned> expo(0, max_deg);
  Polynomial p(dim);
  int terms = 1 + int(g() % 6);
  for (int t = 0; t < terms; ++t) {
    Monomial mono{std::vector<unsigned>(std::size_t(dim), 0u)};
    unsigned budget = max_deg;
    for (int i = 0; i < dim; ++i) {
      unsigned e = expo(g) % (budget + 1);
      mono.e[std::size_t(i)] = e;
      budget -= e;
    }
    p.add_term(mono, Rational(coeff(g)));
  }
  return p;
}

// central finite difference of p along coordinate i
inline double fd_partial(const Polynomial& p, std::vector<double> x, int i,
                         double h) {
  x[std::size_t(i)] += h;
  double up = p.eval(x);
  x[std::size_t(i)] -= 2 * h;
  double dn = p.eval(x);
  return (up - dn) / (2 * h);
}

// dense theta-grid oracle for the all-theta angle measure
// max over theta of |<grad Psi_theta(x)/|grad Psi_theta(x)|, x/|x||>|
inline double theta_grid_measure(const MapGerm& g, std::span<const double> x,
                                 int grid) {
  const double pi = 3.14159265358979323846;
  double nx = norm(x);
  double best = 0.0;
  std::vector<double> gp(std::size_t(g.m()), 0.0), gq(std::size_t(g.m()), 0.0);
  for (int i = 0; i < g.m(); ++i) {
    gp[std::size_t(i)] = g.dP()[std::size_t(i)].eval(x);
    gq[std::size_t(i)] = g.dQ()[std::size_t(i)].eval(x);
  }
  for (int k = 0; k < grid; ++k) {
    double th = pi * double(k) / grid;
    double c = std::cos(th), s = std::sin(th);
    double dd = 0.0, nn = 0.0;
    for (int i = 0; i < g.m(); ++i) {
      double gi = c * gp[std::size_t(i)] - s * gq[std::size_t(i)];
      dd += gi * x[std::size_t(i)];
      nn += gi * gi;
    }
    if (nn > 0.0) best = std::max(best, std::fabs(dd) / (std::sqrt(nn) * nx));
  }
  return best;
}

// Angular-grid oracle for critical points of psi/|psi| on a circle (m = 2):
// scans the sign of f(phi) = <gamma(x), x_perp> and returns the bracketing
// intervals [phi_k, phi_{k+1}] where it changes sign.
struct AngularBracket {
  double lo, hi;
};

inline std::vector<AngularBracket> circle_sign_brackets(const MapGerm& g,
                                                        double radius,
                                                        int grid) {
  const double two_pi = 6.283185307179586476925286766559;
  auto f = [&](double phi) {
    double x = radius * std::cos(phi), y = radius * std::sin(phi);
    std::vector<double> pt{x, y};
    auto gm = g.gamma_eval(pt);
    return -gm[0] * y + gm[1] * x;  // <gamma, (-y, x)> up to sign convention
  };
  std::vector<AngularBracket> out;
  double prev_phi = 0.0;
  double prev = f(0.0);
  for (int k = 1; k <= grid; ++k) {
    double phi = two_pi * double(k) / grid;
    double val = f(phi);
    if (prev != 0.0 && val != 0.0 && std::signbit(prev) != std::signbit(val))
      out.push_back({prev_phi, phi});
    prev = val;
    prev_phi = phi;
  }
  return out;
}

}  // namespace smf::test
