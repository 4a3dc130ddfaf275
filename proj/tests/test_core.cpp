#include "doctest.h"

#include <cmath>

#include "smf/interval.hpp"
#include "smf/polynomial.hpp"
#include "smf/rational.hpp"
#include "smf/series.hpp"
#include "support.hpp"

using namespace smf;

TEST_CASE("rational basics") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK((Rational(2, 3) * Rational(9, 4)) == Rational(3, 2));
  CHECK((Rational(1) / Rational(-2)) == Rational(-1, 2));
  CHECK(Rational(-4, 8).str() == "-1/2");
  CHECK(Rational::parse("-7/21") == Rational(-1, 3));
  CHECK(Rational::parse("42") == Rational(42));
  CHECK(Rational(3, 2) > Rational(4, 3));
  CHECK(Rational(0).is_zero());
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("rational from_double is exact") {
  for (double v : {0.5, -0.1, 0.3333333333333333, 1e-8, 123.456}) {
    Rational r = Rational::from_double(v);
    CHECK(r.to_double() == v);
  }
  CHECK(Rational::from_double(0.25) == Rational(1, 4));
  CHECK(Rational::from_double(-3.0) == Rational(-3));
}

TEST_CASE("rational exact sqrt") {
  CHECK(*Rational(9, 4).exact_sqrt() == Rational(3, 2));
  CHECK(*Rational(1, 100).exact_sqrt() == Rational(1, 10));
  CHECK(!Rational(2).exact_sqrt().has_value());
  CHECK(!Rational(-4).exact_sqrt().has_value());
}

TEST_CASE("rational overflow detection") {
  Rational big = Rational(1000000007).pow(3);  // ~1e27, fits
  CHECK_THROWS_AS(big * big * big * big * big, std::overflow_error);
}

TEST_CASE("interval arithmetic is outward") {
  Interval a{1.0, 2.0}, b{-3.0, 0.5};
  Interval s = a + b;
  CHECK(s.lo <= -2.0);
  CHECK(s.hi >= 2.5);
  Interval p = a * b;
  CHECK(p.lo <= -6.0);
  CHECK(p.hi >= 1.0);
  Interval sq = Interval{-1.0, 1.0}.pow(2);
  CHECK(sq.lo == 0.0);  // even powers stay nonnegative
  CHECK(sq.hi >= 1.0);
  Interval cube = Interval{-2.0, 3.0}.pow(3);
  CHECK(cube.lo <= -8.0);
  CHECK(cube.hi >= 27.0);
  CHECK(Interval{0.0, 0.0}.pow(0).lo == 1.0);
}

TEST_CASE("polynomial arithmetic examples") {
  Polynomial x = Polynomial::variable(2, 0);
  CHECK((x + x.scaled(Rational(-1))).is_zero());

  // hand expansion: x*(x^2 + y x^2 + y^3) = x^3 + x^3 y + x y^3
  Polynomial q = Polynomial::parse("x^2 + y*(x^2 + y^2)", 2);
  CHECK(x * q == Polynomial::parse("x^3 + x^3*y + x*y^3", 2));

  CHECK(x.scaled(Rational(0)).is_zero());
}

TEST_CASE("polynomial point evaluation") {
  Polynomial p = Polynomial::parse("x", 2);
  CHECK(p.eval(std::vector<double>{1.0, 2.0}) == 1.0);

  Polynomial q52 = Polynomial::parse("y*x^2 + y^3", 2);
  CHECK(q52.eval(std::vector<double>{1.0, 1.0}) == 2.0);

  // Q(0, t) = t^3, checked exactly at rational points
  Polynomial q11 = Polynomial::parse("x^2 + y*(x^2 + y^2)", 2);
  for (long long num = -5; num <= 5; ++num) {
    Rational t(num, 3);
    std::vector<Rational> pt{Rational(0), t};
    CHECK(q11.eval_exact(pt) == t.pow(3));
  }
}

TEST_CASE("interval evaluation containment examples") {
  Polynomial sq = Polynomial::parse("x^2", 1);
  Interval e = sq.eval(Box{{Interval{-1.0, 1.0}}});
  CHECK(e.lo <= 0.0);
  CHECK(e.hi >= 1.0);

  Polynomial zero = Polynomial::parse("x - x", 1);
  CHECK(zero.eval(Box{{Interval{3.0, 4.0}}}).contains_zero());

  Polynomial r2 = Polynomial::parse("x^2 + y^2", 2);
  Interval er = r2.eval(Box{{Interval{0.5, 1.0}, Interval{0.5, 1.0}}});
  CHECK(er.lo <= 0.5);
  CHECK(er.hi >= 2.0);
  CHECK(er.lo > 0.4);  // not absurdly loose either
}

TEST_CASE("containment property: exact value inside interval enclosure") {
  auto g = test::rng(101);
  for (int iter = 0; iter < 1000; ++iter) {
    int dim = 1 + int(g() % 3);
    Polynomial p = test::random_poly(dim, 4, g);
    // box corners and sample point live on the 1/1024 grid so the exact
    // evaluation stays comfortably inside the 128-bit coefficient range
    auto snap = [](double v) { return std::floor(v * 1024.0) / 1024.0; };
    Box b;
    for (int i = 0; i < dim; ++i) {
      double lo = snap(test::uniform(g, -2.0, 2.0));
      double wid = snap(test::uniform(g, 0.0, 1.5));
      b.c.push_back(Interval{lo, lo + wid});
    }
    Interval e = p.eval(b);
    std::vector<double> xd = test::random_point_in(b, g);
    std::vector<Rational> xr;
    for (double& v : xd) {
      v = std::max(b.c[xr.size()].lo, snap(v));
      xr.push_back(Rational::from_double(v));
    }
    Rational exact = p.eval_exact(xr);
    // endpoints outward-rounded from an exact zero can be subnormal; every
    // nonzero exact value on the 1/1024 grid has magnitude >= 2^-44, so
    // flushing |d| < 1e-16 to zero cannot flip a comparison
    auto to_rat = [](double d) {
      return std::fabs(d) < 1e-16 ? Rational(0) : Rational::from_double(d);
    };
    CHECK(to_rat(e.lo) <= exact);
    CHECK(exact <= to_rat(e.hi));
  }
}

TEST_CASE("subdivision monotonicity up to rounding slack") {
  auto g = test::rng(202);
  for (int iter = 0; iter < 200; ++iter) {
    int dim = 1 + int(g() % 3);
    Polynomial p = test::random_poly(dim, 4, g);
    Box b;
    for (int i = 0; i < dim; ++i) {
      double lo = test::uniform(g, -2.0, 2.0);
      b.c.push_back(Interval{lo, lo + test::uniform(g, 0.1, 1.0)});
    }
    auto [b1, b2] = b.split(b.widest_axis());
    Interval whole = p.eval(b);
    Interval parts = Interval::hull(p.eval(b1), p.eval(b2));
    double slack = 1e-12 * (1.0 + whole.mag());
    CHECK(parts.lo >= whole.lo - slack);
    CHECK(parts.hi <= whole.hi + slack);
  }
}

TEST_CASE("gradient examples") {
  Polynomial q52 = Polynomial::parse("y*x^2 + y^3", 2);
  auto grad = q52.gradient();
  CHECK(grad[0] == Polynomial::parse("2*x*y", 2));
  CHECK(grad[1] == Polynomial::parse("x^2 + 3*y^2", 2));

  Polynomial c = Polynomial::constant(3, Rational(7));
  for (const auto& d : c.gradient()) CHECK(d.is_zero());

  Polynomial p53 = Polynomial::parse("z*(x^2 + y^2 + z^2)", 3);
  auto g53 = p53.gradient();
  CHECK(g53[0] == Polynomial::parse("2*x*z", 3));
  CHECK(g53[1] == Polynomial::parse("2*y*z", 3));
  CHECK(g53[2] == Polynomial::parse("x^2 + y^2 + 3*z^2", 3));
}

TEST_CASE("gradient properties: product rule and finite differences") {
  auto g = test::rng(303);
  for (int iter = 0; iter < 60; ++iter) {
    int dim = 2 + int(g() % 2);
    Polynomial p = test::random_poly(dim, 3, g);
    Polynomial q = test::random_poly(dim, 3, g);
    auto gp = p.gradient(), gq = q.gradient(), gpq = (p * q).gradient();
    for (int i = 0; i < dim; ++i)
      CHECK(gpq[std::size_t(i)] ==
            p * gq[std::size_t(i)] + q * gp[std::size_t(i)]);
  }
  for (int iter = 0; iter < 60; ++iter) {
    int dim = 2 + int(g() % 2);
    Polynomial p = test::random_poly(dim, 4, g);
    std::vector<double> x;
    for (int i = 0; i < dim; ++i) x.push_back(test::uniform(g, -1.0, 1.0));
    auto grad = p.gradient();
    for (int i = 0; i < dim; ++i) {
      double sym = grad[std::size_t(i)].eval(x);
      double fd = test::fd_partial(p, x, i, 1e-6);
      CHECK(std::fabs(sym - fd) <= 1e-4 * (1.0 + std::fabs(sym)));
    }
  }
}

TEST_CASE("series composition examples") {
  // p = x along (s, s^2)
  Polynomial p = Polynomial::parse("x", 2);
  std::vector<Series> curve{Series::variable(16), Series::variable(16).pow(2)};
  Series comp = p.compose(curve);
  CHECK(comp.order() == 1);
  CHECK(comp.leading() == Rational(1));

  // order additivity: (x*y) along (s^2, s^3) -> s^5
  Polynomial pq = Polynomial::parse("x*y", 2);
  std::vector<Series> c2{Series::variable(16).pow(2), Series::variable(16).pow(3)};
  Series comp2 = pq.compose(c2);
  CHECK(comp2.order() == 5);

  // x^2 + y^2 along (s, s) -> 2 s^2
  Polynomial r2 = Polynomial::parse("x^2 + y^2", 2);
  std::vector<Series> c3{Series::variable(16), Series::variable(16)};
  Series comp3 = r2.compose(c3);
  CHECK(comp3.order() == 2);
  CHECK(comp3.leading() == Rational(2));
}

TEST_CASE("series order bookkeeping") {
  Series z(8);
  CHECK(z.is_identically_zero());
  CHECK(z.order() == -1);

  Series s = Series::variable(8);
  CHECK((s * s).order() == 2);
  CHECK((s - s).is_identically_zero());

  // inexact all-zero series cannot decide its order
  Series inexact = Series::variable(8);
  inexact.mark_inexact();
  Series zz = inexact - Series::variable(8);
  CHECK_THROWS_AS(zz.order(), TruncationError);

  // product order additivity for random monomial series
  auto g = test::rng(404);
  for (int iter = 0; iter < 100; ++iter) {
    int oa = 1 + int(g() % 4), ob = 1 + int(g() % 4);
    Series a = Series::variable(20).pow(unsigned(oa));
    Series b = Series::variable(20).pow(unsigned(ob)).scaled(Rational(3));
    CHECK((a * b).order() == oa + ob);
  }
}

TEST_CASE("series sqrt and trig") {
  // sqrt(1/100 - s^2) has rational coefficients; squaring recovers the input
  Series s = Series::variable(12);
  Series arg = Series::constant(12, Rational(1, 100)) - s * s;
  Series root = arg.sqrt();
  CHECK(root.coeff(0) == Rational(1, 10));
  Series back = root * root;
  for (int k = 0; k <= 12; ++k) CHECK(back.coeff(k) == arg.coeff(k));

  // cos^2 + sin^2 = 1 through the truncation degree
  Series u = Series::variable(14) + Series::variable(14).pow(3).scaled(Rational(1, 2));
  Series c = Series::cos_of(u), sn = Series::sin_of(u);
  Series one = c * c + sn * sn;
  CHECK(one.coeff(0) == Rational(1));
  for (int k = 1; k <= 14; ++k) CHECK(one.coeff(k) == Rational(0));
}

TEST_CASE("polynomial parse/print round trip") {
  auto g = test::rng(505);
  for (int iter = 0; iter < 200; ++iter) {
    int dim = 1 + int(g() % 5);  // covers both alias and indexed naming
    Polynomial p = test::random_poly(dim, 5, g);
    CHECK(Polynomial::parse(p.str(), dim) == p);
  }
  // rational coefficients survive the round trip
  Polynomial p = Polynomial::parse("3/2*x^2*y - 7/3*y + 1/4", 2);
  CHECK(Polynomial::parse(p.str(), 2) == p);
}

TEST_CASE("parser errors") {
  CHECK_THROWS_AS(Polynomial::parse("x + ", 2), ParseError);
  CHECK_THROWS_AS(Polynomial::parse("q", 2), ParseError);
  CHECK_THROWS_AS(Polynomial::parse("(x", 2), ParseError);
  CHECK_THROWS_AS(Polynomial::parse("z", 2), ParseError);   // z needs m >= 3
  CHECK_NOTHROW(Polynomial::parse("x3", 3));                // indexed names
  CHECK(Polynomial::parse("x1", 2) == Polynomial::parse("x", 2));
}

TEST_CASE("dimension mismatch errors") {
  Polynomial a = Polynomial::parse("x", 2);
  Polynomial b = Polynomial::parse("x", 3);
  CHECK_THROWS_AS(a + b, DimensionError);
  CHECK_THROWS_AS(a.eval(std::vector<double>{1.0, 2.0, 3.0}), DimensionError);
}
