#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "smf/interval.hpp"
#include "smf/rational.hpp"

namespace smf {

class Series;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exponent vector of a single monomial.  Ordered graded-lexicographically so
// polynomials print (and hash) canonically.
struct Monomial {
  std::vector<unsigned> e;

  unsigned total_degree() const {
    unsigned d = 0;
    for (unsigned k : e) d += k;
    return d;
  }

  bool operator==(const Monomial&) const = default;

  bool operator<(const Monomial& o) const {
    unsigned da = total_degree(), db = o.total_degree();
    if (da != db) return da < db;
    return e < o.e;
  }
};

// Sparse multivariate polynomial with exact rational coefficients.
// Zero coefficients are never stored; all monomials share the dimension.
class Polynomial {
 public:
  explicit Polynomial(int dim = 0) : dim_(dim) {}

  static Polynomial zero(int dim) { return Polynomial(dim); }
  static Polynomial constant(int dim, const Rational& c);
  static Polynomial variable(int dim, int i);

  int dim() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  unsigned degree() const;  // 0 for the zero polynomial
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  // coefficient accumulation; drops the entry when it cancels to zero
  void add_term(const Monomial& mono, const Rational& coeff);
  Rational coefficient(const Monomial& mono) const;
  Rational constant_term() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Rational& c) const;
  Polynomial pow(unsigned n) const;

  bool operator==(const Polynomial& o) const = default;

  Polynomial derivative(int var) const;
  std::vector<Polynomial> gradient() const;

  double eval(std::span<const double> x) const;
  Interval eval(const Box& b) const;
  Rational eval_exact(std::span<const Rational> x) const;
  Series compose(std::span<const Series> curve) const;

  std::string str() const;
  static Polynomial parse(const std::string& text, int dim);
  // custom variable names (used for curves in the parameter s)
  static Polynomial parse(const std::string& text, int dim,
                          const std::vector<std::string>& names);
  std::string str(const std::vector<std::string>& names) const;

 private:
  int dim_;
  std::map<Monomial, Rational> terms_;
  void check_dim(const Polynomial& o) const;
};

// <a, b> for polynomial vectors
Polynomial poly_dot(std::span<const Polynomial> a, std::span<const Polynomial> b);
// sum of squares of the components
Polynomial poly_norm2(std::span<const Polynomial> a);
// sum_i x_i^2 in dimension m
Polynomial radius2_poly(int m);

}  // namespace smf
