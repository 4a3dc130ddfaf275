#include "smf/polynomial.hpp"

#include <algorithm>
#include <cctype>

#include "smf/series.hpp"

namespace smf {

namespace {

std::vector<std::string> default_names(int dim) {
  if (dim >= 1 && dim <= 4) {
    static const std::vector<std::string> alias{"x", "y", "z", "w"};
    return {alias.begin(), alias.begin() + dim};
  }
  std::vector<std::string> names;
  names.reserve(std::size_t(dim));
  for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

// resolves a variable name against the alias table and x<k> forms
int var_index(const std::string& name, int dim) {
  static const std::vector<std::string> alias{"x", "y", "z", "w"};
  if (dim <= 4) {
    for (int i = 0; i < dim; ++i)
      if (name == alias[std::size_t(i)]) return i;
  }
  if (name.size() >= 2 && name[0] == 'x') {
    bool digits = true;
    for (std::size_t i = 1; i < name.size(); ++i) digits = digits && std::isdigit(name[i]);
    if (digits) {
      int k = std::stoi(name.substr(1));
      if (k >= 1 && k <= dim) return k - 1;
    }
  }
  return -1;
}

}  // namespace

Polynomial Polynomial::constant(int dim, const Rational& c) {
  Polynomial p(dim);
  p.add_term(Monomial{std::vector<unsigned>(std::size_t(dim), 0u)}, c);
  return p;
}

Polynomial Polynomial::variable(int dim, int i) {
  if (i < 0 || i >= dim) throw DimensionError("polynomial: variable index out of range");
  Monomial m{std::vector<unsigned>(std::size_t(dim), 0u)};
  m.e[std::size_t(i)] = 1;
  Polynomial p(dim);
  p.add_term(m, Rational(1));
  return p;
}

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree());
  return d;
}

void Polynomial::add_term(const Monomial& mono, const Rational& coeff) {
  if (int(mono.e.size()) != dim_) throw DimensionError("polynomial: monomial dimension");
  if (coeff.is_zero()) return;
  auto it = terms_.find(mono);
  if (it == terms_.end()) {
    terms_.emplace(mono, coeff);
    return;
  }
  it->second += coeff;
  if (it->second.is_zero()) terms_.erase(it);
}

Rational Polynomial::coefficient(const Monomial& mono) const {
  auto it = terms_.find(mono);
  return it == terms_.end() ? Rational() : it->second;
}

Rational Polynomial::constant_term() const {
  return coefficient(Monomial{std::vector<unsigned>(std::size_t(dim_), 0u)});
}

void Polynomial::check_dim(const Polynomial& o) const {
  if (dim_ != o.dim_) throw DimensionError("polynomial: dimension mismatch");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_dim(o);
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  check_dim(o);
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(dim_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_dim(o);
  Polynomial r(dim_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m = ma;
      for (std::size_t i = 0; i < m.e.size(); ++i) m.e[i] += mb.e[i];
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial r(dim_);
  if (c.is_zero()) return r;
  for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
  return r;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial r = Polynomial::constant(dim_, Rational(1));
  Polynomial base = *this;
  while (n != 0) {
    if (n & 1u) r = r * base;
    n >>= 1;
    if (n != 0) base = base * base;
  }
  return r;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= dim_) throw DimensionError("polynomial: derivative index");
  Polynomial r(dim_);
  for (const auto& [m, c] : terms_) {
    unsigned e = m.e[std::size_t(var)];
    if (e == 0) continue;
    Monomial d = m;
    d.e[std::size_t(var)] = e - 1;
    r.add_term(d, c * Rational((long long)e));
  }
  return r;
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> g;
  g.reserve(std::size_t(dim_));
  for (int i = 0; i < dim_; ++i) g.push_back(derivative(i));
  return g;
}

double Polynomial::eval(std::span<const double> x) const {
  if (int(x.size()) != dim_) throw DimensionError("polynomial: eval point dimension");
  std::vector<unsigned> maxe(std::size_t(dim_), 0u);
  for (const auto& [m, c] : terms_)
    for (int i = 0; i < dim_; ++i) maxe[std::size_t(i)] = std::max(maxe[std::size_t(i)], m.e[std::size_t(i)]);
  std::vector<std::vector<double>> pw{std::size_t(dim_), std::vector<double>{}};
  for (int i = 0; i < dim_; ++i) {
    pw[std::size_t(i)].resize(maxe[std::size_t(i)] + 1);
    pw[std::size_t(i)][0] = 1.0;
    for (unsigned e = 1; e <= maxe[std::size_t(i)]; ++e)
      pw[std::size_t(i)][e] = pw[std::size_t(i)][e - 1] * x[std::size_t(i)];
  }
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.to_double();
    for (int i = 0; i < dim_; ++i) t *= pw[std::size_t(i)][m.e[std::size_t(i)]];
    acc += t;
  }
  return acc;
}

Interval Polynomial::eval(const Box& b) const {
  if (b.dim() != dim_) throw DimensionError("polynomial: eval box dimension");
  std::vector<unsigned> maxe(std::size_t(dim_), 0u);
  for (const auto& [m, c] : terms_)
    for (int i = 0; i < dim_; ++i) maxe[std::size_t(i)] = std::max(maxe[std::size_t(i)], m.e[std::size_t(i)]);
  std::vector<std::vector<Interval>> pw{std::size_t(dim_), std::vector<Interval>{}};
  for (int i = 0; i < dim_; ++i) {
    pw[std::size_t(i)].resize(maxe[std::size_t(i)] + 1);
    for (unsigned e = 0; e <= maxe[std::size_t(i)]; ++e)
      pw[std::size_t(i)][e] = b.c[std::size_t(i)].pow(e);
  }
  Interval acc = Interval::point(0.0);
  for (const auto& [m, c] : terms_) {
    Interval t = Interval::from_rational(c);
    for (int i = 0; i < dim_; ++i) t *= pw[std::size_t(i)][m.e[std::size_t(i)]];
    acc += t;
  }
  return acc;
}

Rational Polynomial::eval_exact(std::span<const Rational> x) const {
  if (int(x.size()) != dim_) throw DimensionError("polynomial: eval point dimension");
  Rational acc;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < dim_; ++i) t *= x[std::size_t(i)].pow(m.e[std::size_t(i)]);
    acc += t;
  }
  return acc;
}

Series Polynomial::compose(std::span<const Series> curve) const {
  if (int(curve.size()) != dim_) throw DimensionError("polynomial: compose dimension");
  int trunc = curve.empty() ? 16 : curve[0].trunc();
  std::vector<unsigned> maxe(std::size_t(dim_), 0u);
  for (const auto& [m, c] : terms_)
    for (int i = 0; i < dim_; ++i) maxe[std::size_t(i)] = std::max(maxe[std::size_t(i)], m.e[std::size_t(i)]);
  std::vector<std::vector<Series>> pw{std::size_t(dim_), std::vector<Series>{}};
  for (int i = 0; i < dim_; ++i) {
    pw[std::size_t(i)].reserve(maxe[std::size_t(i)] + 1);
    pw[std::size_t(i)].push_back(Series::constant(trunc, Rational(1)));
    for (unsigned e = 1; e <= maxe[std::size_t(i)]; ++e)
      pw[std::size_t(i)].push_back(pw[std::size_t(i)].back() * curve[std::size_t(i)]);
  }
  Series acc = Series::constant(trunc, Rational(0));
  for (const auto& [m, c] : terms_) {
    Series t = Series::constant(trunc, c);
    for (int i = 0; i < dim_; ++i) t = t * pw[std::size_t(i)][m.e[std::size_t(i)]];
    acc = acc + t;
  }
  return acc;
}

// --- printing ---------------------------------------------------------------

std::string Polynomial::str() const { return str(default_names(dim_)); }

std::string Polynomial::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::string out;
  // highest graded-lex term first
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = c;
    if (out.empty()) {
      if (a.sign() < 0) {
        out += "-";
        a = -a;
      }
    } else {
      out += a.sign() < 0 ? " - " : " + ";
      if (a.sign() < 0) a = -a;
    }
    bool has_vars = m.total_degree() > 0;
    bool unit = a.is_one();
    if (!unit || !has_vars) out += a.str();
    bool first_factor = !(!unit || !has_vars);
    for (int i = 0; i < dim_; ++i) {
      unsigned e = m.e[std::size_t(i)];
      if (e == 0) continue;
      if (!first_factor) out += "*";
      out += names[std::size_t(i)];
      if (e > 1) out += "^" + std::to_string(e);
      first_factor = false;
    }
  }
  return out;
}

// --- parsing ----------------------------------------------------------------

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;
  int dim;
  const std::vector<std::string>* names;  // optional custom names

  void skip_ws() {
    while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("parse error at position " + std::to_string(pos) + ": " + what +
                     " in \"" + s + "\"");
  }

  Polynomial parse_expr() {
    Polynomial acc = parse_term_signed();
    while (true) {
      if (accept('+')) {
        acc = acc + parse_term();
      } else if (accept('-')) {
        acc = acc - parse_term();
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial parse_term_signed() {
    skip_ws();
    bool neg = false;
    while (accept('-')) neg = !neg;
    Polynomial t = parse_term();
    return neg ? -t : t;
  }

  Polynomial parse_term() {
    Polynomial acc = parse_factor();
    while (accept('*')) acc = acc * parse_factor();
    return acc;
  }

  Polynomial parse_factor() {
    Polynomial base = parse_base();
    skip_ws();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
      if (start == pos) fail("expected exponent");
      base = base.pow(unsigned(std::stoul(s.substr(start, pos - start))));
    }
    return base;
  }

  Polynomial parse_base() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      Polynomial inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos;
      return -parse_factor();
    }
    if (std::isdigit((unsigned char)c)) return parse_number();
    if (std::isalpha((unsigned char)c)) return parse_variable();
    fail("unexpected character");
  }

  Polynomial parse_number() {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
    std::string num = s.substr(start, pos - start);
    skip_ws();
    if (pos < s.size() && s[pos] == '/') {
      ++pos;
      skip_ws();
      std::size_t dstart = pos;
      while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
      if (dstart == pos) fail("expected denominator");
      num += "/" + s.substr(dstart, pos - dstart);
    }
    return Polynomial::constant(dim, Rational::parse(num));
  }

  Polynomial parse_variable() {
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum((unsigned char)s[pos]) || s[pos] == '_'))
      ++pos;
    std::string name = s.substr(start, pos - start);
    if (names != nullptr) {
      for (int i = 0; i < dim; ++i)
        if ((*names)[std::size_t(i)] == name) return Polynomial::variable(dim, i);
      fail("unknown variable '" + name + "'");
    }
    int idx = var_index(name, dim);
    if (idx < 0) fail("unknown variable '" + name + "'");
    return Polynomial::variable(dim, idx);
  }
};

}  // namespace

Polynomial Polynomial::parse(const std::string& text, int dim) {
  Parser p{text, 0, dim, nullptr};
  Polynomial r = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters");
  return r;
}

Polynomial Polynomial::parse(const std::string& text, int dim,
                             const std::vector<std::string>& names) {
  Parser p{text, 0, dim, &names};
  Polynomial r = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters");
  return r;
}

// --- vector helpers ----------------------------------------------------------

Polynomial poly_dot(std::span<const Polynomial> a, std::span<const Polynomial> b) {
  if (a.size() != b.size() || a.empty())
    throw DimensionError("poly_dot: length mismatch");
  Polynomial acc = Polynomial::zero(a[0].dim());
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

Polynomial poly_norm2(std::span<const Polynomial> a) { return poly_dot(a, a); }

Polynomial radius2_poly(int m) {
  Polynomial acc = Polynomial::zero(m);
  for (int i = 0; i < m; ++i) {
    Polynomial xi = Polynomial::variable(m, i);
    acc = acc + xi * xi;
  }
  return acc;
}

}  // namespace smf
