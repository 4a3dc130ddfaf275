#include "smf/strata.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>
#include <limits>

#include "smf/numeric.hpp"

namespace smf {

namespace {

constexpr int kTruncStart = 16;
constexpr int kTruncMax = 256;

const std::vector<std::string> kSVar{"s"};

std::vector<Rational> poly_string_to_coeffs(const std::string& text) {
  Polynomial p = Polynomial::parse(text, 1, kSVar);
  std::vector<Rational> coeffs(p.degree() + 1);
  for (const auto& [mono, c] : p.terms()) coeffs[mono.e[0]] = c;
  return coeffs;
}

struct AngleConst {
  Rational cos0;
  Rational sin0;
  bool exact;  // quarter-turn multiple
};

// "pi/2", "3*pi/4", "-pi", "0", "0.61547", "2/5*pi" ...
AngleConst parse_angle(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace((unsigned char)ch)) t.push_back(ch);
  if (t.empty()) throw ParseError("angle: empty");
  auto at_pi = t.find("pi");
  if (at_pi == std::string::npos) {
    double v = std::stod(t);
    return {Rational::from_double(std::cos(v)), Rational::from_double(std::sin(v)),
            false};
  }
  // numerator part before "pi" ("", "-", "a*", "a/b*")
  Rational mult(1);
  try {
    std::string pre = t.substr(0, at_pi);
    if (!pre.empty()) {
      if (pre == "-") {
        mult = Rational(-1);
      } else {
        if (pre.back() != '*') throw ParseError("angle: expected '*' before pi");
        mult = Rational::parse(pre.substr(0, pre.size() - 1));
      }
    }
    std::string post = t.substr(at_pi + 2);
    if (!post.empty()) {
      if (post[0] != '/') throw ParseError("angle: unexpected text after pi");
      mult /= Rational::parse(post.substr(1));
    }
  } catch (const std::invalid_argument&) {
    throw ParseError("angle '" + text + "': want a rational multiple of pi "
                     "(like 3*pi/4) or a plain decimal");
  }
  // quarter-turn multiples have exact cos/sin
  Rational twice = mult * Rational(2);
  if (twice.denominator() == 1) {
    long long k = (long long)(twice.numerator() % 4);
    if (k < 0) k += 4;
    static const int cs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {Rational(cs[k][0]), Rational(cs[k][1]), true};
  }
  double v = mult.to_double() * 3.14159265358979323846;
  return {Rational::from_double(std::cos(v)), Rational::from_double(std::sin(v)),
          false};
}

}  // namespace

// --- TestCurve -----------------------------------------------------------------

TestCurve TestCurve::from_spec(const CurveSpec& spec, int m) {
  TestCurve c;
  c.m_ = m;
  c.label_ = spec.label;
  if (int(spec.coords.size()) != m)
    throw DimensionError("curve: expected " + std::to_string(m) + " coordinates");
  for (const auto& text : spec.coords)
    c.coord_coeffs_.push_back(poly_string_to_coeffs(text));

  if (!spec.cos_theta.empty() || !spec.sin_theta.empty()) {
    if (spec.cos_theta.empty() || spec.sin_theta.empty())
      throw ParseError("curve: cos_theta and sin_theta must both be given");
    c.direction_form_ = true;
    c.cos_coeffs_ = poly_string_to_coeffs(spec.cos_theta);
    c.sin_coeffs_ = poly_string_to_coeffs(spec.sin_theta);
    c.theta_desc_ = "direction (" + spec.cos_theta + ", " + spec.sin_theta + ")";
    return c;
  }
  AngleConst a = parse_angle(spec.theta.empty() ? "0" : spec.theta);
  c.cos0_ = a.cos0;
  c.sin0_ = a.sin0;
  c.theta_desc_ = "theta = " + (spec.theta.empty() ? "0" : spec.theta);
  if (!spec.theta_poly.empty()) {
    c.theta_poly_coeffs_ = poly_string_to_coeffs(spec.theta_poly);
    if (!c.theta_poly_coeffs_.empty() && !c.theta_poly_coeffs_[0].is_zero())
      throw ParseError("curve: theta_poly must have zero constant term");
    c.theta_desc_ += " + " + spec.theta_poly;
  }
  return c;
}

TestCurve TestCurve::load_file(const std::string& path, int m) {
  CurveSpec spec;
  spec.coords.assign(std::size_t(m), "0");
  std::vector<bool> seen(std::size_t(m), false);
  static const std::vector<std::string> alias{"x", "y", "z", "w"};
  for (const auto& [k, v] : read_key_value_file(path)) {
    int idx = -1;
    if (m <= 4)
      for (int i = 0; i < m; ++i)
        if (k == alias[std::size_t(i)]) idx = i;
    if (idx < 0 && k.size() >= 2 && k[0] == 'x') {
      try {
        int n = std::stoi(k.substr(1));
        if (n >= 1 && n <= m) idx = n - 1;
      } catch (...) {
      }
    }
    if (idx >= 0) {
      spec.coords[std::size_t(idx)] = v;
      seen[std::size_t(idx)] = true;
    } else if (k == "theta") {
      spec.theta = v;
    } else if (k == "theta_poly") {
      spec.theta_poly = v;
    } else if (k == "cos_theta") {
      spec.cos_theta = v;
    } else if (k == "sin_theta") {
      spec.sin_theta = v;
    } else if (k == "label" || k == "name") {
      spec.label = v;
    } else {
      throw ParseError("curve file: unknown key '" + k + "'");
    }
  }
  for (int i = 0; i < m; ++i)
    if (!seen[std::size_t(i)])
      throw ParseError("curve file: missing coordinate " + std::to_string(i + 1));
  if (spec.label.empty()) spec.label = path;
  return from_spec(spec, m);
}

TestCurve::Materialized TestCurve::at(int trunc) const {
  Materialized mt;
  for (const auto& coeffs : coord_coeffs_)
    mt.xs.push_back(Series::from_coeffs(trunc, coeffs));
  if (direction_form_) {
    mt.cos_t = Series::from_coeffs(trunc, cos_coeffs_);
    mt.sin_t = Series::from_coeffs(trunc, sin_coeffs_);
    return mt;
  }
  Series u = theta_poly_coeffs_.empty()
                 ? Series::constant(trunc, Rational(0))
                 : Series::from_coeffs(trunc, theta_poly_coeffs_);
  Series cu = Series::cos_of(u);
  Series su = Series::sin_of(u);
  mt.cos_t = cu.scaled(cos0_) - su.scaled(sin0_);
  mt.sin_t = cu.scaled(sin0_) + su.scaled(cos0_);
  return mt;
}

double TestCurve::validate_on(const SeadeFamily& family, double tol,
                              int trunc) const {
  auto mt = at(trunc);
  Series p = family.germ().P().compose(mt.xs);
  Series q = family.germ().Q().compose(mt.xs);
  Series residual = mt.cos_t * p - mt.sin_t * q;
  if (residual.is_identically_zero()) return 0.0;
  double scale = 1.0;
  for (int k = 0; k <= trunc; ++k) {
    scale = std::max(scale, std::fabs(p.coeff(k).to_double()));
    scale = std::max(scale, std::fabs(q.coeff(k).to_double()));
  }
  double bound = 0.0;
  for (int k = 0; k <= trunc; ++k) {
    double v = std::fabs(residual.coeff(k).to_double());
    if (v > tol * scale) {
      throw CurveValidationError(
          "curve does not lie on {Psi = 0}: first nonzero residual coefficient at "
          "degree " + std::to_string(k) + " is " + residual.coeff(k).str());
    }
    bound = std::max(bound, v);
  }
  return bound;
}

bool TestCurve::approaches_origin(int trunc) const {
  auto mt = at(trunc);
  for (const auto& xi : mt.xs)
    if (!xi.coeff(0).is_zero()) return false;
  return true;
}

// --- limits ---------------------------------------------------------------------

std::vector<double> full_gradient(const SeadeFamily& f, std::span<const double> x,
                                  double theta) {
  std::vector<double> g = f.gradient_x(x, theta);
  g.push_back(f.dtheta(x, theta));
  return g;
}

namespace {

// limit of sqrt(num2/den2) as s -> 0+ from exact series orders
void ratio_limit(LimitReport& rep, const Series& num2, const Series& den2) {
  if (den2.is_identically_zero()) {
    rep.degenerate = true;
    rep.verdict = "DEGENERATE";
    rep.notes.push_back("denominator vanishes identically along the curve");
    return;
  }
  if (num2.is_identically_zero()) {
    rep.limit = 0.0;
    rep.order_num = -1;
    rep.order_den = den2.order();
    return;
  }
  int on = num2.order();  // may throw TruncationError -> caller retries
  int od = den2.order();
  rep.order_num = on;
  rep.order_den = od;
  if (on > od) {
    rep.limit = 0.0;
  } else if (on == od) {
    rep.limit = std::sqrt((num2.leading() / den2.leading()).to_double());
  } else {
    rep.limit_infinite = true;
  }
}

// runs a series diagnostic, doubling the truncation until orders resolve
template <class Fn>
LimitReport with_truncation_retry(Fn&& fn) {
  int trunc = kTruncStart;
  while (true) {
    try {
      LimitReport rep = fn(trunc);
      rep.truncation_used = trunc;
      return rep;
    } catch (const TruncationError&) {
      if (trunc >= kTruncMax) throw;
      trunc *= 2;
    }
  }
}

struct GradientSeries {
  std::vector<Series> spatial;  // cos_t * dP_i(x(s)) - sin_t * dQ_i(x(s))
  Series theta;                 // -sin_t * P(x(s)) - cos_t * Q(x(s))
};

GradientSeries gradient_along(const SeadeFamily& f,
                              const TestCurve::Materialized& mt) {
  const MapGerm& g = f.germ();
  GradientSeries gs;
  for (int i = 0; i < g.m(); ++i)
    gs.spatial.push_back(mt.cos_t * g.dP()[std::size_t(i)].compose(mt.xs) -
                         mt.sin_t * g.dQ()[std::size_t(i)].compose(mt.xs));
  gs.theta = -(mt.sin_t * g.P().compose(mt.xs)) - mt.cos_t * g.Q().compose(mt.xs);
  return gs;
}

}  // namespace

LimitReport whitney_a_limit(const SeadeFamily& f, const TestCurve& curve) {
  curve.validate_on(f);
  if (!curve.approaches_origin())
    throw DomainError("whitney_a_limit: curve must approach the theta axis (x(0) = 0)");
  LimitReport rep = with_truncation_retry([&](int trunc) {
    auto mt = curve.at(trunc);
    GradientSeries gs = gradient_along(f, mt);
    Series num2 = gs.theta * gs.theta;
    Series den2 = num2;
    for (const auto& gi : gs.spatial) den2 = den2 + gi * gi;
    LimitReport r;
    ratio_limit(r, num2, den2);
    return r;
  });
  rep.op = "whitney-a-limit";
  if (!rep.degenerate)
    rep.verdict = (rep.limit == 0.0 && !rep.limit_infinite) ? "HOLDS" : "FAILS";
  rep.notes.push_back("curve: " + curve.theta_desc());
  return rep;
}

LimitReport c_regularity_limit(const StratPair& pair, const TestCurve& curve) {
  const SeadeFamily& f = pair.family;
  curve.validate_on(f);
  if (!curve.approaches_origin())
    throw DomainError("c_regularity_limit: curve must approach the theta axis");
  LimitReport rep = with_truncation_retry([&](int trunc) {
    auto mt = curve.at(trunc);
    GradientSeries gs = gradient_along(f, mt);
    // grad rho = (2 x(s), 0); v = grad_rho * |G|^2 - <grad_rho, G> G is a
    // positive multiple of the tangential part of grad rho
    std::vector<Series> G = gs.spatial;
    G.push_back(gs.theta);
    Series g2 = series_norm2(G);
    std::vector<Series> grad_rho;
    for (const auto& xi : mt.xs) grad_rho.push_back(xi.scaled(Rational(2)));
    grad_rho.push_back(Series::constant(mt.xs[0].trunc(), Rational(0)));
    Series rg = series_dot(grad_rho, G);
    std::vector<Series> v;
    for (std::size_t i = 0; i < G.size(); ++i)
      v.push_back(grad_rho[i] * g2 - rg * G[i]);
    LimitReport r;
    if (g2.is_identically_zero()) {
      r.degenerate = true;
      r.verdict = "DEGENERATE";
      r.notes.push_back("normal direction of X vanishes along the curve");
      return r;
    }
    Series num2 = v.back() * v.back();
    Series den2 = series_norm2(v);
    if (den2.is_identically_zero()) {
      r.degenerate = true;
      r.verdict = "DEGENERATE";
      r.notes.push_back("grad(rho|X) vanishes along the curve");
      return r;
    }
    ratio_limit(r, num2, den2);
    return r;
  });
  rep.op = "c-regularity-limit";
  if (!rep.degenerate)
    rep.verdict = (rep.limit == 0.0 && !rep.limit_infinite) ? "HOLDS" : "FAILS";
  rep.notes.push_back("curve: " + curve.theta_desc());
  return rep;
}

Certificate m_condition_scan(const StratPair& pair, const Annulus& region,
                             int theta_grid, const SubdivisionConfig& cfg) {
  if (theta_grid < 1) throw DomainError("m_condition_scan: grid must be >= 1");
  const MapGerm& g = pair.family.germ();
  const int m = g.m();
  std::vector<Polynomial> xs;
  for (int i = 0; i < m; ++i) xs.push_back(Polynomial::variable(m, i));

  SubdivisionConfig sub = cfg;
  sub.workers = 1;

  auto run_theta = [&](int j) {
    double theta = 3.14159265358979323846 * double(j) / double(theta_grid);
    // the grid angle is realized exactly as its double-precision direction;
    // zero sets of Psi_theta and of the parallelism minors are scale
    // invariant in (cos, sin), so this is sound for the realized direction
    Rational c = Rational::from_double(std::cos(theta));
    Rational s = Rational::from_double(std::sin(theta));
    std::vector<Polynomial> system;
    system.push_back(g.P().scaled(c) - g.Q().scaled(s));
    std::vector<Polynomial> grad_dir;
    for (int i = 0; i < m; ++i)
      grad_dir.push_back(g.dP()[std::size_t(i)].scaled(c) -
                         g.dQ()[std::size_t(i)].scaled(s));
    for (int i = 0; i < m; ++i)
      for (int k = i + 1; k < m; ++k)
        system.push_back(grad_dir[std::size_t(i)] * xs[std::size_t(k)] -
                         grad_dir[std::size_t(k)] * xs[std::size_t(i)]);
    return certify_nonvanishing(system, region, sub);
  };

  std::vector<Certificate> per_theta; per_theta.resize(std::size_t(theta_grid));
  if (cfg.workers > 1) {
    std::vector<std::future<Certificate>> futs;
    for (int j = 0; j < theta_grid; ++j)
      futs.push_back(std::async(std::launch::async, run_theta, j));
    for (int j = 0; j < theta_grid; ++j) per_theta[std::size_t(j)] = futs[std::size_t(j)].get();
  } else {
    for (int j = 0; j < theta_grid; ++j) per_theta[std::size_t(j)] = run_theta(j);
  }

  Certificate cert;
  cert.op = "m-condition-scan";
  cert.verdict = Verdict::PASS;
  double min_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < theta_grid; ++j) {
    const Certificate& c = per_theta[std::size_t(j)];
    cert.stats.boxes_processed += c.stats.boxes_processed;
    cert.stats.max_depth_reached =
        std::max(cert.stats.max_depth_reached, c.stats.max_depth_reached);
    cert.stats.residual_count += c.stats.residual_count;
    cert.stats.violation_count += c.stats.violation_count;
    min_margin = std::min(min_margin, c.margin);
    if (c.verdict != Verdict::PASS) {
      if (c.verdict == Verdict::FAIL) cert.verdict = Verdict::FAIL;
      else if (cert.verdict == Verdict::PASS) cert.verdict = Verdict::UNKNOWN;
      cert.notes.push_back("grid index " + std::to_string(j) + " (theta = pi*" +
                           std::to_string(j) + "/" + std::to_string(theta_grid) +
                           "): " + verdict_str(c.verdict));
      for (const auto& w : c.witnesses)
        if (cert.witnesses.size() < cfg.max_witnesses) cert.witnesses.push_back(w);
    }
  }
  if (cert.verdict == Verdict::PASS && std::isfinite(min_margin))
    cert.margin = min_margin;
  cert.notes.push_back("grid size " + std::to_string(theta_grid) +
                       " over [0, pi); grid-level evidence only");
  std::sort(cert.witnesses.begin(), cert.witnesses.end(), box_less);
  return cert;
}

LimitReport curve_ratio_diagnostic(const MapGerm& g, const TestCurve& curve) {
  LimitReport rep = with_truncation_retry([&](int trunc) {
    auto mt = curve.at(trunc);
    Series p = g.P().compose(mt.xs);
    Series q = g.Q().compose(mt.xs);
    if (!p.coeff(0).is_zero() || !q.coeff(0).is_zero())
      throw DomainError(
          "curve_ratio_diagnostic: NOT_LINK_APPROACH (psi(x(0)) != 0)");
    bool at_origin = true;
    for (const auto& xi : mt.xs) at_origin = at_origin && xi.coeff(0).is_zero();
    if (at_origin)
      throw DomainError(
          "curve_ratio_diagnostic: curve tends to the origin, not to the link");

    std::vector<Series> dpa, dqa;
    for (int i = 0; i < g.m(); ++i) {
      dpa.push_back(g.dP()[std::size_t(i)].compose(mt.xs));
      dqa.push_back(g.dQ()[std::size_t(i)].compose(mt.xs));
    }
    // grad |psi|^2 = 2 (P grad P + Q grad Q); gamma = P grad Q - Q grad P
    std::vector<Series> num_vec, den_vec;
    for (int i = 0; i < g.m(); ++i) {
      num_vec.push_back((p * dpa[std::size_t(i)] + q * dqa[std::size_t(i)])
                            .scaled(Rational(2)));
      den_vec.push_back(p * dqa[std::size_t(i)] - q * dpa[std::size_t(i)]);
    }
    Series num2 = series_norm2(num_vec);
    Series den2 = series_norm2(den_vec);

    LimitReport r;
    ratio_limit(r, num2, den2);
    if (r.degenerate) {
      r.notes.push_back("gamma vanishes identically along the curve");
      return r;
    }
    r.verdict = r.limit_infinite ? "UNBOUNDED" : "BOUNDED";

    // leading data of the expansion
    auto record_order = [&r](const std::string& key, const Series& s) {
      if (s.is_identically_zero()) {
        r.exponents[key] = -1;
        return false;
      }
      r.exponents[key] = s.order();
      return true;
    };
    bool has_r = record_order("r", p);
    bool has_p = record_order("p", q);
    if (has_r && has_p && r.exponents["r"] == r.exponents["p"]) {
      // cancellation of the leading vectors P1*b0 - Q1*a0 is the case the
      // bound argument excludes; it forces grad P parallel to grad Q at the
      // base point, impossible when the rank-drop locus is just the origin
      Rational p1 = p.leading(), q1 = q.leading();
      bool cancels = true;
      for (int i = 0; i < g.m(); ++i) {
        Rational lhs = p1 * dqa[std::size_t(i)].coeff(0) -
                       q1 * dpa[std::size_t(i)].coeff(0);
        cancels = cancels && lhs.is_zero();
      }
      if (cancels) {
        r.degenerate = true;
        r.notes.push_back(
            "degenerate leading cancellation: grad P and grad Q parallel at the "
            "base point (rank-drop locus meets the link)");
      }
    }
    std::string a0 = "a0 = (", b0 = "b0 = (";
    for (int i = 0; i < g.m(); ++i) {
      a0 += dpa[std::size_t(i)].coeff(0).str() + (i + 1 < g.m() ? ", " : ")");
      b0 += dqa[std::size_t(i)].coeff(0).str() + (i + 1 < g.m() ? ", " : ")");
    }
    r.notes.push_back(a0 + "; " + b0);
    return r;
  });
  rep.op = "curve-ratio-diagnostic";
  return rep;
}

}  // namespace smf
