#include "smf/germ.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "smf/numeric.hpp"

namespace smf {

MapGerm::MapGerm(int m, Polynomial P, Polynomial Q, std::string name)
    : m_(m), P_(std::move(P)), Q_(std::move(Q)), name_(std::move(name)),
      psi_norm2_(m) {
  if (m_ < 2) throw DomainError("germ: ambient dimension must be >= 2");
  if (P_.dim() != m_ || Q_.dim() != m_)
    throw DimensionError("germ: component dimension mismatch");
  if (!P_.constant_term().is_zero() || !Q_.constant_term().is_zero())
    throw DomainError("germ: components must vanish at the origin");

  dP_ = P_.gradient();
  dQ_ = Q_.gradient();
  gamma_.reserve(std::size_t(m_));
  for (int i = 0; i < m_; ++i)
    gamma_.push_back(P_ * dQ_[std::size_t(i)] - Q_ * dP_[std::size_t(i)]);
  psi_norm2_ = P_ * P_ + Q_ * Q_;
  for (int i = 0; i < m_; ++i)
    for (int j = i + 1; j < m_; ++j)
      minors_.push_back(dP_[std::size_t(i)] * dQ_[std::size_t(j)] -
                        dP_[std::size_t(j)] * dQ_[std::size_t(i)]);
}

std::array<double, 2> MapGerm::psi(std::span<const double> x) const {
  return {P_.eval(x), Q_.eval(x)};
}

std::vector<double> MapGerm::gamma_eval(std::span<const double> x) const {
  std::vector<double> g(std::size_t(m_), 0.0);
  for (int i = 0; i < m_; ++i) g[std::size_t(i)] = gamma_[std::size_t(i)].eval(x);
  return g;
}

std::vector<Rational> MapGerm::gamma_eval_exact(std::span<const Rational> x) const {
  std::vector<Rational> g;
  g.resize(std::size_t(m_));
  for (int i = 0; i < m_; ++i)
    g[std::size_t(i)] = gamma_[std::size_t(i)].eval_exact(x);
  return g;
}

double SeadeFamily::eval(std::span<const double> x, double theta) const {
  return std::cos(theta) * germ_.P().eval(x) - std::sin(theta) * germ_.Q().eval(x);
}

std::vector<double> SeadeFamily::gradient_x(std::span<const double> x,
                                            double theta) const {
  double c = std::cos(theta), s = std::sin(theta);
  std::vector<double> g(std::size_t(germ_.m()));
  for (int i = 0; i < germ_.m(); ++i)
    g[std::size_t(i)] = c * germ_.dP()[std::size_t(i)].eval(x) -
                        s * germ_.dQ()[std::size_t(i)].eval(x);
  return g;
}

double SeadeFamily::dtheta(std::span<const double> x, double theta) const {
  return -std::sin(theta) * germ_.P().eval(x) - std::cos(theta) * germ_.Q().eval(x);
}

double theta_of(const MapGerm& g, std::span<const double> x) {
  double p = g.P().eval(x), q = g.Q().eval(x);
  if (p == 0.0 && q == 0.0)
    throw DomainError("theta_of: psi(x) = 0, every theta is admissible");
  // cos(t)p = sin(t)q  <=>  (cos t, sin t) parallel to (q, p)
  const double pi = 3.14159265358979323846;
  double t = std::atan2(p, q);  // in (-pi, pi]
  if (t < 0.0) t += pi;
  if (t >= pi) t -= pi;
  return t;
}

Phase phase_of(const MapGerm& g, std::span<const double> x) {
  double p = g.P().eval(x), q = g.Q().eval(x);
  if (p == 0.0 && q == 0.0)
    throw DomainError("phase_of: psi(x) = 0, phase undefined on the variety");
  return Phase{wrap_angle_2pi(std::atan2(q, p))};
}

Polynomial pencil_determinant(const MapGerm& g) {
  if (g.m() != 2) throw DomainError("pencil_determinant: requires m = 2");
  Polynomial x = Polynomial::variable(2, 0);
  Polynomial y = Polynomial::variable(2, 1);
  // first equation <grad Psi_theta, (-y, x)> = 0 has coefficient row
  //   ( <grad P, (-y,x)>, -<grad Q, (-y,x)> )
  // second equation Psi_theta = 0 has row ( P, -Q )
  Polynomial a = g.dP()[0].scaled(Rational(-1)) * y + g.dP()[1] * x;
  Polynomial b = -(g.dQ()[0].scaled(Rational(-1)) * y + g.dQ()[1] * x);
  Polynomial c = g.P();
  Polynomial d = -g.Q();
  return a * d - b * c;
}

// --- registry ---------------------------------------------------------------

namespace {

GermEntry make_entry(int m, const std::string& P, const std::string& Q,
                     const std::string& name,
                     std::optional<CurveSpec> curve = std::nullopt) {
  return GermEntry{MapGerm(m, Polynomial::parse(P, m), Polynomial::parse(Q, m), name),
                   std::move(curve)};
}

}  // namespace

std::vector<std::string> registry_keys() {
  return {"identity", "milnor-1.1", "ruas-1.5", "ex-5.2", "ex-5.3"};
}

GermEntry registry_get(const std::string& key) {
  if (key == "identity") {
    CurveSpec radial;
    radial.coords = {"3/5*s", "4/5*s"};
    radial.cos_theta = "4/5";
    radial.sin_theta = "3/5";
    radial.label = "radial line at the rational direction (3/5, 4/5)";
    return make_entry(2, "x", "y", key, radial);
  }
  if (key == "milnor-1.1") return make_entry(2, "x", "x^2 + y*(x^2 + y^2)", key);
  if (key == "ruas-1.5") return make_entry(2, "x*y", "x^2 - y^4", key);
  if (key == "ex-5.2") {
    CurveSpec seq;
    seq.coords = {"s", "0"};
    seq.theta = "pi/2";
    seq.label = "x -> 0 along y = 0 at theta = pi/2";
    return make_entry(2, "x", "y*x^2 + y^3", key, seq);
  }
  if (key == "ex-5.3")
    return make_entry(3, "z*(x^2 + y^2 + z^2)", "y - x^3", key);
  throw DomainError("unknown registry germ '" + key + "'");
}

// --- germ files ---------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> read_key_value_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
    auto b = std::find_if(line.begin(), line.end(), notspace);
    auto e = std::find_if(line.rbegin(), line.rend(), notspace).base();
    if (b >= e) continue;
    std::string trimmed(b, e);
    auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
    auto strip = [](std::string s) {
      auto sb = s.find_first_not_of(" \t");
      auto se = s.find_last_not_of(" \t");
      return sb == std::string::npos ? std::string() : s.substr(sb, se - sb + 1);
    };
    kv.emplace_back(strip(trimmed.substr(0, eq)), strip(trimmed.substr(eq + 1)));
  }
  return kv;
}

MapGerm load_germ_file(const std::string& path) {
  auto kv = read_key_value_file(path);
  int m = 0;
  std::string P, Q, name;
  for (const auto& [k, v] : kv) {
    if (k == "m") m = std::stoi(v);
    else if (k == "P") P = v;
    else if (k == "Q") Q = v;
    else if (k == "name") name = v;
    else throw ParseError("germ file: unknown key '" + k + "'");
  }
  if (m < 2) throw ParseError("germ file: missing or invalid m");
  if (P.empty() || Q.empty()) throw ParseError("germ file: P and Q required");
  return MapGerm(m, Polynomial::parse(P, m), Polynomial::parse(Q, m),
                 name.empty() ? path : name);
}

void write_germ_file(const MapGerm& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write file '" + path + "'");
  if (!g.name().empty()) out << "name = " << g.name() << "\n";
  out << "m = " << g.m() << "\n";
  out << "P = " << g.P().str() << "\n";
  out << "Q = " << g.Q().str() << "\n";
}

GermEntry resolve_germ(const std::string& source) {
  for (const auto& k : registry_keys())
    if (k == source) return registry_get(k);
  return GermEntry{load_germ_file(source), std::nullopt};
}

}  // namespace smf
