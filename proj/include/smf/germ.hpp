#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smf/polynomial.hpp"

namespace smf {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Phase of psi(x) on the target circle, in [0, 2*pi).
struct Phase {
  double angle = 0.0;
};

// A polynomial map germ (P,Q): (R^m, 0) -> (R^2, 0) together with the derived
// objects the rest of the tool needs: gradients, the gamma field
// gamma = P*grad(Q) - Q*grad(P), |psi|^2 and the 2x2 Jacobian minors.
class MapGerm {
 public:
  MapGerm(int m, Polynomial P, Polynomial Q, std::string name = "");

  int m() const { return m_; }
  const std::string& name() const { return name_; }
  const Polynomial& P() const { return P_; }
  const Polynomial& Q() const { return Q_; }
  const std::vector<Polynomial>& dP() const { return dP_; }
  const std::vector<Polynomial>& dQ() const { return dQ_; }
  const std::vector<Polynomial>& gamma() const { return gamma_; }
  const Polynomial& psi_norm2() const { return psi_norm2_; }

  // all C(m,2) 2x2 minors of the Jacobian of (P,Q); their common zero set is
  // the rank-drop locus
  const std::vector<Polynomial>& jacobian_minors() const { return minors_; }

  std::array<double, 2> psi(std::span<const double> x) const;
  std::vector<double> gamma_eval(std::span<const double> x) const;
  std::vector<Rational> gamma_eval_exact(std::span<const Rational> x) const;

 private:
  int m_;
  Polynomial P_, Q_;
  std::string name_;
  std::vector<Polynomial> dP_, dQ_, gamma_, minors_;
  Polynomial psi_norm2_;
};

// One-parameter pencil Psi(x, theta) = cos(theta)*P(x) - sin(theta)*Q(x).
// The sign convention is fixed once here and echoed into reports.
class SeadeFamily {
 public:
  explicit SeadeFamily(MapGerm germ) : germ_(std::move(germ)) {}

  static constexpr const char* kConvention = "Psi = cos(theta)*P - sin(theta)*Q";

  const MapGerm& germ() const { return germ_; }

  double eval(std::span<const double> x, double theta) const;
  // cos(theta)*grad(P) - sin(theta)*grad(Q)
  std::vector<double> gradient_x(std::span<const double> x, double theta) const;
  // dPsi/dtheta = -sin(theta)*P - cos(theta)*Q
  double dtheta(std::span<const double> x, double theta) const;

 private:
  MapGerm germ_;
};

// Angle theta in [0, pi) with cos(theta)*P(x) = sin(theta)*Q(x); the point
// then lies on the pencil level {Psi_theta = 0}.  Throws DomainError when
// psi(x) = 0 (every theta is admissible there).
double theta_of(const MapGerm& g, std::span<const double> x);

// Angle of (P(x), Q(x)) in [0, 2*pi).  Throws DomainError when psi(x) = 0.
Phase phase_of(const MapGerm& g, std::span<const double> x);

// m = 2 only: determinant of the 2x2 system in (cos(theta), sin(theta)) made
// from { <grad Psi_theta, (-y, x)> = 0, Psi_theta = 0 }.  Its zero set on the
// punctured plane is where some pencil gradient is parallel to the position
// vector; algebraically it equals <gamma, (-y, x)> up to a global sign.
Polynomial pencil_determinant(const MapGerm& g);

// --- registry and germ files --------------------------------------------

struct CurveSpec {
  std::vector<std::string> coords;  // one polynomial string in s per x_i
  std::string theta;                // constant angle ("pi/2", "0", decimal)
  std::string theta_poly;           // optional polynomial in s added to theta
  std::string cos_theta;            // alternative: exact direction form
  std::string sin_theta;
  std::string label;
};

struct GermEntry {
  MapGerm germ;
  std::optional<CurveSpec> builtin_curve;
};

std::vector<std::string> registry_keys();
GermEntry registry_get(const std::string& key);

// key = value text format: m, P, Q and optional name
MapGerm load_germ_file(const std::string& path);
void write_germ_file(const MapGerm& g, const std::string& path);

// registry key first, file path fallback
GermEntry resolve_germ(const std::string& source);

// shared "key = value" reader with '#' comments, used by germ and curve files
std::vector<std::pair<std::string, std::string>> read_key_value_file(
    const std::string& path);

}  // namespace smf
