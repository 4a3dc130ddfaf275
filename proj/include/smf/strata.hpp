#pragma once

#include <map>
#include <string>
#include <vector>

#include "smf/certify.hpp"
#include "smf/germ.hpp"
#include "smf/series.hpp"

namespace smf {

// The stratified pair attached to a pencil: X = {Psi = 0} minus the theta
// axis, Y = the theta axis in R^{m+1}, with the control function fixed to
// rho(x, theta) = sum_i x_i^2.
struct StratPair {
  SeadeFamily family;
};

struct CurveValidationError : DomainError {
  using DomainError::DomainError;
};

// Analytic test curve s -> (x(s), theta(s)).  The angle enters only through
// cos(theta(s)) and sin(theta(s)), which are kept as exact rational series:
// quarter-turn constants are exact, any other constant angle is realized at
// its double-precision direction.  A curve remembers its defining data so the
// diagnostics can re-materialize it at a higher truncation when an order is
// undecided.
class TestCurve {
 public:
  struct Materialized {
    std::vector<Series> xs;
    Series cos_t;
    Series sin_t;
  };

  static TestCurve from_spec(const CurveSpec& spec, int m);
  static TestCurve load_file(const std::string& path, int m);

  Materialized at(int trunc) const;

  int m() const { return m_; }
  const std::string& label() const { return label_; }
  const std::string& theta_desc() const { return theta_desc_; }

  // checks Psi(x(s), theta(s)) = 0 as a series; throws CurveValidationError
  // naming the first nonzero residual coefficient when the curve is off X
  // beyond the tolerance.  Returns the residual bound it accepted.
  double validate_on(const SeadeFamily& family, double tol = 1e-9,
                     int trunc = 16) const;

  bool approaches_origin(int trunc = 16) const;  // x(0) = 0

 private:
  int m_ = 0;
  std::vector<std::vector<Rational>> coord_coeffs_;
  // constant part of the angle as an exact direction
  Rational cos0_{1};
  Rational sin0_{0};
  std::vector<Rational> theta_poly_coeffs_;  // zero constant term
  // direction-form override: cos/sin given directly as series in s
  bool direction_form_ = false;
  std::vector<Rational> cos_coeffs_, sin_coeffs_;
  std::string label_, theta_desc_;
};

// Result of a limit diagnostic along a curve.  The limit of |f(s)| / |g(s)|
// is read off exactly from the orders and leading coefficients of the exact
// series f^2 and g^2.
struct LimitReport {
  std::string op;
  double limit = 0.0;
  bool limit_infinite = false;
  int order_num = 0;  // order of the squared numerator; -1 = identically zero
  int order_den = 0;
  std::map<std::string, int> exponents;
  std::string verdict;
  bool degenerate = false;
  std::vector<std::string> notes;
  int truncation_used = 0;
};

// (grad_x Psi, dPsi/dtheta) at a point of R^m x R -- the normal direction of
// X = {Psi = 0} at smooth points.
std::vector<double> full_gradient(const SeadeFamily& f, std::span<const double> x,
                                  double theta);

// Limit as s -> 0+ of the |e_theta|-component of the normalized normal of X
// along the curve.  Whitney (a) holds along the curve iff the limit is 0.
LimitReport whitney_a_limit(const SeadeFamily& f, const TestCurve& curve);

// Limit of the theta-component of the normalized projection of
// grad rho = (2x, 0) onto the tangent space of X along the curve; 0 means the
// projection criterion for (c)-regularity holds along the curve.
LimitReport c_regularity_limit(const StratPair& pair, const TestCurve& curve);

// Grid scan over theta in [0, pi): for each grid direction, certify that
// {Psi_theta = 0} has no point in the annulus where grad Psi_theta is
// parallel to x.  Grid-level evidence for the (m)-condition; the continuous
// statement is certify_strong_milnor with rho -> 0+.
Certificate m_condition_scan(const StratPair& pair, const Annulus& region,
                             int theta_grid, const SubdivisionConfig& cfg);

// Orders of |grad |psi|^2|^2 and |gamma|^2 along a curve into the link.
// BOUNDED iff the numerator order is >= the denominator order.  Flags the
// excluded degenerate case (equal leading orders with cancelling leading
// vectors), which cannot occur when the rank-drop locus is the origin alone.
LimitReport curve_ratio_diagnostic(const MapGerm& g, const TestCurve& curve);

}  // namespace smf
