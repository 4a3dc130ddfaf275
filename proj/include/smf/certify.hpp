#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smf/germ.hpp"
#include "smf/interval.hpp"
#include "smf/polynomial.hpp"

namespace smf {

// Closed annulus { x : r_in <= |x| <= r_out }.  Certification of germ
// hypotheses always stops at a positive inner radius; the CLI cascades the
// inner radius downward to exhibit stability of verdicts.
struct Annulus {
  double r_in = 0.0;
  double r_out = 0.0;
  Annulus(double rin, double rout) : r_in(rin), r_out(rout) {
    if (!(rin > 0.0) || !(rout > rin))
      throw DomainError("annulus: need 0 < r_in < r_out");
  }
};

enum class Verdict { PASS, FAIL, UNKNOWN };

std::string verdict_str(Verdict v);

struct SubdivisionConfig {
  int max_depth = 48;
  double min_box_width = 1e-9;
  int workers = 1;
  std::size_t max_witnesses = 64;
};

// Outcome of an interval certification.
//   PASS    -> the stated inequality/system condition holds on the region
//   FAIL    -> at least one witness box carries a verified violation
//   UNKNOWN -> subdivision budget exhausted; residual boxes listed
struct Certificate {
  Verdict verdict = Verdict::UNKNOWN;
  double margin = 0.0;  // certified angle margin rho / delta, or a
                        // lower bound on the certified inequality slack
  std::vector<Box> witnesses;
  struct Stats {
    std::uint64_t boxes_processed = 0;
    int max_depth_reached = 0;
    std::uint64_t certified_gamma_case = 0;  // strong-Milnor case split
    std::uint64_t certified_matrix_case = 0;
    std::uint64_t residual_count = 0;
    std::uint64_t violation_count = 0;
  } stats;
  std::string op;
  std::vector<std::string> notes;
};

// PASS certifies that the system { p = 0 for all p in polys } has no solution
// in the region: on every leaf box some p has an interval enclosure excluding
// zero.  Zero existence is not verified, so a non-excludable system yields
// UNKNOWN with the residual boxes as witnesses.  The degenerate case where
// every p is the zero polynomial is a symbolic FAIL.
Certificate certify_nonvanishing(const std::vector<Polynomial>& polys,
                                 const Annulus& region,
                                 const SubdivisionConfig& cfg);

// Nonvanishing of the Jacobian minors: PASS means rank Dpsi = 2 on the whole
// annulus, i.e. the singularity is isolated down to r_in.
Certificate certify_isolated_singularity(const MapGerm& g, const Annulus& region,
                                         const SubdivisionConfig& cfg);

// |cos| of the angle between the admissible pencil gradient and the radial
// direction at x.  Off the variety this is |<gamma,x>| / (|gamma| |x|); on
// the variety every theta is admissible and the value is the closed-form
// maximum sqrt(a^T B^{-1} a) / |x| over all theta, where
// a = (<grad P, x>, -<grad Q, x>) and B is the Gram matrix of
// (grad P, -grad Q).
struct AngleMeasure {
  double value = 0.0;
  bool on_variety = false;
  bool degenerate = false;  // gamma = 0 off the variety; value reported as 0
};
AngleMeasure angle_measure(const MapGerm& g, std::span<const double> x);

// The unrestricted reading: max over every theta of the same cosine, at any
// point off the rank-drop locus.  Dominates angle_measure pointwise; reports
// can quote both so the reading behind a verdict is explicit.
AngleMeasure angle_measure_all_theta(const MapGerm& g, std::span<const double> x);

// PASS certifies angle_measure <= 1 - rho throughout the annulus.  Per box,
// either the all-theta matrix condition holds (positive definiteness of
// (1-rho)^2 |x|^2 B - a a^T via its leading entry and determinant), or psi is
// certified nonzero on the box and the gamma-based polynomial inequality
// (1-rho)^2 |gamma|^2 |x|^2 - <gamma,x>^2 > 0 holds.  Violations are verified
// pointwise with interval arithmetic and produce FAIL witnesses.
Certificate certify_strong_milnor(const MapGerm& g, const Annulus& region,
                                  double rho, const SubdivisionConfig& cfg);

// PASS certifies <grad P, grad Q>^2 <= (1-delta)^2 |grad P|^2 |grad Q|^2 on
// the region (the classical gradient-angle bound).
Certificate jacquemard_angle_sup(const MapGerm& g, const Annulus& region,
                                 double delta, const SubdivisionConfig& cfg);

// Enclosure of the critical points of psi/|psi| on the sphere |x| = radius:
// solutions of { all 2x2 minors of rows (gamma(x), x) vanish, |x|^2 = r^2 }.
// Clusters containing possible variety points are flagged (callers filter by
// the psi != 0 certificate).  For m = 2 each off-link cluster is verified by
// a sign-change bracket of <gamma, x_perp> on the circle and refined to a
// point; higher dimensions report candidate enclosures only.
struct ParallelCluster {
  Box hull;
  bool off_link = false;       // psi != 0 certified on the hull
  bool sign_verified = false;  // m = 2 bracket argument succeeded
  std::vector<double> point;   // refined representative (when verified)
};

struct ParallelPointResult {
  std::vector<ParallelCluster> clusters;
  bool exhausted = false;  // subdivision budget hit: conservative superset
  Certificate::Stats stats;
  std::vector<ParallelCluster> off_link_clusters() const;
};

ParallelPointResult find_parallel_points(const MapGerm& g, double radius,
                                         const SubdivisionConfig& cfg);

}  // namespace smf
