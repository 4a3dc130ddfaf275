#include "smf/certify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <limits>

#include "smf/numeric.hpp"

namespace smf {

std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::PASS: return "PASS";
    case Verdict::FAIL: return "FAIL";
    case Verdict::UNKNOWN: return "UNKNOWN";
  }
  return "UNKNOWN";
}

namespace {

enum class BoxOutcome { kCertified, kSplit, kViolation };

// per-box decision: certify, ask for a split, or report a verified violation
using BoxTest = std::function<BoxOutcome(const Box&, double& margin, Box& witness)>;

struct EngineOutput {
  std::vector<Box> residuals;
  std::vector<Box> violations;
  std::uint64_t boxes = 0;
  int max_depth = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::uint64_t residual_count = 0;
  std::uint64_t violation_count = 0;
  bool depth_capped = false;  // some residual stopped on depth, not width
};

void merge_into(EngineOutput& into, EngineOutput&& part, std::size_t cap) {
  into.boxes += part.boxes;
  into.max_depth = std::max(into.max_depth, part.max_depth);
  into.min_margin = std::min(into.min_margin, part.min_margin);
  into.residual_count += part.residual_count;
  into.violation_count += part.violation_count;
  into.depth_capped = into.depth_capped || part.depth_capped;
  for (auto& b : part.residuals)
    if (into.residuals.size() < cap) into.residuals.push_back(std::move(b));
  for (auto& b : part.violations)
    if (into.violations.size() < cap) into.violations.push_back(std::move(b));
}

struct BoxTask {
  Box box;
  int depth;
};

// Region membership is pruned through the interval enclosure of |x|^2; the
// outward-rounded squares of the radii keep the pruning conservative.
struct RegionBounds {
  double r2_lo;  // lower bound of r_in^2
  double r2_hi;  // upper bound of r_out^2
};

EngineOutput process_stack(std::vector<BoxTask> stack, const Polynomial& nrm2,
                           RegionBounds reg, const SubdivisionConfig& cfg,
                           const BoxTest& test) {
  EngineOutput out;
  while (!stack.empty()) {
    BoxTask task = std::move(stack.back());
    stack.pop_back();
    ++out.boxes;
    out.max_depth = std::max(out.max_depth, task.depth);

    Interval r2 = nrm2.eval(task.box);
    if (r2.hi < reg.r2_lo || r2.lo > reg.r2_hi) continue;  // outside the region

    double margin = 0.0;
    Box witness;
    switch (test(task.box, margin, witness)) {
      case BoxOutcome::kCertified:
        out.min_margin = std::min(out.min_margin, margin);
        break;
      case BoxOutcome::kViolation:
        ++out.violation_count;
        if (out.violations.size() < cfg.max_witnesses)
          out.violations.push_back(std::move(witness));
        break;
      case BoxOutcome::kSplit: {
        if (task.depth >= cfg.max_depth ||
            task.box.max_width() <= cfg.min_box_width) {
          ++out.residual_count;
          if (task.box.max_width() > 2.0 * cfg.min_box_width)
            out.depth_capped = true;
          if (out.residuals.size() < cfg.max_witnesses)
            out.residuals.push_back(task.box);
          break;
        }
        auto [a, b] = task.box.split(task.box.widest_axis());
        stack.push_back({std::move(b), task.depth + 1});
        stack.push_back({std::move(a), task.depth + 1});
        break;
      }
    }
  }
  return out;
}

EngineOutput run_engine(const Box& root, const Polynomial& nrm2, RegionBounds reg,
                        const SubdivisionConfig& cfg, const BoxTest& test) {
  if (cfg.workers <= 1)
    return process_stack({{root, 0}}, nrm2, reg, cfg, test);

  // breadth-first expansion to a frontier, then independent subtree scans;
  // the merge order is fixed by the frontier order so the result does not
  // depend on scheduling
  std::vector<BoxTask> frontier{{root, 0}};
  EngineOutput pre;
  std::size_t want = std::size_t(cfg.workers) * 8;
  while (frontier.size() < want) {
    // expand the shallowest entry
    std::size_t pick = 0;
    for (std::size_t i = 1; i < frontier.size(); ++i)
      if (frontier[i].depth < frontier[pick].depth) pick = i;
    BoxTask task = frontier[pick];
    if (task.depth >= cfg.max_depth || task.box.max_width() <= cfg.min_box_width)
      break;
    frontier.erase(frontier.begin() + std::ptrdiff_t(pick));
    ++pre.boxes;
    pre.max_depth = std::max(pre.max_depth, task.depth);
    Interval r2 = nrm2.eval(task.box);
    if (r2.hi < reg.r2_lo || r2.lo > reg.r2_hi) {
      if (frontier.empty()) break;
      continue;
    }
    double margin = 0.0;
    Box witness;
    BoxOutcome o = test(task.box, margin, witness);
    if (o == BoxOutcome::kCertified) {
      pre.min_margin = std::min(pre.min_margin, margin);
    } else if (o == BoxOutcome::kViolation) {
      ++pre.violation_count;
      if (pre.violations.size() < cfg.max_witnesses)
        pre.violations.push_back(std::move(witness));
    } else {
      auto [a, b] = task.box.split(task.box.widest_axis());
      frontier.push_back({std::move(a), task.depth + 1});
      frontier.push_back({std::move(b), task.depth + 1});
    }
    if (frontier.empty()) break;
  }

  std::size_t n = frontier.size();
  std::size_t chunk = (n + std::size_t(cfg.workers) - 1) / std::size_t(cfg.workers);
  std::vector<std::future<EngineOutput>> parts;
  for (std::size_t beg = 0; beg < n; beg += chunk) {
    std::size_t end = std::min(n, beg + chunk);
    std::vector<BoxTask> slice(frontier.begin() + std::ptrdiff_t(beg),
                               frontier.begin() + std::ptrdiff_t(end));
    parts.push_back(std::async(std::launch::async, [slice = std::move(slice), &nrm2,
                                                    reg, &cfg, &test]() mutable {
      return process_stack(std::move(slice), nrm2, reg, cfg, test);
    }));
  }
  EngineOutput out = std::move(pre);
  for (auto& f : parts) merge_into(out, f.get(), cfg.max_witnesses);
  return out;
}

RegionBounds annulus_bounds(const Annulus& a) {
  return {next_down(a.r_in * a.r_in), next_up(a.r_out * a.r_out)};
}

void finish_certificate(Certificate& cert, const EngineOutput& out) {
  cert.stats.boxes_processed = out.boxes;
  cert.stats.max_depth_reached = out.max_depth;
  cert.stats.residual_count = out.residual_count;
  cert.stats.violation_count = out.violation_count;
  if (out.violation_count > 0) {
    cert.verdict = Verdict::FAIL;
    cert.witnesses = out.violations;
  } else if (out.residual_count > 0) {
    cert.verdict = Verdict::UNKNOWN;
    cert.witnesses = out.residuals;
  } else {
    cert.verdict = Verdict::PASS;
  }
  std::sort(cert.witnesses.begin(), cert.witnesses.end(), box_less);
}

// interval certificate that psi != 0 everywhere on the box
bool psi_nonzero_on(const MapGerm& g, const Box& b) {
  if (g.P().eval(b).excludes_zero()) return true;
  if (g.Q().eval(b).excludes_zero()) return true;
  return g.psi_norm2().eval(b).lo > 0.0;
}

}  // namespace

Certificate certify_nonvanishing(const std::vector<Polynomial>& polys,
                                 const Annulus& region,
                                 const SubdivisionConfig& cfg) {
  Certificate cert;
  cert.op = "nonvanishing";
  if (polys.empty()) throw DomainError("certify_nonvanishing: empty system");
  int m = polys[0].dim();
  for (const auto& p : polys)
    if (p.dim() != m) throw DimensionError("certify_nonvanishing: mixed dimensions");

  bool all_zero = true;
  for (const auto& p : polys) all_zero = all_zero && p.is_zero();
  if (all_zero) {
    // the system is identically satisfied: certified failure on the region
    cert.verdict = Verdict::FAIL;
    cert.witnesses.push_back(Box::cube(m, -region.r_out, region.r_out));
    cert.notes.push_back("system identically zero: every region point solves it");
    cert.stats.violation_count = 1;
    return cert;
  }

  Polynomial nrm2 = radius2_poly(m);
  BoxTest test = [&polys](const Box& b, double& margin, Box&) {
    double best = 0.0;
    for (const auto& p : polys) {
      double gap = p.eval(b).zero_gap();
      best = std::max(best, gap);
      if (gap > 0.0) break;
    }
    if (best > 0.0) {
      margin = best;
      return BoxOutcome::kCertified;
    }
    return BoxOutcome::kSplit;
  };

  EngineOutput out = run_engine(Box::cube(m, -region.r_out, region.r_out), nrm2,
                                annulus_bounds(region), cfg, test);
  finish_certificate(cert, out);
  if (cert.verdict == Verdict::PASS)
    cert.margin = std::isfinite(out.min_margin) ? out.min_margin : 0.0;
  return cert;
}

Certificate certify_isolated_singularity(const MapGerm& g, const Annulus& region,
                                         const SubdivisionConfig& cfg) {
  Certificate cert = certify_nonvanishing(g.jacobian_minors(), region, cfg);
  cert.op = "isolated-singularity";
  if (cert.verdict == Verdict::FAIL)
    cert.notes.push_back("Jacobian minors vanish identically: rank < 2 everywhere");
  return cert;
}

AngleMeasure angle_measure(const MapGerm& g, std::span<const double> x) {
  const double nx2 = norm2(x);
  if (!(nx2 > 0.0)) throw DomainError("angle_measure: x = 0");
  auto psi = g.psi(x);
  AngleMeasure r;
  if (psi[0] != 0.0 || psi[1] != 0.0) {
    auto gm = g.gamma_eval(x);
    double g2 = norm2(gm);
    if (!(g2 > 0.0)) {
      r.degenerate = true;
      r.value = 0.0;
      return r;
    }
    double d = dot(gm, x);
    r.value = std::min(1.0, std::fabs(d) / std::sqrt(g2 * nx2));
    return r;
  }
  r.on_variety = true;
  AngleMeasure all = angle_measure_all_theta(g, x);
  r.value = all.value;
  return r;
}

AngleMeasure angle_measure_all_theta(const MapGerm& g, std::span<const double> x) {
  const double nx2 = norm2(x);
  if (!(nx2 > 0.0)) throw DomainError("angle_measure: x = 0");
  const int m = g.m();
  std::vector<double> gp(std::size_t(m), 0.0), gq(std::size_t(m), 0.0);
  for (int i = 0; i < m; ++i) {
    gp[std::size_t(i)] = g.dP()[std::size_t(i)].eval(x);
    gq[std::size_t(i)] = g.dQ()[std::size_t(i)].eval(x);
  }
  double a1 = dot(gp, x);
  double a2 = -dot(gq, x);
  double b11 = norm2(gp);
  double b12 = -dot(gp, gq);
  double b22 = norm2(gq);
  double det = b11 * b22 - b12 * b12;
  if (!(det > 0.0))
    throw DomainError("angle_measure: Gram matrix singular (x in the rank-drop locus)");
  double quad = (b22 * a1 * a1 - 2.0 * b12 * a1 * a2 + b11 * a2 * a2) / det;
  AngleMeasure r;
  auto psi = g.psi(x);
  r.on_variety = (psi[0] == 0.0 && psi[1] == 0.0);
  r.value = std::min(1.0, std::sqrt(std::max(0.0, quad) / nx2));
  return r;
}

Certificate certify_strong_milnor(const MapGerm& g, const Annulus& region,
                                  double rho, const SubdivisionConfig& cfg) {
  if (!(rho > 0.0) || rho > 1.0)
    throw DomainError("certify_strong_milnor: need 0 < rho <= 1");
  Certificate cert;
  cert.op = "strong-milnor";
  cert.notes.push_back(std::string("convention: ") + SeadeFamily::kConvention);
  cert.notes.push_back(
      "reading: gamma-based bound off the variety, all-theta matrix bound on it");

  const int m = g.m();
  const Rational k1 = (Rational(1) - Rational::from_double(rho)).pow(2);
  const Polynomial nrm2 = radius2_poly(m);

  // a = (<grad P, x>, -<grad Q, x>); B = Gram of (grad P, -grad Q)
  std::vector<Polynomial> xs;
  for (int i = 0; i < m; ++i) xs.push_back(Polynomial::variable(m, i));
  Polynomial a1 = poly_dot(g.dP(), xs);
  Polynomial a2 = -poly_dot(g.dQ(), xs);
  Polynomial b11 = poly_norm2(g.dP());
  Polynomial b12 = -poly_dot(g.dP(), g.dQ());
  Polynomial b22 = poly_norm2(g.dQ());
  Polynomial detB = b11 * b22 - b12 * b12;
  Polynomial k_poly = nrm2.scaled(k1);
  // positive definiteness of k*B - a a^T, with the common factor k > 0 on the
  // region divided out of the determinant
  Polynomial m11 = k_poly * b11 - a1 * a1;
  Polynomial dred = k_poly * detB -
                    (b11 * (a2 * a2) - (b12 * (a1 * a2)).scaled(Rational(2)) +
                     b22 * (a1 * a1));

  // gamma-based inequality (valid where psi != 0)
  Polynomial gamma_n2 = poly_norm2(g.gamma());
  Polynomial gamma_dot_x = poly_dot(g.gamma(), xs);
  Polynomial expr_g = (gamma_n2 * nrm2).scaled(k1) - gamma_dot_x * gamma_dot_x;

  std::atomic<std::uint64_t> n_gamma{0}, n_matrix{0};

  BoxTest test = [&](const Box& b, double& margin, Box& witness) {
    if (psi_nonzero_on(g, b)) {
      Interval eg = expr_g.eval(b);
      if (eg.lo > 0.0) {
        margin = eg.lo;
        ++n_gamma;
        return BoxOutcome::kCertified;
      }
    }
    Interval em = m11.eval(b);
    if (em.lo > 0.0) {
      Interval ed = dred.eval(b);
      if (ed.lo > 0.0) {
        margin = std::min(em.lo, ed.lo);
        ++n_matrix;
        return BoxOutcome::kCertified;
      }
    }
    // pointwise violation probe at the midpoint (rigorous: interval point
    // evaluation at an exactly representable point)
    Box pt = Box::at_point(b.midpoint());
    if (psi_nonzero_on(g, pt) && expr_g.eval(pt).hi < 0.0) {
      witness = pt;
      return BoxOutcome::kViolation;
    }
    return BoxOutcome::kSplit;
  };

  EngineOutput out = run_engine(Box::cube(m, -region.r_out, region.r_out), nrm2,
                                annulus_bounds(region), cfg, test);
  finish_certificate(cert, out);
  cert.stats.certified_gamma_case = n_gamma.load();
  cert.stats.certified_matrix_case = n_matrix.load();
  if (cert.verdict == Verdict::PASS) cert.margin = rho;
  if (cert.verdict == Verdict::FAIL)
    cert.notes.push_back("witness points violate the angle bound with certainty");
  return cert;
}

Certificate jacquemard_angle_sup(const MapGerm& g, const Annulus& region,
                                 double delta, const SubdivisionConfig& cfg) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw DomainError("jacquemard_angle_sup: need 0 < delta < 1");
  Certificate cert;
  cert.op = "jacquemard-angle";

  const Rational k = (Rational(1) - Rational::from_double(delta)).pow(2);
  Polynomial dpq = poly_dot(g.dP(), g.dQ());
  Polynomial expr = (poly_norm2(g.dP()) * poly_norm2(g.dQ())).scaled(k) - dpq * dpq;
  Polynomial nrm2 = radius2_poly(g.m());

  BoxTest test = [&](const Box& b, double& margin, Box& witness) {
    Interval e = expr.eval(b);
    if (e.lo > 0.0) {
      margin = e.lo;
      return BoxOutcome::kCertified;
    }
    Box pt = Box::at_point(b.midpoint());
    if (expr.eval(pt).hi < 0.0) {
      witness = pt;
      return BoxOutcome::kViolation;
    }
    return BoxOutcome::kSplit;
  };

  EngineOutput out = run_engine(Box::cube(g.m(), -region.r_out, region.r_out), nrm2,
                                annulus_bounds(region), cfg, test);
  finish_certificate(cert, out);
  if (cert.verdict == Verdict::PASS) cert.margin = delta;
  return cert;
}

// --- parallel points ----------------------------------------------------------

namespace {

// verified bracket refinement of f on the circle arc [phi_lo, phi_hi];
// evaluation is rigorous (interval arithmetic at exactly representable
// points), so a certified sign change proves a root inside
struct CircleProbe {
  const Polynomial& f;
  double radius;

  // returns +1 / -1 when the sign at phi is certified, 0 otherwise
  int sign_at(double phi) const {
    double x = radius * std::cos(phi), y = radius * std::sin(phi);
    Interval e = f.eval(Box::at_point({x, y}));
    if (e.lo > 0.0) return 1;
    if (e.hi < 0.0) return -1;
    return 0;
  }
};

}  // namespace

std::vector<ParallelCluster> ParallelPointResult::off_link_clusters() const {
  std::vector<ParallelCluster> out;
  for (const auto& c : clusters)
    if (c.off_link) out.push_back(c);
  return out;
}

ParallelPointResult find_parallel_points(const MapGerm& g, double radius,
                                         const SubdivisionConfig& cfg) {
  if (!(radius > 0.0)) throw DomainError("find_parallel_points: radius <= 0");
  const int m = g.m();
  std::vector<Polynomial> xs;
  for (int i = 0; i < m; ++i) xs.push_back(Polynomial::variable(m, i));

  // minors of the 2 x m matrix with rows gamma(x) and x
  std::vector<Polynomial> system;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      system.push_back(g.gamma()[std::size_t(i)] * xs[std::size_t(j)] -
                       g.gamma()[std::size_t(j)] * xs[std::size_t(i)]);
  Polynomial nrm2 = radius2_poly(m);
  const Rational r2 = Rational::from_double(radius).pow(2);
  system.push_back(nrm2 - Polynomial::constant(m, r2));

  // candidate resolution: boxes kept once they are this small
  SubdivisionConfig ecfg = cfg;
  ecfg.min_box_width = std::max(cfg.min_box_width, radius * 1e-4);
  ecfg.max_witnesses = 4096;

  BoxTest test = [&system](const Box& b, double&, Box&) {
    for (const auto& p : system)
      if (p.eval(b).excludes_zero()) return BoxOutcome::kCertified;
    return BoxOutcome::kSplit;  // residuals at resolution become candidates
  };

  RegionBounds reg{next_down(radius * radius), next_up(radius * radius)};
  EngineOutput out = run_engine(Box::cube(m, -radius, radius), nrm2, reg, ecfg, test);

  ParallelPointResult result;
  result.stats.boxes_processed = out.boxes;
  result.stats.max_depth_reached = out.max_depth;
  result.stats.residual_count = out.residual_count;
  // candidates that stopped on the depth budget instead of the resolution
  // width mean the enclosure is a conservative superset
  result.exhausted =
      out.depth_capped || out.residual_count > out.residuals.size();

  // cluster adjacent candidate boxes
  std::vector<Box>& cand = out.residuals;
  std::sort(cand.begin(), cand.end(), box_less);
  std::vector<int> owner(cand.size(), -1);
  std::vector<Box> hulls;
  double slack = ecfg.min_box_width * 0.5;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (owner[i] >= 0) continue;
    Box hull = cand[i];
    owner[i] = int(hulls.size());
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t j = 0; j < cand.size(); ++j) {
        if (owner[j] >= 0) continue;
        if (hull.intersects(cand[j], slack)) {
          hull = Box::hull(hull, cand[j]);
          owner[j] = owner[i];
          grew = true;
        }
      }
    }
    hulls.push_back(hull);
  }

  for (const auto& hull : hulls) {
    ParallelCluster cluster;
    cluster.hull = hull;
    cluster.off_link = psi_nonzero_on(g, hull);
    if (m == 2 && cluster.off_link) {
      // planar case: verify by a sign-change bracket of the single minor
      // along the circle, then bisect
      const Polynomial& f = system[0];
      CircleProbe probe{f, radius};
      std::vector<double> corners;
      for (int cx = 0; cx < 2; ++cx)
        for (int cy = 0; cy < 2; ++cy)
          corners.push_back(std::atan2(cx ? hull.c[1].hi : hull.c[1].lo,
                                       cy ? hull.c[0].hi : hull.c[0].lo));
      double lo = corners[0], hi = corners[0];
      for (double a : corners) {
        // keep the arc contiguous: compare against lo in unwrapped form
        double d = wrap_angle_pm_pi(a - corners[0]);
        lo = std::min(lo, corners[0] + d);
        hi = std::max(hi, corners[0] + d);
      }
      double pad = 4.0 * (hi - lo + 1e-9);
      lo -= pad;
      hi += pad;
      const int kScan = 128;
      double prev_phi = lo;
      int prev_sign = probe.sign_at(lo);
      for (int k = 1; k <= kScan; ++k) {
        double phi = lo + (hi - lo) * double(k) / kScan;
        int sgn = probe.sign_at(phi);
        if (sgn != 0 && prev_sign != 0 && sgn != prev_sign) {
          double a = prev_phi, b = phi;
          for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
            double mid = 0.5 * (a + b);
            int ms = probe.sign_at(mid);
            if (ms == 0) break;
            if (ms == prev_sign) a = mid; else b = mid;
          }
          double phi_star = 0.5 * (a + b);
          cluster.sign_verified = true;
          cluster.point = {radius * std::cos(phi_star), radius * std::sin(phi_star)};
          break;
        }
        if (sgn != 0) {
          prev_sign = sgn;
          prev_phi = phi;
        }
      }
    }
    if (cluster.point.empty()) cluster.point = hull.midpoint();
    result.clusters.push_back(std::move(cluster));
  }
  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const ParallelCluster& a, const ParallelCluster& b) {
              return box_less(a.hull, b.hull);
            });
  return result;
}

}  // namespace smf
