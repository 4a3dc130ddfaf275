#include "smf/fibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

#include "smf/numeric.hpp"

namespace smf {

SpherePoint::SpherePoint(std::vector<double> coords, double r)
    : x(std::move(coords)), radius(r) {
  renormalize();
}

void SpherePoint::renormalize() {
  double n = norm(x);
  if (!(n > 0.0)) throw DomainError("sphere point: zero vector");
  double f = radius / n;
  for (double& v : x) v *= f;
}

std::string flow_status_str(FlowStatus s) {
  switch (s) {
    case FlowStatus::OK: return "OK";
    case FlowStatus::PARALLEL_POINT: return "PARALLEL_POINT";
    case FlowStatus::ON_LINK: return "ON_LINK";
    case FlowStatus::STEP_UNDERFLOW: return "STEP_UNDERFLOW";
  }
  return "OK";
}

namespace {

double link_floor(const MapGerm& g, double eps, const FlowConfig& cfg) {
  unsigned deg = std::max(g.P().degree(), g.Q().degree());
  return cfg.link_floor_scale * std::pow(eps, double(deg));
}

// omega evaluated at an arbitrary (near-sphere) point during integration
FlowStatus omega_at(const MapGerm& g, std::span<const double> x, double eps,
                    const FlowConfig& cfg, std::vector<double>& out) {
  auto psi = g.psi(x);
  double psi2 = psi[0] * psi[0] + psi[1] * psi[1];
  double floor = link_floor(g, eps, cfg);
  if (psi2 < floor * floor) return FlowStatus::ON_LINK;
  std::vector<double> gm = g.gamma_eval(x);
  double nx = norm(x);
  double proj = dot(gm, x) / nx;
  std::vector<double> u = gm;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= proj * x[i] / nx;
  double u2 = norm2(u);
  double g2 = norm2(gm);
  if (u2 <= cfg.parallel_tol * cfg.parallel_tol * g2 || !(u2 > 0.0))
    return FlowStatus::PARALLEL_POINT;
  out = scaled(u, psi2 / u2);
  return FlowStatus::OK;
}

}  // namespace

OmegaResult omega(const MapGerm& g, const SpherePoint& p, const FlowConfig& cfg) {
  OmegaResult r;
  r.status = omega_at(g, p.x, p.radius, cfg, r.w);
  return r;
}

// --- flow integration -------------------------------------------------------

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

struct StepResult {
  FlowStatus status = FlowStatus::OK;
  std::vector<double> y;
  double error = 0.0;  // scaled local error estimate
};

StepResult dp45_step(const MapGerm& g, double eps, const FlowConfig& cfg,
                     const std::vector<double>& x, const std::vector<double>& k1,
                     double h, double local_tol) {
  const std::size_t n = x.size();
  auto stage = [&](const std::vector<double>& coeffs,
                   const std::vector<const std::vector<double>*>& ks,
                   std::vector<double>& y) {
    y = x;
    for (std::size_t j = 0; j < ks.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) y[i] += h * coeffs[j] * (*ks[j])[i];
  };
  StepResult r;
  std::vector<double> y, k2, k3, k4, k5, k6, k7;
  stage({kA21}, {&k1}, y);
  if ((r.status = omega_at(g, y, eps, cfg, k2)) != FlowStatus::OK) return r;
  stage({kA31, kA32}, {&k1, &k2}, y);
  if ((r.status = omega_at(g, y, eps, cfg, k3)) != FlowStatus::OK) return r;
  stage({kA41, kA42, kA43}, {&k1, &k2, &k3}, y);
  if ((r.status = omega_at(g, y, eps, cfg, k4)) != FlowStatus::OK) return r;
  stage({kA51, kA52, kA53, kA54}, {&k1, &k2, &k3, &k4}, y);
  if ((r.status = omega_at(g, y, eps, cfg, k5)) != FlowStatus::OK) return r;
  stage({kA61, kA62, kA63, kA64, kA65}, {&k1, &k2, &k3, &k4, &k5}, y);
  if ((r.status = omega_at(g, y, eps, cfg, k6)) != FlowStatus::OK) return r;
  stage({kB1, 0.0, kB3, kB4, kB5, kB6}, {&k1, &k1, &k3, &k4, &k5, &k6}, y);
  if ((r.status = omega_at(g, y, eps, cfg, k7)) != FlowStatus::OK) return r;

  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                    kE6 * k6[i] + kE7 * k7[i]);
    double sc = local_tol * (1.0 + std::fabs(x[i]));
    err = std::max(err, std::fabs(e) / sc);
  }
  r.y = std::move(y);
  r.error = err;
  return r;
}

Trajectory integrate_once(const MapGerm& g, const SpherePoint& x0, double T,
                          const FlowConfig& cfg, double local_tol) {
  Trajectory traj;
  const double eps = x0.radius;
  SpherePoint p = x0;
  p.renormalize();

  auto phase_raw = [&](std::span<const double> x) {
    auto psi = g.psi(x);
    return std::atan2(psi[1], psi[0]);
  };

  double t = 0.0;
  double phase0 = phase_raw(p.x);
  double phase_unwrapped = phase0;
  traj.samples.push_back({0.0, p, phase_unwrapped});
  if (T == 0.0) return traj;
  if (T < 0.0) throw DomainError("integrate_flow: negative time not supported");

  std::vector<double> k1;
  if ((traj.status = omega_at(g, p.x, eps, cfg, k1)) != FlowStatus::OK) return traj;

  // the exact flow advances phase at unit rate, so T is also the arc of
  // phase to cover; the step cap keeps each phase increment well below pi so
  // the unwrap after the step cannot alias
  const double kMaxStep = 0.4;
  double h = std::min(1e-3, T / 16.0);
  while (t < T) {
    h = std::min({h, T - t, kMaxStep});
    StepResult s = dp45_step(g, eps, cfg, p.x, k1, h, local_tol);
    if (s.status != FlowStatus::OK) {
      traj.status = s.status;
      return traj;
    }
    if (s.error > 1.0) {
      ++traj.steps_rejected;
      h *= std::max(0.2, 0.9 * std::pow(s.error, -0.25));
      if (h < 1e-15) {
        traj.status = FlowStatus::STEP_UNDERFLOW;
        return traj;
      }
      continue;
    }
    ++traj.steps_accepted;
    t += h;
    p.x = s.y;
    p.renormalize();
    double raw = phase_raw(p.x);
    double prev = traj.samples.back().phase_unwrapped;
    phase_unwrapped = prev + wrap_angle_pm_pi(raw - prev);
    traj.samples.push_back({t, p, phase_unwrapped});
    traj.max_drift =
        std::max(traj.max_drift, std::fabs(phase_unwrapped - phase0 - t));
    FlowStatus st = omega_at(g, p.x, eps, cfg, k1);
    if (st != FlowStatus::OK) {
      traj.status = st;
      return traj;
    }
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(s.error, 1e-10), -0.2)));
  }
  return traj;
}

}  // namespace

Trajectory integrate_flow(const MapGerm& g, const SpherePoint& x0, double T,
                          const FlowConfig& cfg) {
  double local_tol = std::min(1e-10, cfg.drift_tol / (100.0 * std::max(1.0, T)));
  Trajectory traj;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    traj = integrate_once(g, x0, T, cfg, local_tol);
    traj.retries = attempt;
    if (traj.status != FlowStatus::OK) return traj;
    if (traj.max_drift <= cfg.drift_tol) return traj;
    local_tol *= 1e-2;
  }
  return traj;
}

// --- fiber / link solving ----------------------------------------------------

namespace {

using SystemFn = std::function<void(std::span<const double>, Vec&, std::vector<double>&)>;

// damped Gauss-Newton with a tiny Levenberg guard; F and its Jacobian are
// provided by the caller, J row-major (neq x m)
bool gauss_newton(int m, int neq, const SystemFn& fj, Vec& x, int max_iter) {
  Vec F(std::size_t(neq), 0.0);
  std::vector<double> J(std::size_t(neq) * std::size_t(m));
  for (int it = 0; it < max_iter; ++it) {
    fj(x, F, J);
    double f2 = norm2(F);
    if (f2 < 1e-60) return true;
    // normal equations (J^T J + lam I) d = -J^T F
    std::vector<double> A(std::size_t(m) * std::size_t(m), 0.0);
    Vec rhs(std::size_t(m), 0.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int r = 0; r < neq; ++r)
          s += J[std::size_t(r) * std::size_t(m) + std::size_t(i)] *
               J[std::size_t(r) * std::size_t(m) + std::size_t(j)];
        A[std::size_t(i) * std::size_t(m) + std::size_t(j)] = s;
      }
      double s = 0.0;
      for (int r = 0; r < neq; ++r)
        s += J[std::size_t(r) * std::size_t(m) + std::size_t(i)] * F[std::size_t(r)];
      rhs[std::size_t(i)] = -s;
    }
    double tr = 0.0;
    for (int i = 0; i < m; ++i) tr += A[std::size_t(i) * std::size_t(m) + std::size_t(i)];
    double lam = 1e-12 * std::max(tr, 1e-300);
    for (int i = 0; i < m; ++i) A[std::size_t(i) * std::size_t(m) + std::size_t(i)] += lam;
    Vec d;
    if (!solve_dense(A, rhs, d)) return false;
    // backtracking on |F|
    double step = 1.0;
    Vec trial(x.size());
    bool moved = false;
    for (int bt = 0; bt < 12; ++bt) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + step * d[std::size_t(i)];
      Vec Ft(std::size_t(neq), 0.0);
      std::vector<double> Jt;
      Jt.resize(J.size());
      fj(trial, Ft, Jt);
      if (norm2(Ft) < f2) {
        x = trial;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return norm2(F) < 1e-24;
    if (norm(d) * step < 1e-16) return true;
  }
  return true;
}

std::vector<double> random_sphere_point(std::mt19937_64& rng, int m, double eps) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> x(std::size_t(m), 0.0);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& v : x) {
      v = nd(rng);
      n2 += v * v;
    }
  } while (!(n2 > 1e-12));
  double f = eps / std::sqrt(n2);
  for (double& v : x) v *= f;
  return x;
}

void dedup_points(std::vector<SpherePoint>& pts, std::vector<double>& residuals,
                  double radius) {
  std::vector<SpherePoint> out;
  std::vector<double> res;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dup = false;
    for (const auto& q : out) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < q.x.size(); ++k) {
        double d = q.x[k] - pts[i].x[k];
        d2 += d * d;
      }
      if (d2 < radius * radius) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      out.push_back(pts[i]);
      res.push_back(residuals[i]);
    }
  }
  // canonical order for reproducibility
  std::vector<std::size_t> idx(out.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return out[a].x < out[b].x; });
  pts.clear();
  residuals.clear();
  for (std::size_t i : idx) {
    pts.push_back(out[i]);
    residuals.push_back(res[i]);
  }
}

}  // namespace

FiberSample sample_fiber(const MapGerm& g, double eps, double alpha, int n,
                         const SolveConfig& cfg) {
  if (n < 1) throw DomainError("sample_fiber: n >= 1 required");
  const int m = g.m();
  const double ca = std::cos(alpha), sa = std::sin(alpha);

  SystemFn fj = [&](std::span<const double> x, Vec& F, std::vector<double>& J) {
    double p = g.P().eval(x), q = g.Q().eval(x);
    F[0] = sa * p - ca * q;
    F[1] = (norm2(x) - eps * eps) / (2.0 * eps);
    for (int i = 0; i < m; ++i) {
      J[std::size_t(i)] = sa * g.dP()[std::size_t(i)].eval(x) -
                          ca * g.dQ()[std::size_t(i)].eval(x);
      J[std::size_t(m + i)] = x[std::size_t(i)] / eps;
    }
  };

  std::mt19937_64 rng(cfg.seed ^ (std::uint64_t(n) << 32) ^
                      std::uint64_t(std::llround(alpha * 1e9) + (1ll << 40)));
  FiberSample fs;
  fs.alpha = wrap_angle_2pi(alpha);
  int budget = cfg.seeds_per_point * n;
  for (int trial = 0; trial < budget && int(fs.points.size()) < 4 * n; ++trial) {
    Vec x = random_sphere_point(rng, m, eps);
    if (!gauss_newton(m, 2, fj, x, cfg.max_newton)) continue;
    double nrm = norm(x);
    if (!(nrm > 0.0)) continue;
    auto psi = g.psi(x);
    if (psi[0] == 0.0 && psi[1] == 0.0) continue;
    if (!(psi[0] * ca + psi[1] * sa > 0.0)) continue;  // wrong half-fiber
    double phase_res = std::fabs(wrap_angle_pm_pi(std::atan2(psi[1], psi[0]) - alpha));
    double radius_res = std::fabs(nrm - eps) / eps;
    double res = std::max(phase_res, radius_res);
    if (res > cfg.tol) continue;
    fs.points.push_back(SpherePoint(x, eps));
    fs.residuals.push_back(res);
  }
  dedup_points(fs.points, fs.residuals, 10.0 * cfg.tol);
  if (int(fs.points.size()) > n) {
    fs.points.resize(std::size_t(n));
    fs.residuals.resize(std::size_t(n));
  }
  return fs;
}

LinkSample compute_link(const MapGerm& g, double eps, int n, const SolveConfig& cfg) {
  if (n < 1) throw DomainError("compute_link: n >= 1 required");
  const int m = g.m();

  SystemFn fj = [&](std::span<const double> x, Vec& F, std::vector<double>& J) {
    F[0] = g.P().eval(x);
    F[1] = g.Q().eval(x);
    F[2] = (norm2(x) - eps * eps) / (2.0 * eps);
    for (int i = 0; i < m; ++i) {
      J[std::size_t(i)] = g.dP()[std::size_t(i)].eval(x);
      J[std::size_t(m + i)] = g.dQ()[std::size_t(i)].eval(x);
      J[std::size_t(2 * m + i)] = x[std::size_t(i)] / eps;
    }
  };

  std::mt19937_64 rng(cfg.seed ^ 0x11bbu);
  LinkSample ls;
  int budget = cfg.seeds_per_point * std::max(n, 8);
  for (int trial = 0; trial < budget; ++trial) {
    Vec x = random_sphere_point(rng, m, eps);
    if (!gauss_newton(m, 3, fj, x, cfg.max_newton)) continue;
    auto psi = g.psi(x);
    double nrm = norm(x);
    double res = std::max(std::hypot(psi[0], psi[1]),
                          std::fabs(nrm - eps));
    if (res > cfg.tol) continue;
    ls.points.push_back(SpherePoint(x, eps));
    ls.residuals.push_back(res);
  }
  dedup_points(ls.points, ls.residuals, 10.0 * cfg.tol);
  if (int(ls.points.size()) > n) {
    ls.points.resize(std::size_t(n));
    ls.residuals.resize(std::size_t(n));
  }
  return ls;
}

std::vector<double> refine_to_fiber(const MapGerm& g, double eps, double alpha,
                                    std::vector<double> x, int steps) {
  const int m = g.m();
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  SystemFn fj = [&](std::span<const double> p, Vec& F, std::vector<double>& J) {
    double pv = g.P().eval(p), qv = g.Q().eval(p);
    F[0] = sa * pv - ca * qv;
    F[1] = (norm2(p) - eps * eps) / (2.0 * eps);
    for (int i = 0; i < m; ++i) {
      J[std::size_t(i)] = sa * g.dP()[std::size_t(i)].eval(p) -
                          ca * g.dQ()[std::size_t(i)].eval(p);
      J[std::size_t(m + i)] = p[std::size_t(i)] / eps;
    }
  };
  gauss_newton(m, 2, fj, x, steps);
  return x;
}

TransportResult transport_fiber(const MapGerm& g, const FiberSample& fs, double t,
                                const FlowConfig& fcfg, const SolveConfig& scfg) {
  TransportResult tr;
  tr.fiber.alpha = wrap_angle_2pi(fs.alpha + t);
  for (const auto& pt : fs.points) {
    Trajectory traj = integrate_flow(g, pt, t, fcfg);
    tr.point_status.push_back(traj.status);
    if (traj.status != FlowStatus::OK) continue;
    const SpherePoint& end = traj.samples.back().point;
    auto psi = g.psi(end.x);
    double phase_res =
        std::fabs(wrap_angle_pm_pi(std::atan2(psi[1], psi[0]) - tr.fiber.alpha));
    double radius_res = std::fabs(norm(end.x) - pt.radius) / pt.radius;
    tr.fiber.points.push_back(end);
    tr.fiber.residuals.push_back(std::max(phase_res, radius_res));
  }
  (void)scfg;
  return tr;
}

// --- exports -------------------------------------------------------------------

void write_points_csv(const std::string& path, const MapGerm& g,
                      const std::vector<SpherePoint>& pts,
                      const std::vector<double>& residuals) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out.precision(17);
  for (int i = 0; i < g.m(); ++i) out << "x" << (i + 1) << ",";
  out << "phase,residual\n";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    for (double v : pts[k].x) out << v << ",";
    auto psi = g.psi(pts[k].x);
    double phase = (psi[0] == 0.0 && psi[1] == 0.0)
                       ? std::numeric_limits<double>::quiet_NaN()
                       : wrap_angle_2pi(std::atan2(psi[1], psi[0]));
    out << phase << "," << (k < residuals.size() ? residuals[k] : 0.0) << "\n";
  }
}

namespace {

void write_obj_vertices(std::ofstream& out, const std::vector<SpherePoint>& pts) {
  for (const auto& p : pts) {
    double x = !p.x.empty() ? p.x[0] : 0.0;
    double y = p.x.size() > 1 ? p.x[1] : 0.0;
    double z = p.x.size() > 2 ? p.x[2] : 0.0;
    out << "v " << x << " " << y << " " << z << "\n";
  }
}

}  // namespace

void write_trajectory_obj(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out.precision(17);
  std::vector<SpherePoint> pts;
  for (const auto& s : traj.samples) pts.push_back(s.point);
  write_obj_vertices(out, pts);
  out << "l";
  for (std::size_t i = 1; i <= pts.size(); ++i) out << " " << i;
  out << "\n";
}

void write_fiber_flow_obj(const std::string& path,
                          const std::vector<Trajectory>& trails) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out.precision(17);
  std::size_t base = 1;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& traj : trails) {
    std::vector<SpherePoint> pts;
    for (const auto& s : traj.samples) pts.push_back(s.point);
    write_obj_vertices(out, pts);
    ranges.emplace_back(base, base + pts.size() - 1);
    base += pts.size();
  }
  for (const auto& [lo, hi] : ranges) {
    out << "l";
    for (std::size_t i = lo; i <= hi; ++i) out << " " << i;
    out << "\n";
  }
}

}  // namespace smf
