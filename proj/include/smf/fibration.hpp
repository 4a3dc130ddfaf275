#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smf/germ.hpp"

namespace smf {

// Point constrained to the sphere of the given radius; renormalized after
// every update so |coords| stays within 1e-12 * radius of the radius.
struct SpherePoint {
  std::vector<double> x;
  double radius = 1.0;

  SpherePoint() = default;
  SpherePoint(std::vector<double> coords, double r);
  void renormalize();
};

enum class FlowStatus { OK, PARALLEL_POINT, ON_LINK, STEP_UNDERFLOW };
std::string flow_status_str(FlowStatus s);

struct FlowConfig {
  double drift_tol = 1e-8;       // allowed phase drift over the whole run
  double parallel_tol = 1e-9;    // |u| < parallel_tol * |gamma| aborts
  double link_floor_scale = 1e-12;  // |psi| floor = scale * eps^deg
  int max_retries = 3;
};

struct OmegaResult {
  FlowStatus status = FlowStatus::OK;
  std::vector<double> w;
};

// The phase-advancing tangent field w = |psi|^2 * u / |u|^2, with u the
// tangential part of gamma at x.  Well-defined off the link wherever gamma
// is not radial; <w, gamma> = |psi|^2 and <w, x> = 0 hold by construction.
OmegaResult omega(const MapGerm& g, const SpherePoint& p,
                  const FlowConfig& cfg = {});

struct TrajectorySample {
  double t = 0.0;
  SpherePoint point;
  double phase_unwrapped = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  FlowStatus status = FlowStatus::OK;
  double max_drift = 0.0;  // max |phase(t) - phase(0) - t| over the run
  std::uint64_t steps_accepted = 0;
  std::uint64_t steps_rejected = 0;
  int retries = 0;
};

// Integrates xdot = omega(x) from x0 for time T with an embedded
// Runge-Kutta 5(4) pair, renormalizing to the sphere after every accepted
// step.  The exact flow advances the phase of psi at unit rate, so the
// recorded drift measures integration error; the integration is re-run with
// tighter local tolerances until the drift fits under cfg.drift_tol.
Trajectory integrate_flow(const MapGerm& g, const SpherePoint& x0, double T,
                          const FlowConfig& cfg = {});

struct SolveConfig {
  double tol = 1e-10;    // accepted phase/radius residual
  int max_newton = 60;
  int seeds_per_point = 16;
  std::uint64_t seed = 0x5eade;
};

struct FiberSample {
  double alpha = 0.0;  // target phase
  std::vector<SpherePoint> points;
  std::vector<double> residuals;  // max of phase and relative radius residual
};

// Points of the half-fiber { x in S_eps : psi(x)/|psi(x)| = (cos a, sin a) },
// found by damped Gauss-Newton from seeded sphere starts, deduplicated within
// 10 * tol.  May legitimately return fewer than n points (or none).
FiberSample sample_fiber(const MapGerm& g, double eps, double alpha, int n,
                         const SolveConfig& cfg = {});

struct LinkSample {
  std::vector<SpherePoint> points;
  std::vector<double> residuals;  // |psi| plus radius defect
};

// Solutions of { P = 0, Q = 0, |x| = eps }, clustered into distinct points.
LinkSample compute_link(const MapGerm& g, double eps, int n,
                        const SolveConfig& cfg = {});

struct TransportResult {
  FiberSample fiber;                    // validated against phase alpha + t
  std::vector<FlowStatus> point_status;  // per input point
};

// Flows every fiber point for time t; the result is the fiber at phase
// alpha + t up to integration tolerance (the local trivialization motion).
TransportResult transport_fiber(const MapGerm& g, const FiberSample& fs, double t,
                                const FlowConfig& fcfg = {},
                                const SolveConfig& scfg = {});

// A few Gauss-Newton steps toward the fiber system at phase alpha, starting
// from x.  Used to validate monodromy returns.
std::vector<double> refine_to_fiber(const MapGerm& g, double eps, double alpha,
                                    std::vector<double> x, int steps = 1);

// --- exports -------------------------------------------------------------

void write_points_csv(const std::string& path, const MapGerm& g,
                      const std::vector<SpherePoint>& pts,
                      const std::vector<double>& residuals);
void write_trajectory_obj(const std::string& path, const Trajectory& traj);
void write_fiber_flow_obj(const std::string& path,
                          const std::vector<Trajectory>& trails);

}  // namespace smf
