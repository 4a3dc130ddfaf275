#include "smf/report.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "smf/fibration.hpp"
#include "smf/numeric.hpp"

namespace smf {

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Json config_json(const RunConfig& cfg) {
  Json j;
  j["germ"] = cfg.germ_source;
  j["eps"] = cfg.eps;
  j["r_in"] = cfg.r_in;
  j["r_out"] = cfg.r_out;
  j["cascade"] = cfg.cascade;
  j["rho"] = cfg.rho;
  j["delta"] = cfg.delta;
  j["tol"] = cfg.tol;
  j["depth"] = cfg.depth;
  j["grid"] = cfg.grid;
  j["phases"] = cfg.phases;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  return j;
}

Json box_json(const Box& b) {
  Json j = Json::array();
  for (const auto& iv : b.c) j.push_back(Json::array({iv.lo, iv.hi}));
  return j;
}

Report make_report(const std::string& command, const RunConfig* cfg) {
  Report rep;
  rep.doc["tool"] = Json{{"name", "smf"}, {"version", kToolVersion}};
  rep.doc["command"] = command;
  if (cfg != nullptr) rep.doc["config"] = config_json(*cfg);
  rep.doc["results"] = Json::array();
  return rep;
}

// exit code: 0 all PASS/complete, 1 any FAIL, 2 any UNKNOWN, 3 usage errors
void fold_exit(Report& rep, Verdict v) {
  if (v == Verdict::FAIL) rep.exit_code = 1;
  else if (v == Verdict::UNKNOWN && rep.exit_code == 0) rep.exit_code = 2;
}

void push_result(Report& rep, Json j) { rep.doc["results"].push_back(std::move(j)); }

SubdivisionConfig subdivision_from(const RunConfig& cfg) {
  SubdivisionConfig s;
  s.max_depth = cfg.depth;
  s.workers = cfg.workers;
  return s;
}

SeadeFamily family_of(const GermEntry& entry) { return SeadeFamily(entry.germ); }

std::string export_name(const std::string& out_dir, const std::string& germ,
                        const std::string& kind, double eps, double alpha,
                        const std::string& suffix, bool with_alpha) {
  auto fmt = [](double v) {
    std::string s = std::to_string(v);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  std::string base = germ + "-" + kind + "-" + fmt(eps);
  if (with_alpha) base += "-" + fmt(alpha);
  return (std::filesystem::path(out_dir) / (base + suffix)).string();
}

}  // namespace

std::string Report::reproducible_body() const {
  Json copy = doc;
  copy.erase("timing");
  return copy.dump(2) + "\n";
}

Json to_json(const Certificate& c) {
  Json j;
  j["op"] = c.op;
  j["verdict"] = verdict_str(c.verdict);
  j["margin"] = c.margin;
  Json w = Json::array();
  for (const auto& b : c.witnesses) w.push_back(box_json(b));
  j["witnesses"] = std::move(w);
  j["stats"] = Json{{"boxes", c.stats.boxes_processed},
                    {"max_depth", c.stats.max_depth_reached},
                    {"gamma_case", c.stats.certified_gamma_case},
                    {"matrix_case", c.stats.certified_matrix_case},
                    {"residuals", c.stats.residual_count},
                    {"violations", c.stats.violation_count}};
  j["notes"] = c.notes;
  return j;
}

Json to_json(const LimitReport& r) {
  Json j;
  j["op"] = r.op;
  if (r.limit_infinite) j["limit"] = "inf";
  else j["limit"] = r.limit;
  j["order_num"] = r.order_num;
  j["order_den"] = r.order_den;
  j["exponents"] = r.exponents;
  j["verdict"] = r.verdict;
  j["degenerate"] = r.degenerate;
  j["truncation"] = r.truncation_used;
  j["notes"] = r.notes;
  return j;
}

Report run_list() {
  Report rep = make_report("list", nullptr);
  for (const auto& key : registry_keys()) {
    GermEntry e = registry_get(key);
    Json j;
    j["name"] = key;
    j["m"] = e.germ.m();
    j["P"] = e.germ.P().str();
    j["Q"] = e.germ.Q().str();
    j["builtin_curve"] = e.builtin_curve.has_value();
    push_result(rep, std::move(j));
  }
  return rep;
}

Report run_check(const RunConfig& cfg) {
  Stopwatch sw;
  Report rep = make_report("check", &cfg);
  GermEntry entry = resolve_germ(cfg.germ_source);
  const MapGerm& g = entry.germ;
  rep.doc["germ"] = Json{{"name", g.name()}, {"m", g.m()},
                         {"P", g.P().str()}, {"Q", g.Q().str()}};
  rep.doc["convention"] = SeadeFamily::kConvention;
  SubdivisionConfig sub = subdivision_from(cfg);
  Json timing;

  // isolated singularity over the widest annulus of the cascade
  {
    Stopwatch t;
    try {
      Annulus ann(cfg.r_in / double(1 << std::max(0, cfg.cascade - 1)), cfg.r_out);
      Certificate c = certify_isolated_singularity(g, ann, sub);
      fold_exit(rep, c.verdict);
      Json j = to_json(c);
      j["annulus"] = Json::array({ann.r_in, ann.r_out});
      push_result(rep, std::move(j));
    } catch (const std::exception& ex) {
      push_result(rep, Json{{"op", "isolated-singularity"}, {"error", ex.what()}});
      rep.exit_code = std::max(rep.exit_code, 2);
    }
    timing["isolated_singularity_s"] = t.seconds();
  }

  // strong Milnor bound over the annulus cascade (shared outer radius)
  {
    Stopwatch t;
    double rin = cfg.r_in;
    for (int k = 0; k < std::max(1, cfg.cascade); ++k, rin *= 0.5) {
      try {
        Annulus ann(rin, cfg.r_out);
        Certificate c = certify_strong_milnor(g, ann, cfg.rho, sub);
        fold_exit(rep, c.verdict);
        Json j = to_json(c);
        j["annulus"] = Json::array({ann.r_in, ann.r_out});
        j["rho"] = cfg.rho;
        // quote both readings of the bound at each witness point
        Json measures = Json::array();
        for (const auto& w : c.witnesses) {
          auto mid = w.midpoint();
          Json jm;
          jm["point"] = mid;
          try {
            jm["admissible_theta"] = angle_measure(g, mid).value;
            jm["all_theta"] = angle_measure_all_theta(g, mid).value;
          } catch (const std::exception& ex) {
            jm["error"] = ex.what();
          }
          measures.push_back(std::move(jm));
        }
        if (!measures.empty()) j["witness_measures"] = std::move(measures);
        push_result(rep, std::move(j));
      } catch (const std::exception& ex) {
        push_result(rep, Json{{"op", "strong-milnor"}, {"error", ex.what()}});
        rep.exit_code = std::max(rep.exit_code, 2);
      }
    }
    timing["strong_milnor_s"] = t.seconds();
  }

  // gradient-angle bound (exploratory)
  {
    Stopwatch t;
    try {
      Annulus ann(cfg.r_in, cfg.r_out);
      Certificate c = jacquemard_angle_sup(g, ann, cfg.delta, sub);
      fold_exit(rep, c.verdict);
      Json j = to_json(c);
      j["annulus"] = Json::array({ann.r_in, ann.r_out});
      j["delta"] = cfg.delta;
      push_result(rep, std::move(j));
    } catch (const std::exception& ex) {
      push_result(rep, Json{{"op", "jacquemard-angle"}, {"error", ex.what()}});
      rep.exit_code = std::max(rep.exit_code, 2);
    }
    timing["jacquemard_s"] = t.seconds();
  }

  // theta-grid transversality scan
  {
    Stopwatch t;
    try {
      Annulus ann(cfg.r_in, cfg.r_out);
      StratPair pair{family_of(entry)};
      Certificate c = m_condition_scan(pair, ann, cfg.grid, sub);
      fold_exit(rep, c.verdict);
      Json j = to_json(c);
      j["annulus"] = Json::array({ann.r_in, ann.r_out});
      push_result(rep, std::move(j));
    } catch (const std::exception& ex) {
      push_result(rep, Json{{"op", "m-condition-scan"}, {"error", ex.what()}});
      rep.exit_code = std::max(rep.exit_code, 2);
    }
    timing["m_condition_scan_s"] = t.seconds();
  }

  // built-in curve diagnostics when the registry carries one
  if (entry.builtin_curve) {
    Stopwatch t;
    try {
      SeadeFamily fam = family_of(entry);
      TestCurve curve = TestCurve::from_spec(*entry.builtin_curve, g.m());
      LimitReport wa = whitney_a_limit(fam, curve);
      fold_exit(rep, wa.verdict == "HOLDS" ? Verdict::PASS : Verdict::FAIL);
      Json j = to_json(wa);
      j["curve"] = entry.builtin_curve->label;
      push_result(rep, std::move(j));
      LimitReport cr = c_regularity_limit(StratPair{fam}, curve);
      Json jc = to_json(cr);
      jc["curve"] = entry.builtin_curve->label;
      push_result(rep, std::move(jc));
    } catch (const std::exception& ex) {
      push_result(rep, Json{{"op", "builtin-curve"}, {"error", ex.what()}});
      rep.exit_code = std::max(rep.exit_code, 2);
    }
    timing["builtin_curve_s"] = t.seconds();
  }

  timing["total_s"] = sw.seconds();
  rep.doc["timing"] = std::move(timing);
  return rep;
}

Report run_fibrate(const RunConfig& cfg) {
  Stopwatch sw;
  Report rep = make_report("fibrate", &cfg);
  GermEntry entry = resolve_germ(cfg.germ_source);
  const MapGerm& g = entry.germ;
  rep.doc["germ"] = Json{{"name", g.name()}, {"m", g.m()}};
  SubdivisionConfig sub = subdivision_from(cfg);
  Json timing;

  // gate: the flow construction assumes the angle bound near the sphere
  if (!cfg.force) {
    Stopwatch t;
    Annulus gate(0.5 * cfg.eps, 1.5 * cfg.eps);
    Certificate c = certify_strong_milnor(g, gate, cfg.rho, sub);
    Json j = to_json(c);
    j["annulus"] = Json::array({gate.r_in, gate.r_out});
    j["role"] = "gate";
    push_result(rep, std::move(j));
    timing["gate_s"] = t.seconds();
    if (c.verdict != Verdict::PASS) {
      rep.doc["refused"] =
          "strong Milnor bound not certified near the sphere; "
          "rerun with --force to integrate anyway";
      fold_exit(rep, c.verdict);
      rep.doc["timing"] = std::move(timing);
      return rep;
    }
  }

  bool do_export = !cfg.out_dir.empty();
  if (do_export) std::filesystem::create_directories(cfg.out_dir);

  FlowConfig fcfg;
  fcfg.drift_tol = std::max(cfg.tol, 1e-10);
  SolveConfig scfg;
  scfg.tol = cfg.tol;
  scfg.seed = cfg.seed;

  {
    Stopwatch t;
    LinkSample link = compute_link(g, cfg.eps, 64, scfg);
    Json j;
    j["op"] = "link";
    j["count"] = link.points.size();
    Json pts = Json::array();
    for (std::size_t i = 0; i < link.points.size(); ++i) {
      Json p;
      p["x"] = link.points[i].x;
      p["residual"] = link.residuals[i];
      pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    if (do_export) {
      std::string path = export_name(cfg.out_dir, g.name(), "link", cfg.eps, 0, ".csv", false);
      write_points_csv(path, g, link.points, link.residuals);
      j["export"] = path;
    }
    push_result(rep, std::move(j));
    timing["link_s"] = t.seconds();
  }

  {
    Stopwatch t;
    Json fibers = Json::array();
    std::vector<Trajectory> trails;
    int transported = 0, returned = 0;
    double worst_residual = 0.0, worst_return = 0.0;
    for (int k = 0; k < cfg.phases; ++k) {
      double alpha = 2.0 * kPi * double(k) / double(cfg.phases);
      FiberSample fs = sample_fiber(g, cfg.eps, alpha, 8, scfg);
      Json j;
      j["alpha"] = alpha;
      j["count"] = fs.points.size();
      double res = 0.0;
      for (double r : fs.residuals) res = std::max(res, r);
      j["max_residual"] = res;
      worst_residual = std::max(worst_residual, res);
      if (do_export && !fs.points.empty()) {
        std::string path =
            export_name(cfg.out_dir, g.name(), "fiber", cfg.eps, alpha, ".csv", true);
        write_points_csv(path, g, fs.points, fs.residuals);
        j["export"] = path;
      }
      // monodromy: transport the phase-0 fiber a full turn, others one slice
      double t_slice = (k == 0) ? 2.0 * kPi : 2.0 * kPi / double(cfg.phases);
      TransportResult tr = transport_fiber(g, fs, t_slice, fcfg, scfg);
      int ok = 0;
      double tres = 0.0;
      for (std::size_t i = 0; i < tr.fiber.points.size(); ++i)
        tres = std::max(tres, tr.fiber.residuals[i]);
      for (auto st : tr.point_status) ok += (st == FlowStatus::OK) ? 1 : 0;
      j["transport_t"] = t_slice;
      j["transport_ok"] = ok;
      j["transport_max_residual"] = tres;
      transported += int(tr.fiber.points.size());
      if (k == 0) {
        // first-return distance to the original fiber after one refinement
        for (const auto& pt : tr.fiber.points) {
          Vec refined = refine_to_fiber(g, cfg.eps, alpha, pt.x, 1);
          double best = std::numeric_limits<double>::infinity();
          for (const auto& orig : fs.points) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < refined.size(); ++c) {
              double d = refined[c] - orig.x[c];
              d2 += d * d;
            }
            best = std::min(best, std::sqrt(d2));
          }
          worst_return = std::max(worst_return, best);
          ++returned;
        }
        j["monodromy_max_return_distance"] = worst_return;
      }
      fibers.push_back(std::move(j));
      if (do_export && !fs.points.empty()) {
        for (const auto& pt : fs.points) {
          Trajectory traj = integrate_flow(g, pt, t_slice, fcfg);
          if (traj.status == FlowStatus::OK) trails.push_back(std::move(traj));
        }
      }
    }
    Json j;
    j["op"] = "fibers";
    j["per_phase"] = std::move(fibers);
    j["transported_points"] = transported;
    j["monodromy_checked_points"] = returned;
    j["max_fiber_residual"] = worst_residual;
    if (do_export && !trails.empty()) {
      std::string path = export_name(cfg.out_dir, g.name(), "flow", cfg.eps, 0, ".obj", false);
      write_fiber_flow_obj(path, trails);
      j["export"] = path;
    }
    push_result(rep, std::move(j));
    timing["fibers_s"] = t.seconds();
  }

  timing["total_s"] = sw.seconds();
  rep.doc["timing"] = std::move(timing);
  return rep;
}

Report run_strata(const RunConfig& cfg) {
  Stopwatch sw;
  Report rep = make_report("strata", &cfg);
  GermEntry entry = resolve_germ(cfg.germ_source);
  const MapGerm& g = entry.germ;
  rep.doc["germ"] = Json{{"name", g.name()}, {"m", g.m()}};
  SeadeFamily fam = family_of(entry);
  Json timing;

  TestCurve curve = [&]() {
    if (cfg.builtin_curve) {
      if (!entry.builtin_curve)
        throw DomainError("germ '" + g.name() + "' has no built-in curve");
      return TestCurve::from_spec(*entry.builtin_curve, g.m());
    }
    if (cfg.curve_file.empty())
      throw DomainError("strata: provide --curve FILE or --builtin-curve");
    return TestCurve::load_file(cfg.curve_file, g.m());
  }();
  rep.doc["curve"] = Json{{"label", curve.label()}, {"theta", curve.theta_desc()}};

  auto run_diag = [&](const std::string& name, auto&& fn) {
    Stopwatch t;
    try {
      LimitReport r = fn();
      if (r.op == "whitney-a-limit" || r.op == "c-regularity-limit")
        fold_exit(rep, r.verdict == "HOLDS" ? Verdict::PASS
                                            : (r.degenerate ? Verdict::UNKNOWN
                                                            : Verdict::FAIL));
      push_result(rep, to_json(r));
    } catch (const std::exception& ex) {
      push_result(rep, Json{{"op", name}, {"skipped", ex.what()}});
    }
    timing[name + "_s"] = t.seconds();
  };

  run_diag("whitney-a-limit", [&] { return whitney_a_limit(fam, curve); });
  run_diag("c-regularity-limit",
           [&] { return c_regularity_limit(StratPair{fam}, curve); });
  run_diag("curve-ratio-diagnostic",
           [&] { return curve_ratio_diagnostic(g, curve); });

  timing["total_s"] = sw.seconds();
  rep.doc["timing"] = std::move(timing);
  return rep;
}

Report run_link(const RunConfig& cfg) {
  Stopwatch sw;
  Report rep = make_report("link", &cfg);
  GermEntry entry = resolve_germ(cfg.germ_source);
  const MapGerm& g = entry.germ;
  rep.doc["germ"] = Json{{"name", g.name()}, {"m", g.m()}};
  SolveConfig scfg;
  scfg.tol = cfg.tol;
  scfg.seed = cfg.seed;
  LinkSample link = compute_link(g, cfg.eps, 64, scfg);
  Json j;
  j["op"] = "link";
  j["eps"] = cfg.eps;
  j["count"] = link.points.size();
  Json pts = Json::array();
  for (std::size_t i = 0; i < link.points.size(); ++i)
    pts.push_back(Json{{"x", link.points[i].x}, {"residual", link.residuals[i]}});
  j["points"] = std::move(pts);
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::string path = export_name(cfg.out_dir, g.name(), "link", cfg.eps, 0, ".csv", false);
    write_points_csv(path, g, link.points, link.residuals);
    j["export"] = path;
  }
  push_result(rep, std::move(j));
  rep.doc["timing"] = Json{{"total_s", sw.seconds()}};
  return rep;
}

Report run_export_examples(const RunConfig& cfg) {
  Report rep = make_report("export-examples", &cfg);
  std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  for (const auto& key : registry_keys()) {
    GermEntry e = registry_get(key);
    std::string path = (std::filesystem::path(dir) / (key + ".germ")).string();
    write_germ_file(e.germ, path);
    push_result(rep, Json{{"germ", key}, {"file", path}});
  }
  // a reusable radial curve for the identity germ
  std::string curve_path = (std::filesystem::path(dir) / "radial.curve").string();
  {
    std::ofstream out(curve_path);
    out << "# radial curve on {Psi = 0} for the identity germ\n";
    out << "label = radial\n";
    out << "x = 3/5*s\n";
    out << "y = 4/5*s\n";
    out << "cos_theta = 4/5\n";
    out << "sin_theta = 3/5\n";
  }
  push_result(rep, Json{{"curve", "radial"}, {"file", curve_path}});
  return rep;
}

}  // namespace smf
