#include "doctest.h"

#include <cmath>

#include "smf/certify.hpp"
#include "smf/numeric.hpp"
#include "support.hpp"

using namespace smf;

namespace {

MapGerm germ_of(const std::string& key) { return registry_get(key).germ; }

SubdivisionConfig cfg_depth(int depth) {
  SubdivisionConfig c;
  c.max_depth = depth;
  return c;
}

}  // namespace

TEST_CASE("nonvanishing: positive polynomial passes") {
  std::vector<Polynomial> sys{Polynomial::parse("1 + x^2", 2)};
  Certificate c = certify_nonvanishing(sys, Annulus(0.1, 1.0), cfg_depth(20));
  CHECK(c.verdict == Verdict::PASS);
  CHECK(c.margin >= 0.9);
}

TEST_CASE("nonvanishing: minors of ex-5.2 exclude zero off the origin") {
  Certificate c = certify_nonvanishing(germ_of("ex-5.2").jacobian_minors(),
                                       Annulus(1e-3, 1e-1), cfg_depth(40));
  CHECK(c.verdict == Verdict::PASS);
  CHECK(c.margin > 0.0);
}

TEST_CASE("nonvanishing: a system with solutions in the region cannot pass") {
  std::vector<Polynomial> sys{Polynomial::parse("x", 2)};
  Certificate c = certify_nonvanishing(sys, Annulus(0.5, 1.0), cfg_depth(16));
  CHECK(c.verdict != Verdict::PASS);
  CHECK(!c.witnesses.empty());
  // the residual boxes hug the zero set {x = 0}
  for (const auto& w : c.witnesses) CHECK(w.c[0].contains(0.0));
}

TEST_CASE("isolated singularity certificates") {
  CHECK(certify_isolated_singularity(germ_of("identity"), Annulus(0.01, 1.0),
                                     cfg_depth(20)).verdict == Verdict::PASS);
  CHECK(certify_isolated_singularity(germ_of("ex-5.3"), Annulus(1e-3, 1e-1),
                                     cfg_depth(48)).verdict == Verdict::PASS);
  // (x, x^2) drops rank everywhere: minors vanish identically
  MapGerm degenerate(2, Polynomial::parse("x", 2), Polynomial::parse("x^2", 2));
  Certificate c =
      certify_isolated_singularity(degenerate, Annulus(0.1, 1.0), cfg_depth(10));
  CHECK(c.verdict == Verdict::FAIL);
}

TEST_CASE("angle measure examples") {
  MapGerm id = germ_of("identity");
  auto g = test::rng(23);
  for (int i = 0; i < 100; ++i) {
    auto x = test::random_annulus_point(2, 0.01, 1.0, g);
    CHECK(angle_measure(id, x).value <= 1e-14);
  }
  MapGerm e52 = germ_of("ex-5.2");
  AngleMeasure m = angle_measure(e52, std::vector<double>{1.0, 1.0});
  CHECK(m.value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(!m.on_variety);
  CHECK_THROWS_AS(angle_measure(id, std::vector<double>{0.0, 0.0}), DomainError);
}

TEST_CASE("angle measure on the variety matches a dense theta grid") {
  MapGerm e53 = germ_of("ex-5.3");
  double t = 0.1;
  std::vector<double> x{t, t * t * t, 0.0};
  AngleMeasure m = angle_measure(e53, x);
  CHECK(m.on_variety);
  double oracle = test::theta_grid_measure(e53, x, 1000000);
  CHECK(std::fabs(m.value - oracle) <= 1e-9);
}

TEST_CASE("all-theta measure matches the grid oracle off the variety too") {
  auto g = test::rng(67);
  for (std::string key : {"ex-5.2", "ex-5.3"}) {
    MapGerm germ = germ_of(key);
    for (int i = 0; i < 8; ++i) {
      auto x = test::random_annulus_point(germ.m(), 0.05, 0.2, g);
      AngleMeasure m = angle_measure_all_theta(germ, x);
      double oracle = test::theta_grid_measure(germ, x, 1000000);
      CHECK(std::fabs(m.value - oracle) <= 1e-7);
    }
  }
}

TEST_CASE("angle measure degenerate gamma") {
  // (x, 2x) has gamma identically zero but psi != 0 off {x = 0}
  MapGerm g(2, Polynomial::parse("x", 2), Polynomial::parse("2*x", 2));
  AngleMeasure m = angle_measure(g, std::vector<double>{0.5, 0.0});
  CHECK(m.degenerate);
  CHECK(m.value == 0.0);
}

TEST_CASE("strong Milnor certificates per germ") {
  CHECK(certify_strong_milnor(germ_of("identity"), Annulus(0.01, 1.0), 0.9,
                              cfg_depth(30)).verdict == Verdict::PASS);
  Certificate e52 = certify_strong_milnor(germ_of("ex-5.2"), Annulus(1e-2, 1e-1),
                                          0.05, cfg_depth(24));
  CHECK(e52.verdict == Verdict::PASS);
  CHECK(e52.margin == 0.05);
  CHECK(e52.stats.certified_gamma_case > 0);

  Certificate bad = certify_strong_milnor(germ_of("milnor-1.1"), Annulus(1e-2, 1e-1),
                                          0.05, cfg_depth(24));
  CHECK(bad.verdict == Verdict::FAIL);
  CHECK(!bad.witnesses.empty());
  CHECK_THROWS_AS(certify_strong_milnor(germ_of("identity"), Annulus(0.1, 1.0), 0.0,
                                        cfg_depth(10)),
                  DomainError);
}

TEST_CASE("strong Milnor PASS soundness: random sampling respects the bound") {
  double rho = 0.05;
  Certificate c = certify_strong_milnor(germ_of("ex-5.2"), Annulus(1e-2, 1e-1), rho,
                                        cfg_depth(24));
  REQUIRE(c.verdict == Verdict::PASS);
  auto g = test::rng(29);
  MapGerm e52 = germ_of("ex-5.2");
  for (int i = 0; i < 100000; ++i) {
    auto x = test::random_annulus_point(2, 1e-2, 1e-1, g);
    CHECK(angle_measure(e52, x).value <= 1.0 - rho + 1e-12);
  }
}

TEST_CASE("strong Milnor FAIL witnesses violate the bound") {
  Certificate c = certify_strong_milnor(germ_of("milnor-1.1"), Annulus(1e-2, 1e-1),
                                        0.05, cfg_depth(24));
  REQUIRE(c.verdict == Verdict::FAIL);
  MapGerm g = germ_of("milnor-1.1");
  for (const auto& w : c.witnesses) {
    auto x = w.midpoint();
    CHECK(angle_measure(g, x).value > 0.95);
  }
}

TEST_CASE("angle measure consistency: gamma route vs direct pencil gradient") {
  for (std::string key : {"identity", "ex-5.2", "ruas-1.5", "ex-5.3"}) {
    MapGerm germ = germ_of(key);
    SeadeFamily fam{MapGerm(germ)};
    auto g = test::rng(31);
    int checked = 0;
    while (checked < 500) {
      auto x = test::random_annulus_point(germ.m(), 1e-2, 1.0, g);
      auto psi = germ.psi(x);
      if (psi[0] == 0.0 && psi[1] == 0.0) continue;
      auto gamma = germ.gamma_eval(x);
      if (!(norm2(gamma) > 1e-30)) continue;
      double th = theta_of(germ, x);
      auto grad = fam.gradient_x(x, th);
      double direct = std::fabs(dot(grad, x)) / (norm(grad) * norm(x));
      CHECK(std::fabs(angle_measure(germ, x).value - direct) <= 1e-10);
      ++checked;
    }
  }
}

TEST_CASE("dominance: the all-theta maximum dominates the admissible value") {
  for (std::string key : {"ex-5.2", "ruas-1.5", "ex-5.3"}) {
    MapGerm germ = germ_of(key);
    auto g = test::rng(37);
    int checked = 0;
    while (checked < 1000) {
      auto x = test::random_annulus_point(germ.m(), 1e-2, 1.0, g);
      auto psi = germ.psi(x);
      if (psi[0] == 0.0 && psi[1] == 0.0) continue;
      auto gamma = germ.gamma_eval(x);
      if (!(norm2(gamma) > 1e-30)) continue;
      // closed-form all-theta maximum (the on-variety formula applies at any
      // point) vs the admissible-theta value
      const int m = germ.m();
      std::vector<double> gp(std::size_t(m), 0.0), gq(std::size_t(m), 0.0);
      for (int i = 0; i < m; ++i) {
        gp[std::size_t(i)] = germ.dP()[std::size_t(i)].eval(x);
        gq[std::size_t(i)] = germ.dQ()[std::size_t(i)].eval(x);
      }
      double a1 = dot(gp, x), a2 = -dot(gq, x);
      double b11 = norm2(gp), b12 = -dot(gp, gq), b22 = norm2(gq);
      double det = b11 * b22 - b12 * b12;
      if (!(det > 1e-30)) continue;
      double quad = (b22 * a1 * a1 - 2 * b12 * a1 * a2 + b11 * a2 * a2) / det;
      double all_theta = std::sqrt(std::max(0.0, quad)) / norm(x);
      double admissible = angle_measure(germ, x).value;
      CHECK(all_theta >= admissible - 1e-10);
      ++checked;
    }
  }
}

TEST_CASE("parallel points: identity germ has none") {
  ParallelPointResult r = find_parallel_points(germ_of("identity"), 0.5, cfg_depth(40));
  CHECK(r.clusters.empty());
  CHECK(!r.exhausted);
}

TEST_CASE("parallel points of milnor-1.1 match the angular-grid oracle") {
  double radius = 0.05;
  ParallelPointResult r =
      find_parallel_points(germ_of("milnor-1.1"), radius, cfg_depth(60));
  auto off_link = r.off_link_clusters();
  REQUIRE(!off_link.empty());

  auto brackets = test::circle_sign_brackets(germ_of("milnor-1.1"), radius, 1000000);
  REQUIRE(brackets.size() == 4);  // two petal lobes, two crossings each

  Polynomial petal = Polynomial::parse("(x^2 + y^2)^2 - x^2*y", 2);
  int verified = 0;
  for (const auto& cl : off_link) {
    if (!cl.sign_verified) continue;
    ++verified;
    // petal equation residual at the refined point
    double resid = std::fabs(petal.eval(cl.point));
    CHECK(resid <= 1e-10);
    // agreement with the oracle brackets
    double phi = std::atan2(cl.point[1], cl.point[0]);
    if (phi < 0) phi += 6.283185307179586476925286766559;
    bool inside = false;
    for (const auto& b : brackets)
      inside = inside || (phi >= b.lo - 1e-5 && phi <= b.hi + 1e-5);
    CHECK(inside);
  }
  CHECK(verified == 4);
}

TEST_CASE("parallel points: ex-5.3 off-link sets are empty") {
  for (double radius : {0.1, 0.05, 0.025}) {
    ParallelPointResult r =
        find_parallel_points(germ_of("ex-5.3"), radius, cfg_depth(72));
    CHECK(r.off_link_clusters().empty());
    CHECK(!r.exhausted);
    for (const auto& cl : r.clusters) CHECK(!cl.off_link);
  }
}

TEST_CASE("gradient-angle bound certificates") {
  CHECK(jacquemard_angle_sup(germ_of("identity"), Annulus(0.01, 1.0), 0.9,
                             cfg_depth(20)).verdict == Verdict::PASS);
  // constant gradients at 45 degrees: delta = 0.5 fails
  MapGerm shear(2, Polynomial::parse("x", 2), Polynomial::parse("x + y", 2));
  Certificate c = jacquemard_angle_sup(shear, Annulus(0.1, 1.0), 0.5, cfg_depth(16));
  CHECK(c.verdict == Verdict::FAIL);
  CHECK_THROWS_AS(jacquemard_angle_sup(shear, Annulus(0.1, 1.0), 1.0, cfg_depth(4)),
                  DomainError);
}

TEST_CASE("gradient-angle verdict agrees with dense sampling on ex-5.2") {
  double delta = 0.05;
  Certificate c = jacquemard_angle_sup(germ_of("ex-5.2"), Annulus(1e-2, 1e-1), delta,
                                       cfg_depth(30));
  MapGerm g = germ_of("ex-5.2");
  auto rng = test::rng(41);
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    auto x = test::random_annulus_point(2, 1e-2, 1e-1, rng);
    std::vector<double> gp{g.dP()[0].eval(x), g.dP()[1].eval(x)};
    std::vector<double> gq{g.dQ()[0].eval(x), g.dQ()[1].eval(x)};
    worst = std::max(worst, std::fabs(dot(gp, gq)) / (norm(gp) * norm(gq)));
  }
  if (c.verdict == Verdict::PASS) CHECK(worst <= 1.0 - delta + 1e-9);
  if (c.verdict == Verdict::FAIL) CHECK(worst > 1.0 - delta - 1e-6);
}

TEST_CASE("determinism: verdict and witnesses independent of worker count") {
  for (int workers : {1, 4}) {
    SubdivisionConfig c = cfg_depth(24);
    c.workers = workers;
    Certificate cert =
        certify_strong_milnor(germ_of("ex-5.2"), Annulus(1e-2, 1e-1), 0.05, c);
    CHECK(cert.verdict == Verdict::PASS);
  }
  std::vector<std::vector<Box>> witness_sets;
  for (int workers : {1, 4}) {
    SubdivisionConfig c = cfg_depth(18);
    c.workers = workers;
    Certificate cert =
        certify_strong_milnor(germ_of("milnor-1.1"), Annulus(1e-2, 1e-1), 0.05, c);
    CHECK(cert.verdict == Verdict::FAIL);
    witness_sets.push_back(cert.witnesses);
  }
  REQUIRE(witness_sets[0].size() == witness_sets[1].size());
  for (std::size_t i = 0; i < witness_sets[0].size(); ++i)
    for (std::size_t k = 0; k < witness_sets[0][i].c.size(); ++k) {
      CHECK(witness_sets[0][i].c[k].lo == witness_sets[1][i].c[k].lo);
      CHECK(witness_sets[0][i].c[k].hi == witness_sets[1][i].c[k].hi);
    }
}

TEST_CASE("annulus validation") {
  CHECK_THROWS_AS(Annulus(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(Annulus(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(certify_nonvanishing({}, Annulus(0.1, 1.0), cfg_depth(4)),
                  DomainError);
}
