#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "smf/report.hpp"

using namespace smf;

namespace {

RunConfig quick_cfg(const std::string& germ) {
  RunConfig cfg;
  cfg.germ_source = germ;
  cfg.depth = 24;
  cfg.grid = 8;
  cfg.cascade = 2;
  return cfg;
}

std::string verdict_of(const Report& rep, const std::string& op) {
  for (const auto& r : rep.doc["results"]) {
    if (r.contains("op") && r["op"] == op && r.contains("verdict"))
      return r["verdict"].get<std::string>();
  }
  return "(missing)";
}

int tool_exit(const std::string& args) {
  std::string cmd = std::string(SMF_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("check identity: every certificate passes, exit 0") {
  Report rep = run_check(quick_cfg("identity"));
  CHECK(rep.exit_code == 0);
  CHECK(verdict_of(rep, "isolated-singularity") == "PASS");
  CHECK(verdict_of(rep, "strong-milnor") == "PASS");
  CHECK(verdict_of(rep, "jacquemard-angle") == "PASS");
  CHECK(verdict_of(rep, "m-condition-scan") == "PASS");
  CHECK(verdict_of(rep, "whitney-a-limit") == "HOLDS");
}

TEST_CASE("check ex-5.2: strong Milnor passes, the built-in sequence fails (a)") {
  Report rep = run_check(quick_cfg("ex-5.2"));
  CHECK(rep.exit_code == 1);  // the Whitney failure is recorded as FAIL
  CHECK(verdict_of(rep, "strong-milnor") == "PASS");
  CHECK(verdict_of(rep, "whitney-a-limit") == "FAILS");
  CHECK(rep.doc["convention"] ==
        std::string("Psi = cos(theta)*P - sin(theta)*Q"));
}

TEST_CASE("check milnor-1.1: strong Milnor fails with witnesses") {
  Report rep = run_check(quick_cfg("milnor-1.1"));
  CHECK(rep.exit_code == 1);
  CHECK(verdict_of(rep, "strong-milnor") == "FAIL");
  bool found_witness = false;
  for (const auto& r : rep.doc["results"])
    if (r.contains("op") && r["op"] == "strong-milnor" && !r["witnesses"].empty())
      found_witness = true;
  CHECK(found_witness);
}

TEST_CASE("fibrate gate refuses milnor-1.1 without force") {
  RunConfig cfg = quick_cfg("milnor-1.1");
  cfg.eps = 0.05;
  Report rep = run_fibrate(cfg);
  CHECK(rep.exit_code == 1);
  CHECK(rep.doc.contains("refused"));
}

TEST_CASE("fibrate ex-5.3 exports the two-point link") {
  RunConfig cfg = quick_cfg("ex-5.3");
  cfg.eps = 0.1;
  cfg.phases = 2;
  cfg.out_dir = "/tmp/smf_cli_out";
  std::filesystem::remove_all(cfg.out_dir);
  Report rep = run_fibrate(cfg);
  CHECK(rep.exit_code == 0);
  bool link_found = false;
  for (const auto& r : rep.doc["results"])
    if (r.contains("op") && r["op"] == "link") {
      CHECK(r["count"] == 2);
      link_found = true;
    }
  CHECK(link_found);
  CHECK(std::filesystem::exists("/tmp/smf_cli_out/ex-5.3-link-0.1.csv"));
  // csv has two data rows
  std::ifstream in("/tmp/smf_cli_out/ex-5.3-link-0.1.csv");
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("strata with the built-in sequence reports the limits") {
  RunConfig cfg = quick_cfg("ex-5.2");
  cfg.builtin_curve = true;
  Report rep = run_strata(cfg);
  CHECK(rep.exit_code == 1);  // Whitney (a) fails along the sequence
  CHECK(verdict_of(rep, "whitney-a-limit") == "FAILS");
  CHECK(verdict_of(rep, "c-regularity-limit") == "HOLDS");
  // the ratio diagnostic is skipped: the curve heads to the origin
  bool skipped = false;
  for (const auto& r : rep.doc["results"])
    if (r.contains("op") && r["op"] == "curve-ratio-diagnostic")
      skipped = r.contains("skipped");
  CHECK(skipped);
}

TEST_CASE("strata rejects malformed curves with the residual coefficient") {
  {
    std::ofstream out("/tmp/smf_cli_bad.curve");
    out << "x = s\ny = s\ntheta = pi/2\n";
  }
  RunConfig cfg = quick_cfg("ex-5.2");
  cfg.curve_file = "/tmp/smf_cli_bad.curve";
  Report rep = run_strata(cfg);
  // the per-diagnostic errors are recorded, not thrown
  bool named = false;
  for (const auto& r : rep.doc["results"])
    if (r.contains("skipped")) {
      std::string msg = r["skipped"].get<std::string>();
      named = named || msg.find("degree 3") != std::string::npos;
    }
  CHECK(named);
}

TEST_CASE("reports are byte-identical for identical config and seed") {
  RunConfig cfg = quick_cfg("ex-5.2");
  Report a = run_check(cfg);
  Report b = run_check(cfg);
  CHECK(a.reproducible_body() == b.reproducible_body());
  CHECK(a.doc.contains("timing"));

  RunConfig fcfg = quick_cfg("ex-5.3");
  fcfg.phases = 2;
  Report fa = run_fibrate(fcfg);
  Report fb = run_fibrate(fcfg);
  CHECK(fa.reproducible_body() == fb.reproducible_body());
}

TEST_CASE("export-examples writes loadable fixtures") {
  RunConfig cfg;
  cfg.out_dir = "/tmp/smf_cli_examples";
  std::filesystem::remove_all(cfg.out_dir);
  Report rep = run_export_examples(cfg);
  CHECK(rep.exit_code == 0);
  for (const auto& key : registry_keys()) {
    std::string path = "/tmp/smf_cli_examples/" + key + ".germ";
    REQUIRE(std::filesystem::exists(path));
    MapGerm g = load_germ_file(path);
    CHECK(g.P() == registry_get(key).germ.P());
    CHECK(g.Q() == registry_get(key).germ.Q());
  }
  CHECK(std::filesystem::exists("/tmp/smf_cli_examples/radial.curve"));
}

TEST_CASE("list covers the registry") {
  Report rep = run_list();
  CHECK(rep.doc["results"].size() == registry_keys().size());
}

TEST_CASE("tool subprocess exit codes") {
  CHECK(tool_exit("list") == 0);
  CHECK(tool_exit("check identity --grid 4 --cascade 1") == 0);
  CHECK(tool_exit("check ex-5.2 --grid 4 --cascade 1") == 1);
  CHECK(tool_exit("fibrate milnor-1.1 --eps 0.05") == 1);
  CHECK(tool_exit("strata identity") == 3);     // no curve given
  CHECK(tool_exit("check no-such-germ") == 3);  // unknown germ
  CHECK(tool_exit("bogus-subcommand") == 3);
  CHECK(tool_exit("--help") == 0);
}
