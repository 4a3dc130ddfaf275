#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "smf/certify.hpp"
#include "smf/strata.hpp"

namespace smf {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string germ_source = "identity";
  double eps = 0.1;
  double r_in = 0.05;
  double r_out = 0.1;
  int cascade = 4;  // number of inner-radius halvings tried by `check`
  double rho = 0.05;
  double delta = 0.05;
  double tol = 1e-10;
  int depth = 40;
  int grid = 16;
  int phases = 8;
  std::uint64_t seed = 0x20260808;
  int workers = 1;
  bool force = false;
  std::string out_dir;
  std::string curve_file;
  bool builtin_curve = false;
};

// Assembled run output: a deterministic JSON body (given config and seed)
// plus a timing section that is excluded from reproducibility comparisons.
struct Report {
  Json doc;
  int exit_code = 0;

  std::string str() const { return doc.dump(2) + "\n"; }
  // body with the timing section stripped: byte-identical across reruns
  std::string reproducible_body() const;
};

Json to_json(const Certificate& c);
Json to_json(const LimitReport& r);

Report run_list();
Report run_check(const RunConfig& cfg);
Report run_fibrate(const RunConfig& cfg);
Report run_strata(const RunConfig& cfg);
Report run_link(const RunConfig& cfg);
Report run_export_examples(const RunConfig& cfg);

}  // namespace smf
