// Command-line front end: certification, stratification diagnostics and
// fibration construction for polynomial map germs (P,Q): (R^m,0) -> (R^2,0).
//
// Exit codes: 0 all checks passed / run complete, 1 any FAIL, 2 any UNKNOWN,
// 3 usage or input errors.

#include <cstdio>
#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "smf/report.hpp"

namespace {

void add_common(CLI::App* sub, smf::RunConfig& cfg, bool with_germ = true) {
  if (with_germ)
    sub->add_option("germ", cfg.germ_source,
                    "registry key (see `smf list`) or germ file path");
  sub->add_option("--eps", cfg.eps, "sphere radius");
  sub->add_option("--rin", cfg.r_in, "inner annulus radius");
  sub->add_option("--rout", cfg.r_out, "outer annulus radius");
  sub->add_option("--rho", cfg.rho, "target angle margin in (0, 1]");
  sub->add_option("--delta", cfg.delta, "gradient-angle margin in (0, 1)");
  sub->add_option("--depth", cfg.depth, "subdivision depth limit");
  sub->add_option("--tol", cfg.tol, "solver/flow tolerance");
  sub->add_option("--grid", cfg.grid, "theta grid size for the scan");
  sub->add_option("--phases", cfg.phases, "number of fiber phases");
  sub->add_option("--seed", cfg.seed, "seed for randomized samplers");
  sub->add_option("--workers", cfg.workers, "parallel workers for subdivision");
  sub->add_option("--out", cfg.out_dir, "output directory for exports");
  sub->add_option("--cascade", cfg.cascade, "inner-radius halvings in `check`");
}

int emit(const smf::Report& rep) {
  std::cout << rep.str();
  return rep.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified strong Milnor fibrations for polynomial map germs"};
  app.require_subcommand(1);

  smf::RunConfig cfg;

  auto* list = app.add_subcommand("list", "print the built-in germ registry");
  auto* check = app.add_subcommand(
      "check", "certify isolated singularity, angle bounds and the theta scan");
  add_common(check, cfg);
  auto* fibrate = app.add_subcommand(
      "fibrate", "compute the link, sample fibers and verify transport");
  add_common(fibrate, cfg);
  fibrate->add_flag("--force", cfg.force, "skip the strong Milnor gate");
  auto* strata = app.add_subcommand(
      "strata", "limit diagnostics along a test curve");
  add_common(strata, cfg);
  strata->add_option("--curve", cfg.curve_file, "curve file (key = value format)");
  strata->add_flag("--builtin-curve", cfg.builtin_curve,
                   "use the germ's built-in curve");
  auto* link = app.add_subcommand("link", "compute the link at radius eps");
  add_common(link, cfg);
  auto* exex = app.add_subcommand("export-examples",
                                  "write registry germs and a sample curve");
  exex->add_option("--out", cfg.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (list->parsed()) return emit(smf::run_list());
    if (check->parsed()) return emit(smf::run_check(cfg));
    if (fibrate->parsed()) return emit(smf::run_fibrate(cfg));
    if (strata->parsed()) return emit(smf::run_strata(cfg));
    if (link->parsed()) return emit(smf::run_link(cfg));
    if (exex->parsed()) return emit(smf::run_export_examples(cfg));
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 3;
}
