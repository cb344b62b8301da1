// Command-line entry point. See README for the command set.

#include <CLI11.hpp>

#include "toric/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"toric: lattice-polytope volume bounds and the analytic machinery "
               "behind them (KE solver, geodesics, Green functions)"};
  app.require_subcommand(1);
  toric::RunConfig cfg;

  app.add_option("--jobs", cfg.jobs, "worker threads for parallel commands");
  app.add_option("--seed", cfg.seed, "random seed (fixed seed -> identical reports)");
  app.add_option("--out-dir", cfg.out_dir, "directory for default artifact names");

  auto* analyze = app.add_subcommand("analyze", "exact invariants of one polytope");
  analyze->add_option("--polytope", cfg.polytope_file)->required();
  analyze->add_option("--out", cfg.out_file);

  auto* enumerate = app.add_subcommand("enumerate", "reflexive polytopes up to equivalence");
  enumerate->add_option("--dim", cfg.dim)->required();
  enumerate->add_option("--box", cfg.box);
  enumerate->add_option("--budget", cfg.budget);
  enumerate->add_option("--out", cfg.out_file);

  auto* audit = app.add_subcommand("audit", "degree bound over a catalog");
  audit->add_option("--in", cfg.in_file);
  audit->add_option("--dim", cfg.dim);
  audit->add_option("--box", cfg.box);
  audit->add_option("--budget", cfg.budget);
  audit->add_option("--scope", cfg.scope, "smooth | all-reflexive");
  audit->add_option("--out", cfg.report_file);
  audit->add_option("--csv", cfg.csv_file);

  auto* solve = app.add_subcommand("solve", "toric Kaehler-Einstein potential");
  solve->add_option("--polytope", cfg.polytope_file)->required();
  solve->add_option("--res", cfg.res);
  solve->add_option("--box", cfg.box_size);
  solve->add_option("--tol", cfg.tol);
  solve->add_option("--out", cfg.out_file);
  solve->add_option("--report", cfg.report_file);

  auto* geodesic = app.add_subcommand("geodesic", "Legendre geodesic trace");
  geodesic->add_option("--u0", cfg.in_file)->required();
  geodesic->add_option("--u1", cfg.in_file2)->required();
  geodesic->add_option("--samples", cfg.samples);
  geodesic->add_option("--v-omega", cfg.v_omega);
  geodesic->add_option("--tol", cfg.tol);
  geodesic->add_option("--report", cfg.report_file);

  auto* mtcheck = app.add_subcommand("mtcheck", "Moser-Trudinger margins vs a KE reference");
  mtcheck->add_option("--ref", cfg.in_file)->required();
  mtcheck->add_option("--suite", cfg.suite);
  mtcheck->add_option("--level-frac", cfg.level_frac);
  mtcheck->add_option("--report", cfg.report_file);

  auto* green = app.add_subcommand("green", "pluricomplex Green function");
  green->add_option("--domain", cfg.domain_file)->required();
  green->add_option("--res", cfg.res);
  green->add_option("--box", cfg.box_size, "half-depth of the log grid");
  green->add_option("--simplex-res", cfg.green_simplex_res);
  green->add_option("--out", cfg.out_file);

  auto* bm = app.add_subcommand("bm", "Brezis-Merle checks");
  bm->add_option("--mode", cfg.mode, "disc | product");
  bm->add_option("--in", cfg.in_file)->required();
  bm->add_option("--mass", cfg.mass, "MA mass; omit for auto");
  bm->add_option("--v-omega", cfg.v_omega);
  bm->add_option("--mt-constant", cfg.mt_constant);
  bm->add_option("--report", cfg.report_file);

  auto* pipeline = app.add_subcommand("pipeline", "invariants -> solve -> sweeps -> probes");
  pipeline->add_option("--polytope", cfg.polytope_file)->required();
  pipeline->add_option("--res", cfg.res);
  pipeline->add_option("--box", cfg.box_size);
  pipeline->add_option("--level-frac", cfg.level_frac);
  pipeline->add_option("--synthetic-v", cfg.synthetic_v);
  pipeline->add_option("--report", cfg.report_file);

  CLI11_PARSE(app, argc, argv);
  for (auto* sub : {analyze, enumerate, audit, solve, geodesic, mtcheck, green, bm, pipeline})
    if (sub->parsed()) cfg.command = sub->get_name();
  return toric::dispatch(cfg);
}
