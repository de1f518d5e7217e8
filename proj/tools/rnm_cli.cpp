#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "rnm/config.hpp"
#include "rnm/runner.hpp"

using namespace rnm;

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo engine for a renormalized particle-field semigroup"};
  app.require_subcommand(1);

  std::string config_path, outdir;
  int threads = 1;
  app.add_option("-c,--config", config_path, "config file (flat key = value)");
  app.add_option("-o,--out", outdir,
                 "output directory (default: output_dir from config)");
  app.add_option("-j,--threads", threads,
                 "worker threads; results never depend on this")
      ->envname("RNM_THREADS");

  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  auto* semigroup = app.add_subcommand(
      "semigroup", "fiber semigroup estimates over xi, t and the cutoff ladder");
  auto* sweep =
      app.add_subcommand("sweep", "cutoff convergence with common paths");
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "truncated-basis spectra and renormalization scan");
  auto* compare = app.add_subcommand(
      "compare", "path estimate vs truncated-basis value, vacuum labels");
  auto* action_id = app.add_subcommand(
      "action-id", "pathwise identity of the two action forms");

  auto* paths = app.add_subcommand("paths", "sample paths and dump them as CSV");
  runner::PathDumpArgs pd;
  paths->add_option("--n", pd.n, "paths to dump");
  paths->add_option("--seed", pd.seed, "stream seed");
  paths->add_option("--t", pd.t, "horizon");
  paths->add_option("--eps", pd.eps, "small-jump floor");

  auto* rerun = app.add_subcommand("rerun", "re-execute a recorded manifest");
  std::string manifest_path;
  rerun->add_option("-m,--manifest", manifest_path, "manifest.json to replay")
      ->required();

  // let the shared --config/--out/--threads flags appear after the
  // subcommand name as well
  for (auto* s : app.get_subcommands([](const CLI::App*) { return true; }))
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return runner::kExitConfig;
  }

  try {
    runner::RunContext ctx;
    if (!config_path.empty()) ctx.cfg = config::load_config(config_path);
    ctx.outdir = !outdir.empty() ? outdir : ctx.cfg.output_dir;
    if (threads < 1 || threads > 256)
      throw config::ConfigError("--threads out of range");
    ctx.threads = threads;

    int status = 0;
    std::string where = ctx.outdir;
    if (app.got_subcommand(validate)) {
      status = runner::run_validate(ctx);
    } else if (app.got_subcommand(semigroup)) {
      status = runner::run_semigroup(ctx);
    } else if (app.got_subcommand(sweep)) {
      status = runner::run_sweep(ctx);
    } else if (app.got_subcommand(oracle_cmd)) {
      status = runner::run_oracle(ctx);
    } else if (app.got_subcommand(compare)) {
      status = runner::run_compare(ctx);
    } else if (app.got_subcommand(action_id)) {
      status = runner::run_action_id(ctx);
    } else if (app.got_subcommand(paths)) {
      // flags win; otherwise follow the config
      if (paths->count("--seed") == 0) pd.seed = ctx.cfg.seed;
      if (paths->count("--t") == 0) pd.t = ctx.cfg.times[0];
      if (paths->count("--eps") == 0) pd.eps = ctx.cfg.eps;
      status = runner::run_paths(ctx, pd);
    } else if (app.got_subcommand(rerun)) {
      where = !outdir.empty() ? outdir : "rerun_out";
      status = runner::rerun_manifest(manifest_path, where, threads);
    }
    std::fprintf(stdout, "%s: %s (outputs in %s)\n",
                 app.get_subcommands().front()->get_name().c_str(),
                 status == runner::kExitOk ? "ok" : "budget exceeded",
                 where.c_str());
    return status;
  } catch (const config::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return runner::kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return runner::kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return runner::kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return runner::kExitConfig;
  }
}
