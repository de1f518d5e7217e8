#pragma once

#include <cstdint>
#include <string>

#include "rnm/config.hpp"

namespace rnm::runner {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitBudget = 2;  // a numerical budget was missed
inline constexpr int kExitConfig = 3;  // bad config or arguments

struct RunContext {
  config::RunConfig cfg;
  std::string outdir = "out";
  int threads = 1;
};

// flag-driven knobs of the paths dump (flags win over config defaults)
struct PathDumpArgs {
  std::uint64_t n = 3;
  std::uint64_t seed = 7;
  double t = 1.0;
  double eps = 1e-3;
};

// each run writes its artifacts plus manifest.json (config hash, canonical
// config, outputs, status) into outdir and returns an exit code.  Nothing
// in any output depends on the wall clock or the thread count.
int run_validate(const RunContext& ctx);
int run_semigroup(const RunContext& ctx);
int run_sweep(const RunContext& ctx);
int run_oracle(const RunContext& ctx);
int run_compare(const RunContext& ctx);
int run_paths(const RunContext& ctx, const PathDumpArgs& args);
int run_action_id(const RunContext& ctx);

// re-execute the run recorded in a manifest; byte-identical artifacts land
// in outdir
int rerun_manifest(const std::string& manifest_path, const std::string& outdir,
                   int threads);

}  // namespace rnm::runner
