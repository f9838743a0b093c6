// divlab: run a JSON experiment config against a group model and emit
// deterministic CSV/JSON artifacts plus a run manifest.
//
// Exit codes: 0 success, 2 validation/config error, 3 resource ceiling.

#include <iostream>

#include "CLI11.hpp"
#include "divlab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"divergence and conjugacy experiments on group Cayley graphs"};
  app.set_version_flag("--version", divlab::kToolVersion);

  divlab::CliOptions options;
  uint64_t seed = 0;
  app.add_option("-c,--config", options.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("-o,--out", options.out_dir, "output directory (default: current)");
  app.add_option("-t,--threads", options.threads,
                 "worker threads for the scans; 0 = hardware concurrency");
  app.add_option("-b,--budget-mb", options.budget_mb,
                 "ball memory budget in MiB; 0 = DIVLAB_BUDGET_MB env, else unlimited");
  CLI::Option* seed_opt =
      app.add_option("-s,--seed", seed, "override the config's sampling seed");
  app.add_flag("--timing", options.timing,
               "measure per-row wall times into the ms column (breaks byte-identical reruns)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0; any parse failure is a config error
  }
  if (seed_opt->count() > 0) options.seed = seed;

  return divlab::run_cli(options, std::cout, std::cerr);
}
