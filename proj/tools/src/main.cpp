#include <iostream>

#include "CLI11.hpp"
#include "scmocc_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace scmocc::cli;
  CLI::App app{"Semiclassical coupled-channel collisions and SES device mapping"};
  app.require_subcommand(1, 1);

  CommandOptions opts;
  std::string out;
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"run", "single trajectories: probability histories"},
      {"scan", "impact-parameter scans: opacity functions"},
      {"xsec", "integral cross sections, optionally Ehrenfest-relabeled"},
      {"ses", "SES device mapping and classical comparison"},
      {"bench", "propagator timing and accuracy study"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--jobs", opts.jobs, "worker threads, 0 = all")->check(CLI::NonNegativeNumber);
    sub->add_flag("--ehrenfest", opts.ehrenfest, "relabel cross-section energies");
    sub->add_option("--seed", seed, "seed for synthetic potentials (overrides run.seed)");
    sub->add_flag("--dump-trajectory", opts.dump_trajectory, "write t, R, dR/dt per trajectory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (!out.empty()) opts.out = out;
  if (chosen->count("--seed") > 0) opts.seed = seed;
  return dispatch(chosen->get_name(), opts, std::cout, std::cerr);
}
