#include <muslx/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Stochastic monotone-operator PDE solver and verification harness"};
  app.require_subcommand(1);

  muslx::CliOptions opts;
  std::uint64_t seed = 0;
  int paths = 0;
  std::string out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--paths", paths, "override the Monte Carlo path count");
    sub->add_option("--out", out, "output directory (output file for conjugate-table)");
    sub->add_flag("--quiet", opts.quiet, "suppress summary output");
  };

  std::string config;
  auto* run = app.add_subcommand("run", "solve and run the selected checks");
  run->add_option("config", config, "experiment JSON")->required();
  add_common(run);

  std::string dial;
  std::vector<std::string> values;
  auto* cascade = app.add_subcommand("cascade", "epsilon or noise-mode cascade");
  cascade->add_option("config", config, "experiment JSON")->required();
  cascade->add_option("--dial", dial, "eps or modes")->required();
  cascade->add_option("--values", values, "comma-separated list")->required()->delimiter(',');
  add_common(cascade);

  std::string name;
  auto* conj = app.add_subcommand("conjugate-table", "tabulate the convex conjugate of a Young function");
  conj->add_option("name", name, "power:p, exp_beta:B,beta or zygmund")->required();
  add_common(conj);

  std::string dir;
  auto* verify = app.add_subcommand("verify", "re-run the energy check on a stored run directory");
  verify->add_option("dir", dir, "directory written by run")->required();
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : muslx::exit_config;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--paths")) opts.paths = paths;
    if (sub->count("--out")) opts.out = out;
  }

  if (*run) return muslx::run_command(config, opts, std::cout, std::cerr);
  if (*cascade) return muslx::cascade_command(config, dial, values, opts, std::cout, std::cerr);
  if (*conj) return muslx::conjugate_table_command(name, opts, std::cout, std::cerr);
  return muslx::verify_command(dir, opts, std::cout, std::cerr);
}
