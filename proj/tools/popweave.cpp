#include "popweave/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  namespace cli = popweave::cli;
  CLI::App app{"Synthetic populations and typed social networks from Bayesian networks"};
  app.set_version_flag("--version", cli::kToolVersion);
  app.require_subcommand(1);

  cli::ValidateOptions validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and every network it uses");
  validate_cmd->add_option("scenario", validate.scenario, "Scenario file")->required();
  validate_cmd->add_flag("--strict", validate.strict, "Exit 1 on warnings");

  cli::GenerateOptions generate;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a population and its network");
  generate_cmd->add_option("scenario", generate.scenario, "Scenario file")->required();
  auto* size_opt = generate_cmd->add_option("--size", size, "Population size");
  auto* seed_opt = generate_cmd->add_option("--seed", seed, "Random seed");
  generate_cmd->add_option("--out", generate.out_dir, "Output directory")->required();
  generate_cmd->add_option("--format", generate.format, "Merged graph format")
      ->check(CLI::IsMember({"graphml", "csv", "dot"}));

  cli::StatsOptions stats;
  std::string nodes, stats_out;
  auto* stats_cmd = app.add_subcommand("stats", "Graph statistics of generated edge files");
  stats_cmd->add_option("inputs", stats.inputs, "Edge CSV files or generate output dirs")
      ->required();
  stats_cmd->add_option("--nodes", nodes, "Node CSV (one row per agent)");
  stats_cmd->add_option("--out", stats_out, "Write stats CSV here");
  stats_cmd->add_option("--path-samples", stats.path_samples, "BFS sources for path length");
  stats_cmd->add_option("--seed", stats.seed, "Seed for source sampling");

  cli::SweepOptions sweep;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Error and statistics table over population sizes");
  sweep_cmd->add_option("scenario", sweep.scenario, "Scenario file")->required();
  sweep_cmd->add_option("--sizes", sweep.sizes, "Population sizes")->delimiter(',')->required();
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per size");
  sweep_cmd->add_option("--out", sweep_out, "Output CSV (default: standard output)");
  sweep_cmd->add_option("--path-samples", sweep.path_samples, "BFS sources for path length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInputError;
  }

  if (*validate_cmd) return cli::cmd_validate(validate, std::cout, std::cerr);
  if (*generate_cmd) {
    if (*size_opt) generate.size = size;
    if (*seed_opt) generate.seed = seed;
    return cli::cmd_generate(generate, std::cout, std::cerr);
  }
  if (*stats_cmd) {
    if (!nodes.empty()) stats.nodes = nodes;
    if (!stats_out.empty()) stats.out = stats_out;
    return cli::cmd_stats(stats, std::cout, std::cerr);
  }
  if (*sweep_cmd) {
    if (!sweep_out.empty()) sweep.out = sweep_out;
    return cli::cmd_sweep(sweep, std::cout, std::cerr);
  }
  return cli::kExitInputError;
}
