#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "ramda/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Structured-regularization optimizer toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false, out_set = false;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "JSON run configuration")
        ->required();
    cmd->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--out-dir", out_dir, "override the output directory")
        ->each([&](const std::string&) { out_set = true; });
  };

  CLI::App* train = app.add_subcommand("train", "run a training experiment");
  add_overrides(train);

  CLI::App* oracle =
      app.add_subcommand("oracle", "full-batch reference solve for a config");
  add_overrides(oracle);

  std::vector<std::string> summaries;
  CLI::App* compare =
      app.add_subcommand("compare", "tabulate training summaries");
  compare->add_option("summaries", summaries, "summary JSON files");

  CLI11_PARSE(app, argc, argv);

  if (compare->parsed())
    return ramda::compare_summaries(summaries, std::cout);

  ramda::RunConfig cfg;
  try {
    cfg = ramda::RunConfig::from_json_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (seed_set) cfg.seed = seed;
  if (out_set) cfg.out_dir = out_dir;

  if (train->parsed()) return ramda::run_training(cfg, std::cout);
  return ramda::run_oracle(cfg, std::cout);
}
