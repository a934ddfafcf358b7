// leafwalk <discretize|stationary|check|lyapunov|moments|report> --config PATH --seed U64 --out DIR
//
// Exit status: 0 all diagnostics pass, 1 some threshold fails or the run
// aborts, 2 bad command line or configuration.

#include <iostream>

#include <CLI11.hpp>

#include "leafwalk/config.hpp"
#include "leafwalk/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace leafwalk;

  CLI::App app{"Discretized Brownian motion, stationary measures and harmonic conditionals on the Gamma(2) orbit"};
  app.set_help_flag("-h,--help", "Show usage");
  std::string sub_name;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  app.add_option("subcommand", sub_name, "discretize | stationary | check | lyapunov | moments | report")
      ->required();
  auto* config_opt = app.add_option("--config", config_path, "Plain-text configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_flag("-q,--quiet", "Suppress per-row output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto sub = pipeline::parse_subcommand(sub_name);
  if (!sub) {
    std::cerr << "leafwalk: unknown subcommand '" << sub_name << "'\n";
    return 2;
  }

  config::Config cfg;
  try {
    if (*config_opt) cfg = config::load_config(config_path);
  } catch (const config::ConfigError& e) {
    std::cerr << "leafwalk: " << config_path << ": " << e.what() << "\n";
    return 2;
  }
  if (*seed_opt) cfg.seed = seed;
  if (*out_opt) cfg.out = out_dir;

  std::ostream* log = app.count("--quiet") ? nullptr : &std::cout;
  try {
    const auto outcome = pipeline::run(*sub, cfg, cfg.out, log);
    if (outcome.exit_code != 0) std::cerr << "leafwalk: some diagnostics failed\n";
    return outcome.exit_code;
  } catch (const config::ConfigError& e) {
    std::cerr << "leafwalk: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "leafwalk: " << e.what() << "\n";
    return 1;
  }
}
