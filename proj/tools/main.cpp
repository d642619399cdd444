#include <iostream>

#include <CLI11.hpp>

#include "cqed/app.hpp"
#include "cqed/errors.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"circuit-QED resonator-qudit gate simulator"};
  cli.require_subcommand(1);

  auto* list = cli.add_subcommand("list-presets", "show named parameter sets");
  auto* run = cli.add_subcommand("run", "run an experiment");
  std::string experiment, preset, out, config_file;
  std::vector<std::string> sets;
  int cutoff = 0;
  long long seed = 0;
  run->add_option("--experiment", experiment, "selective-rabi | cphase | ccphase | prepare | calibrate | shift-table");
  run->add_option("--preset", preset, "parameter set name");
  run->add_option("--config", config_file, "key = value file");
  run->add_option("--set", sets, "override key=value (repeatable)");
  auto* out_opt = run->add_option("--out", out, "output directory");
  auto* cutoff_opt = run->add_option("--cutoff", cutoff, "photon cutoff per resonator");
  auto* seed_opt = run->add_option("--seed", seed, "robustness-input seed");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*list) {
    cqed::app::list_presets(std::cout);
    return 0;
  }
  try {
    cqed::app::Config cfg;
    if (!preset.empty()) cfg.apply_preset(cqed::app::find_preset(preset));
    if (!config_file.empty()) {
      cqed::app::Config probe;
      probe.load_file(config_file);
      if (preset.empty() && probe.has("preset")) cfg.apply_preset(cqed::app::find_preset(probe.text("preset")));
      cfg.load_file(config_file);
    }
    for (const auto& s : sets) cfg.set_assignment(s, "--set " + s);
    if (!experiment.empty()) cfg.set("experiment", experiment, "--experiment");
    if (*out_opt) cfg.set("out", out, "--out");
    if (*cutoff_opt) cfg.set("cutoff", std::to_string(cutoff), "--cutoff");
    if (*seed_opt) cfg.set("seed", std::to_string(seed), "--seed");
    cqed::app::run(cfg, std::cerr);
    return 0;
  } catch (const cqed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cqed::PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << '\n';
    return 1;
  } catch (const cqed::IntegrationError& e) {
    std::cerr << "integration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
