// omqm: command-line front end for the experiment runner.
//
//   omqm run --experiment wick-identity --preset unit
//   omqm run --experiment all --config lab.cfg --seed 7 --out results/
//   omqm quanta --preset unit --mass 2 --quanta_N 3

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "omqm/experiments.hpp"

namespace {

using omqm::cli::KeyValues;

struct Layers {
  std::string preset;
  std::string config_path;
  std::map<std::string, std::string> flags;
};

void add_layer_options(CLI::App& cmd, Layers& layers) {
  cmd.add_option("--preset", layers.preset, "parameter preset (unit: R=s=k_B=hbar=1)")
      ->check(CLI::IsMember({"unit"}));
  cmd.add_option("--config", layers.config_path, "flat key = value config file")
      ->check(CLI::ExistingFile);
  for (const auto& key : omqm::cli::config_keys()) {
    cmd.add_option("--" + key.name, layers.flags[key.name], key.help);
  }
}

KeyValues resolve(const CLI::App& cmd, const Layers& layers) {
  KeyValues base, file, flags;
  if (!layers.preset.empty()) base = omqm::cli::preset(layers.preset);
  if (!layers.config_path.empty()) file = omqm::cli::parse_config_file(layers.config_path);
  for (const auto& [name, value] : layers.flags) {
    if (cmd.count("--" + name) > 0) flags[name] = value;
  }
  return omqm::cli::merge({base, file, flags});
}

int run_command(const std::string& experiment, const KeyValues& kv) {
  const auto cfg = omqm::cli::build_config(experiment, kv);
  const auto report = omqm::cli::run(cfg);
  for (const auto& m : report.metrics) {
    std::cout << (m.pass() ? "PASS " : "FAIL ") << m.name << " = " << m.value << '\n';
  }
  std::cout << "report: " << (cfg.output / (experiment + "_report.json")).string() << '\n';
  return report.passed() ? omqm::cli::kExitOk : omqm::cli::kExitAssertion;
}

int quanta_command(const KeyValues& kv) {
  const auto cfg = omqm::cli::build_config("quanta", kv);
  const auto& pc = cfg.constants;
  const auto sl = omqm::second_law_quantum(pc, cfg.quanta.N);
  nlohmann::json j{
      {"time_from_temperature", omqm::time_from_temperature(pc, cfg.quanta.temperature)},
      {"compton_wavelength", omqm::compton_wavelength(pc, cfg.quanta.mass)},
      {"entropy_increase",
       omqm::entropy_increase(cfg.thermo, pc, cfg.quanta.mass, cfg.quanta.n)},
      {"second_law",
       {{"N", sl.quanta},
        {"delta_S", sl.delta_S},
        {"at_least_one_quantum", sl.at_least_one_quantum},
        {"uncertainty_bound", sl.uncertainty_bound},
        {"statement", sl.statement}}}};
  std::cout << j.dump(2) << '\n';
  return omqm::cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Onsager-Machlup / harmonic-oscillator duality laboratory"};
  app.require_subcommand(1);

  std::string experiment;
  Layers run_layers;
  auto* run = app.add_subcommand("run", "run a named experiment and write CSV + JSON report");
  std::string names;
  for (const auto& n : omqm::cli::experiment_names()) names += (names.empty() ? "" : " | ") + n;
  run->add_option("--experiment", experiment, names)->required();
  add_layer_options(*run, run_layers);

  Layers quanta_layers;
  auto* quanta = app.add_subcommand("quanta", "print the quantization calculator as JSON");
  add_layer_options(*quanta, quanta_layers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : omqm::cli::kExitConfig;
  }

  try {
    if (run->parsed()) return run_command(experiment, resolve(*run, run_layers));
    return quanta_command(resolve(*quanta, quanta_layers));
  } catch (const omqm::Error& e) {
    std::cerr << e.what() << '\n';
    return omqm::cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return omqm::cli::kExitNumeric;
  }
}
