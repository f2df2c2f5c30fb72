// Experiment runner: halfline <scatter|evolve|decay|strichartz|check> [options]
//
// Exit status: 0 all properties hold, 1 a property failed (outputs are still
// written), 2 invalid configuration, 3 pipeline error. Configuration and
// pipeline errors leave no output behind.

#include <iostream>

#include <CLI11.hpp>

#include "halfline/errors.hpp"
#include "halfline/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::string out;
  std::string mode;
  long long seed = -1;
};

halfline::ExperimentConfig resolve(const Flags& f) {
  using namespace halfline;
  ExperimentConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
    if (!f.preset.empty()) {
      c.potential = preset_potential(f.preset);
      c.potential_label = f.preset;
      c.potential_spec = Json{{"preset", f.preset}};
    }
  } else {
    Json j = Json::object();
    if (!f.preset.empty()) j["potential"] = Json{{"preset", f.preset}};
    c = parse_config(j);
  }
  if (!f.out.empty()) c.output = f.out;
  if (!f.mode.empty()) c.mode = parse_mode(f.mode);
  if (f.seed >= 0) c.seed = static_cast<std::uint64_t>(f.seed);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace halfline;
  CLI::App app{"Half-line Schrodinger scattering and dispersive estimates"};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"scatter", "Jost function, Marchenko kernel, scattering matrix and bound states"},
      {"evolve", "Evolve initial data with the kernel propagator and/or the oracle"},
      {"decay", "Fit L^p -> L^p' decay exponents"},
      {"strichartz", "Strichartz ratios under T doubling"},
      {"check", "Run the full property suite"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--preset", flags.preset, "Named potential (free, shallow-well, deep-well, exp, gaussian)");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--mode", flags.mode, "kernel, oracle or both");
    sub->add_option("--seed", flags.seed, "Seed for randomized forcing")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ExperimentConfig config;
  try {
    config = resolve(flags);
  } catch (const Error& e) {
    std::cerr << "error [" << e.module() << "] " << e.what() << "\n";
    return 2;
  }

  Outcome outcome;
  try {
    if (command == "scatter") outcome = run_scatter(config);
    else if (command == "evolve") outcome = run_evolve(config);
    else if (command == "decay") outcome = run_decay(config);
    else if (command == "strichartz") outcome = run_strichartz(config);
    else outcome = run_check(config);
    outcome.add_json("config.json", config.to_json());
    commit(outcome, config.output);
  } catch (const Error& e) {
    std::cerr << "error [" << e.module() << "] " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error " << e.what() << "\n";
    return 3;
  }
  std::cout << outcome.summary;
  if (!outcome.ok()) {
    std::cerr << outcome.failures.size() << " propert" << (outcome.failures.size() == 1 ? "y" : "ies") << " failed\n";
    return 1;
  }
  return 0;
}
