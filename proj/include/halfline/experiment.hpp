#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halfline/io.hpp"
#include "halfline/potential.hpp"

namespace halfline {

enum class RunMode { kernel, oracle, both };

RunMode parse_mode(const std::string& s);
std::string mode_name(RunMode m);

/// Named potentials: free, shallow-well, deep-well, exp, gaussian.
Potential preset_potential(const std::string& name);
std::vector<std::string> preset_names();

struct Tolerances {
  double crosscheck = 1e-2;   ///< kernel vs oracle relative L2
  double exponent = 0.1;      ///< |alpha - (1/p - 1/2)|
  double strichartz = 0.05;   ///< relative change of a ratio under T doubling
  double unimodularity = 1e-8;
};

struct Grids {
  double lattice_step = 1.0 / 32.0;  ///< propagator lattice on [0, lattice_extent]
  double lattice_extent = 40.0;
  double crosscheck_box = 200.0;     ///< oracle for kernel cross-checks
  long crosscheck_cells = 8192;
  double decay_box = 600.0;          ///< oracle for long-time fits
  long decay_cells = 8192;
};

struct ExperimentConfig {
  std::string potential_label = "deep-well";
  Json potential_spec;  ///< as given: {"preset": ...}, {"file": ...} or an inline potential
  Potential potential = Potential::zero();
  /// Data for evolve, cross-checks and Strichartz sums.
  std::string profile = "xgauss";
  std::vector<double> profile_params{2.0};
  /// Data for decay fits; narrower so the fit window sits in the asymptotic regime.
  std::string decay_profile = "xgauss";
  std::vector<double> decay_profile_params{1.0};
  RunMode mode = RunMode::both;
  std::vector<double> p_list{1.0, 4.0 / 3.0, 2.0};
  std::vector<double> times{1, 2, 4, 8, 16, 32, 64};
  std::vector<double> evolve_times{1, 2, 4, 8};
  std::vector<double> strichartz_T{32, 64};
  std::string output = "out";
  std::optional<std::uint64_t> seed;
  Tolerances tolerances;
  Grids grids;

  Json to_json() const;
};

/// Parses and validates; throws ConfigError naming the offending field.
/// Relative potential file paths resolve against `base_dir`.
ExperimentConfig parse_config(const Json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Files and verdict of one subcommand. Nothing touches the disk until `commit`.
struct Outcome {
  std::map<std::string, std::string> files;
  std::vector<std::string> failures;
  std::string summary;
  bool ok() const { return failures.empty(); }
  void add_json(const std::string& name, Json j);
  void line(const std::string& text);
  void require(bool condition, const std::string& what);
  void merge(Outcome other);
};

Outcome run_scatter(const ExperimentConfig& c);
Outcome run_evolve(const ExperimentConfig& c);
Outcome run_decay(const ExperimentConfig& c);
Outcome run_strichartz(const ExperimentConfig& c);
/// scatter + evolve + decay + strichartz + form bound.
Outcome run_check(const ExperimentConfig& c);

/// Writes every file plus summary.txt into `dir`, staging them in a sibling
/// directory first so a failure leaves no partial output behind.
void commit(const Outcome& outcome, const std::string& dir);

}  // namespace halfline
