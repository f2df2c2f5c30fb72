#include "halfline/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "halfline/errors.hpp"
#include "halfline/estimates.hpp"
#include "halfline/jost.hpp"
#include "halfline/oracle.hpp"
#include "halfline/propagator.hpp"
#include "halfline/scattering.hpp"

namespace halfline {

namespace fs = std::filesystem;

RunMode parse_mode(const std::string& s) {
  if (s == "kernel") return RunMode::kernel;
  if (s == "oracle") return RunMode::oracle;
  if (s == "both") return RunMode::both;
  throw ConfigError("cli", "mode must be kernel, oracle or both (got '" + s + "')");
}

std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::kernel: return "kernel";
    case RunMode::oracle: return "oracle";
    default: return "both";
  }
}

Potential preset_potential(const std::string& name) {
  if (name == "free") return Potential::zero();
  if (name == "shallow-well") return Potential::square_well(1.0, 1.0);
  if (name == "deep-well") return Potential::square_well(10.0, 1.0);
  if (name == "exp") return Potential::exponential(1.0, 1.0, 10.0);
  if (name == "gaussian") return Potential::gaussian(-2.0, 1.5, 0.5, 4.0);
  throw ConfigError("cli", "unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"free", "shallow-well", "deep-well", "exp", "gaussian"}; }

// ---------------------------------------------------------------------------
// configuration

namespace {
std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> numbers(const Json& j, const char* key) {
  if (!j.is_array() || j.empty()) throw ConfigError("cli", std::string("'") + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError("cli", std::string("'") + key + "' holds a non-number");
    out.push_back(e.get<double>());
  }
  return out;
}

double number(const Json& j, const char* key) {
  if (!j.is_number()) throw ConfigError("cli", std::string("'") + key + "' must be a number");
  return j.get<double>();
}

void require_positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("cli", std::string("'") + key + "' must be positive");
}
}  // namespace

Json ExperimentConfig::to_json() const {
  Json j;
  j["potential"] = potential_spec;
  j["potential_resolved"] = potential_to_json(potential);
  j["initial"] = {{"profile", profile}, {"params", profile_params}};
  j["decay_initial"] = {{"profile", decay_profile}, {"params", decay_profile_params}};
  j["mode"] = mode_name(mode);
  j["p"] = p_list;
  j["times"] = times;
  j["evolve_times"] = evolve_times;
  j["strichartz_T"] = strichartz_T;
  if (seed) j["seed"] = *seed;
  j["tolerances"] = {{"crosscheck", tolerances.crosscheck},
                     {"exponent", tolerances.exponent},
                     {"strichartz", tolerances.strichartz},
                     {"unimodularity", tolerances.unimodularity}};
  j["grids"] = {{"lattice_step", grids.lattice_step},     {"lattice_extent", grids.lattice_extent},
                {"crosscheck_box", grids.crosscheck_box}, {"crosscheck_cells", grids.crosscheck_cells},
                {"decay_box", grids.decay_box},           {"decay_cells", grids.decay_cells}};
  return j;
}

ExperimentConfig parse_config(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("cli", "config must be a JSON object");
  static const std::vector<std::string> known{"potential", "initial", "decay_initial", "mode", "p", "times", "evolve_times",
                                              "strichartz_T", "output", "seed", "tolerances", "grids",
                                              // written by to_json and the CLI; informational on input
                                              "potential_resolved", "schema_version"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("cli", "unknown config field '" + key + "'");

  ExperimentConfig c;
  c.potential_spec = j.value("potential", Json{{"preset", "deep-well"}});
  const Json& ps = c.potential_spec;
  if (ps.is_string()) {
    c.potential_label = ps.get<std::string>();
    c.potential = preset_potential(c.potential_label);
  } else if (ps.is_object() && ps.contains("preset")) {
    if (!ps["preset"].is_string()) throw ConfigError("cli", "'potential.preset' must be a string");
    c.potential_label = ps["preset"];
    c.potential = preset_potential(c.potential_label);
  } else if (ps.is_object() && ps.contains("file")) {
    if (!ps["file"].is_string()) throw ConfigError("cli", "'potential.file' must be a string");
    fs::path path = ps["file"].get<std::string>();
    if (path.is_relative()) path = fs::path(base_dir) / path;
    if (!fs::exists(path)) throw ConfigError("cli", "potential file not found: " + path.string());
    c.potential = load_potential(path.string());
    c.potential_label = path.stem().string();
  } else if (ps.is_object()) {
    c.potential = potential_from_json(ps);
    c.potential_label = c.potential.name();
  } else {
    throw ConfigError("cli", "'potential' must be a preset name, {preset}, {file} or an inline potential");
  }

  auto read_profile = [&](const char* key, std::string& name, std::vector<double>& params) {
    if (!j.contains(key)) return;
    const Json& in = j[key];
    if (!in.is_object() || !in.contains("profile") || !in["profile"].is_string())
      throw ConfigError("cli", std::string("'") + key + "' needs a string 'profile'");
    name = in["profile"];
    params = in.contains("params") ? numbers(in["params"], key) : std::vector<double>{};
    try {
      make_profile(name, params, uniform_grid(0.0, 1.0, 0.5));
    } catch (const Error& e) {
      throw ConfigError("cli", std::string(key) + ": " + e.what());
    }
  };
  read_profile("initial", c.profile, c.profile_params);
  read_profile("decay_initial", c.decay_profile, c.decay_profile_params);

  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw ConfigError("cli", "'mode' must be a string");
    c.mode = parse_mode(j["mode"]);
  }
  if (j.contains("p")) c.p_list = numbers(j["p"], "p");
  for (double p : c.p_list)
    if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("cli", "p-list entries must lie in [1, 2]");
  if (j.contains("times")) c.times = numbers(j["times"], "times");
  for (double t : c.times)
    if (!(t >= 1.0 && t <= 64.0)) throw ConfigError("cli", "decay times must lie in [1, 64]");
  if (c.times.size() < 6) throw ConfigError("cli", "decay fits need at least 6 times");
  if (j.contains("evolve_times")) c.evolve_times = numbers(j["evolve_times"], "evolve_times");
  for (double t : c.evolve_times)
    if (!std::isfinite(t) || t == 0.0) throw ConfigError("cli", "evolve times must be finite and nonzero");
  if (j.contains("strichartz_T")) c.strichartz_T = numbers(j["strichartz_T"], "strichartz_T");
  for (double T : c.strichartz_T) require_positive(T, "strichartz_T");
  if (j.contains("output")) {
    if (!j["output"].is_string() || j["output"].get<std::string>().empty())
      throw ConfigError("cli", "'output' must be a non-empty string");
    c.output = j["output"];
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("cli", "'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("cli", "'tolerances' must be an object");
    for (const auto& [key, value] : t.items()) {
      double* slot = key == "crosscheck"      ? &c.tolerances.crosscheck
                     : key == "exponent"      ? &c.tolerances.exponent
                     : key == "strichartz"    ? &c.tolerances.strichartz
                     : key == "unimodularity" ? &c.tolerances.unimodularity
                                              : nullptr;
      if (!slot) throw ConfigError("cli", "unknown tolerance '" + key + "'");
      *slot = number(value, key.c_str());
      require_positive(*slot, key.c_str());
    }
  }
  if (j.contains("grids")) {
    const Json& g = j["grids"];
    if (!g.is_object()) throw ConfigError("cli", "'grids' must be an object");
    for (const auto& [key, value] : g.items()) {
      const double v = number(value, key.c_str());
      require_positive(v, key.c_str());
      if (key == "lattice_step") c.grids.lattice_step = v;
      else if (key == "lattice_extent") c.grids.lattice_extent = v;
      else if (key == "crosscheck_box") c.grids.crosscheck_box = v;
      else if (key == "crosscheck_cells") c.grids.crosscheck_cells = std::lround(v);
      else if (key == "decay_box") c.grids.decay_box = v;
      else if (key == "decay_cells") c.grids.decay_cells = std::lround(v);
      else throw ConfigError("cli", "unknown grid field '" + key + "'");
    }
  }
  const double L = c.potential.support();
  if (c.grids.crosscheck_box <= L + 10.0 || c.grids.decay_box <= L + 10.0)
    throw ConfigError("cli", "oracle boxes must exceed the potential support by at least 10");
  if (c.grids.lattice_extent <= L) throw ConfigError("cli", "lattice extent must exceed the potential support");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cli", "cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("cli", path + ": " + e.what());
  }
  return parse_config(j, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// outcomes

void Outcome::add_json(const std::string& name, Json j) {
  Json out;
  out["schema_version"] = schema_version;
  for (auto& [key, value] : j.items())
    if (key != "schema_version") out[key] = value;
  files[name] = out.dump(2) + "\n";
}

void Outcome::line(const std::string& text) { summary += text + "\n"; }

void Outcome::require(bool condition, const std::string& what) {
  line(std::string(condition ? "  [ok]   " : "  [FAIL] ") + what);
  if (!condition) failures.push_back(what);
}

void Outcome::merge(Outcome other) {
  for (auto& [name, text] : other.files) files[name] = std::move(text);
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
  summary += other.summary;
}

void commit(const Outcome& outcome, const std::string& dir) {
  const fs::path target(dir);
  const fs::path staging = target.string() + ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);
  for (const auto& [name, text] : outcome.files) write_text((staging / name).string(), text);
  write_text((staging / "summary.txt").string(), outcome.summary);
  fs::create_directories(target);
  for (const auto& entry : fs::directory_iterator(staging))
    fs::rename(entry.path(), target / entry.path().filename());
  fs::remove_all(staging);
}

// ---------------------------------------------------------------------------
// pipelines

namespace {
std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

PropagatorOptions propagator_options(const ExperimentConfig& c) {
  PropagatorOptions o;
  o.lattice_step = c.grids.lattice_step;
  return o;
}

WaveField initial_on(const ExperimentConfig& c, const Eigen::VectorXd& x) {
  return make_profile(c.profile, c.profile_params, x);
}

WaveField initial_on_oracle(const ExperimentConfig& c, const DiscreteHamiltonian& H, bool decay = false) {
  WaveField phi = decay ? make_profile(c.decay_profile, c.decay_profile_params, H.x) : initial_on(c, H.x);
  phi.values(0) = 0.0;
  phi.values(phi.size() - 1) = 0.0;
  return phi;
}

Json sidecar(const ExperimentConfig& c, double t, const std::string& mode) {
  return Json{{"t", t},
              {"potential", c.potential_label},
              {"mode", mode},
              {"initial", {{"profile", c.profile}, {"params", c.profile_params}}},
              {"tolerances", c.to_json()["tolerances"]},
              {"grids", c.to_json()["grids"]}};
}
}  // namespace

Outcome run_scatter(const ExperimentConfig& c) {
  Outcome o;
  const Potential& v = c.potential;
  o.line("scatter: " + c.potential_label + fmt(" (L_V = %g)", v.support()));
  const ScatteringData sd = scattering_matrix(v);
  const BoundStateSet bs = find_bound_states(v);
  const KernelField kernel = solve_marchenko_kernel(v, v.support() + 10.0);
  const KernelBoundReport bounds = kernel_bound_check(kernel, v, MomentProfile(v, kernel.step()));

  double jost_gap = 0.0;
  for (double k : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const Complex f0 = jost_at_origin(v, k)(0);
    jost_gap = std::max(jost_gap, std::abs(f0 - jost_from_kernel(kernel, k, 0.0)));
  }
  o.line(fmt("  f(0,0) = %.9f", sd.jost_zero_energy));
  o.line("  bound states: " + std::to_string(bs.size()));
  for (std::size_t i = 0; i < bs.size(); ++i) o.line(fmt("    kappa = %.10f", bs.kappas[i]));
  o.require(sd.max_unimodularity_defect() < c.tolerances.unimodularity,
            fmt("max ||S(k)| - 1| = %.3e", sd.max_unimodularity_defect()));
  o.require(jost_gap < 1e-6, fmt("ODE vs kernel Jost values at x = 0: max gap %.3e", jost_gap));
  o.require(bounds.ok(), "kernel bounds: " + std::to_string(bounds.kernel_violations + bounds.h_violations) +
                             " violations on " + std::to_string(bounds.nodes) + " nodes");

  Json sj = scattering_to_json(sd, bs);
  sj["potential"] = c.potential_label;
  sj["tolerances"] = c.to_json()["tolerances"];
  o.add_json("scattering.json", sj);
  o.add_json("potential.json", potential_to_json(v));
  o.add_json("kernel.json", Json{{"nodes", bounds.nodes},
                                 {"kernel_violations", bounds.kernel_violations},
                                 {"h_violations", bounds.h_violations},
                                 {"worst_kernel_margin", bounds.worst_kernel_margin},
                                 {"worst_h_margin", bounds.worst_h_margin},
                                 {"tolerance", bounds.tolerance},
                                 {"picard_sweeps", kernel.picard_history.size()}});
  o.files["kernel.csv"] = kernel_csv(kernel);
  return o;
}

Outcome run_evolve(const ExperimentConfig& c) {
  Outcome o;
  o.line("evolve: " + c.potential_label + " (" + mode_name(c.mode) + ")");
  const Eigen::VectorXd x = uniform_grid(0.0, c.grids.lattice_extent, c.grids.lattice_step);
  const WaveField phi = initial_on(c, x);
  std::vector<WaveField> kernel_fields, oracle_fields;
  if (c.mode != RunMode::oracle) {
    const ContinuousPropagator P(c.potential, propagator_options(c));
    for (double t : c.evolve_times) {
      const WaveField u = P.evolve(phi, t);
      const WaveField d = P.evolve(phi, t, PropagatorMode::direct);
      const std::string tag = "kernel_t" + short_number(t);
      o.files[tag + ".csv"] = field_csv(u);
      Json meta = sidecar(c, t, "kernel");
      meta["direct_vs_assembled"] = relative_l2_error(u, d);
      o.add_json(tag + ".json", meta);
      o.require(relative_l2_error(u, d) < c.tolerances.crosscheck,
                fmt("t = %g: assembled vs direct ", t) + fmt("%.3e", relative_l2_error(u, d)));
      kernel_fields.push_back(u);
    }
  }
  if (c.mode != RunMode::kernel) {
    const DiscreteHamiltonian H =
        build_hamiltonian(c.potential, c.grids.crosscheck_box, c.grids.crosscheck_box / c.grids.crosscheck_cells);
    oracle_fields = evolve_oracle(H, initial_on_oracle(c, H), c.evolve_times, Subspace::continuous);
    for (std::size_t i = 0; i < c.evolve_times.size(); ++i) {
      const std::string tag = "oracle_t" + short_number(c.evolve_times[i]);
      o.files[tag + ".csv"] = field_csv(oracle_fields[i]);
      o.add_json(tag + ".json", sidecar(c, c.evolve_times[i], "oracle"));
    }
  }
  if (c.mode == RunMode::both) {
    o.line("  cross-check (kernel vs oracle, relative L2 on the lattice):");
    Json cross = Json::array();
    for (std::size_t i = 0; i < c.evolve_times.size(); ++i) {
      const double err = relative_l2_error(kernel_fields[i], resample(oracle_fields[i], x));
      cross.push_back({{"t", c.evolve_times[i]}, {"relative_l2", err}});
      o.require(err < c.tolerances.crosscheck, fmt("t = %g: ", c.evolve_times[i]) + fmt("%.3e", err));
    }
    o.add_json("crosscheck.json", Json{{"potential", c.potential_label}, {"results", cross},
                                       {"tolerance", c.tolerances.crosscheck}});
  }
  return o;
}

Outcome run_decay(const ExperimentConfig& c) {
  Outcome o;
  o.line("decay: " + c.potential_label);
  const DiscreteHamiltonian H =
      build_hamiltonian(c.potential, c.grids.decay_box, c.grids.decay_box / c.grids.decay_cells);
  const WaveField phi = initial_on_oracle(c, H, true);
  std::vector<DecayReport> reports;
  const bool has_bound = H.negative_count() > 0;
  for (bool projected : {true, false}) {
    if (!projected && !has_bound) break;
    const auto evolution = oracle_evolution(H, projected ? Subspace::continuous : Subspace::all);
    for (double p : c.p_list) {
      DecayReport r = decay_fit(evolution, phi, p, c.times);
      r.label = c.potential_label;
      r.projected = projected;
      char buf[160];
      std::snprintf(buf, sizeof buf, "p = %.4g %s: alpha = %.4f (W1p %.4f), target %.4f", p,
                    projected ? "with P_c" : "without P_c", r.fit.alpha, r.sobolev_fit.alpha, r.target);
      if (projected) {
        o.require(r.within(c.tolerances.exponent) && r.sobolev_within(c.tolerances.exponent), buf);
      } else {
        o.line(std::string("  [info] ") + buf + (r.within(c.tolerances.exponent) ? "" : " (estimate fails)"));
      }
      reports.push_back(std::move(r));
    }
  }
  o.files["decay.csv"] = decay_csv(reports);
  Json j;
  j["potential"] = c.potential_label;
  j["evolution"] = "oracle";
  j["tolerance"] = c.tolerances.exponent;
  j["grids"] = c.to_json()["grids"];
  j["reports"] = Json::array();
  for (const DecayReport& r : reports) j["reports"].push_back(decay_to_json(r));
  o.add_json("decay.json", j);
  return o;
}

Outcome run_strichartz(const ExperimentConfig& c) {
  Outcome o;
  o.line("strichartz: " + c.potential_label);
  const DiscreteHamiltonian H =
      build_hamiltonian(c.potential, c.grids.decay_box, c.grids.decay_box / c.grids.decay_cells);
  const WaveField phi = initial_on_oracle(c, H);
  const double T_max = *std::max_element(c.strichartz_T.begin(), c.strichartz_T.end());
  const std::vector<double> times = strichartz_times(T_max);
  const std::vector<WaveField> trajectory = evolve_oracle(H, phi, times, Subspace::continuous);
  const double mass = l2_norm(phi);
  std::vector<StrichartzRow> rows;

  auto check_ratios = [&](const std::string& what, const std::vector<StrichartzRow>& series) {
    for (std::size_t i = 1; i < series.size(); ++i) {
      const double change = std::abs(series[i].ratio / series[i - 1].ratio - 1.0);
      o.require(change < c.tolerances.strichartz, what + fmt(": T %g", series[i - 1].T) +
                                                      fmt(" -> %g", series[i].T) + fmt(", change %.3e", change));
    }
  };

  for (double s : {0.0, 0.5, 1.0}) {
    const AdmissiblePoint pt = AdmissiblePoint::on_segment(s);
    std::vector<StrichartzRow> series;
    for (double T : c.strichartz_T) {
      const StrichartzValue val = strichartz_norm(trajectory, pt, T);
      series.push_back({"Gamma", s, pt.inv_p, pt.inv_r, T, val.value / mass, val.resolution_warning});
    }
    check_ratios(fmt("Gamma ratio at s = %g", s), series);
    rows.insert(rows.end(), series.begin(), series.end());
  }

  // Duhamel pair: P = midpoint of the segment, forcing in the dual of B
  std::mt19937_64 rng(c.seed.value_or(1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double duration = 2.0, step = 1.0 / 32.0;
  std::vector<double> taus;
  for (long m = 0; m * step <= duration + 1e-12; ++m) taus.push_back(m * step);
  struct Mode { double center, width, freq, phase, amp; };
  std::vector<Mode> modes;
  for (int i = 0; i < 3; ++i)
    modes.push_back({2.0 + 6.0 * unit(rng), 0.5 + unit(rng), 4.0 * unit(rng), 6.283185307179586 * unit(rng),
                     0.5 + unit(rng)});
  std::vector<WaveField> forcing;
  for (double tau : taus) {
    WaveField f = H.zero_field();
    f.time = tau;
    const double envelope = std::pow(std::sin(3.141592653589793 * tau / duration), 2);
    for (const Mode& m : modes)
      for (Eigen::Index i = 1; i + 1 < f.size(); ++i) {
        const double z = (H.x(i) - m.center) / m.width;
        f.values(i) += envelope * m.amp * std::exp(-0.5 * z * z) *
                       std::polar(1.0, m.freq * H.x(i) + m.phase + 1.5 * tau);
      }
    forcing.push_back(f);
  }
  const AdmissiblePoint P = AdmissiblePoint::on_segment(0.5);
  const AdmissiblePoint Q = AdmissiblePoint::on_segment(0.0).dual();
  const double forcing_norm = strichartz_norm(forcing, Q, duration).value;
  const std::vector<WaveField> g = duhamel_oracle(H, forcing, taus, times, Subspace::continuous);
  std::vector<StrichartzRow> series;
  for (double T : c.strichartz_T) {
    const StrichartzValue val = strichartz_norm(g, P, T);
    series.push_back({"Duhamel", 0.5, P.inv_p, P.inv_r, T, val.value / forcing_norm, val.resolution_warning});
  }
  check_ratios("Duhamel ratio (P = (1/4, 1/8), Q' = (1/2, 1))", series);
  rows.insert(rows.end(), series.begin(), series.end());

  o.files["strichartz.csv"] = strichartz_csv(rows);
  Json j{{"potential", c.potential_label},
         {"evolution", "oracle"},
         {"tolerance", c.tolerances.strichartz},
         {"seed", c.seed.value_or(1)},
         {"grids", c.to_json()["grids"]}};
  for (const StrichartzRow& r : rows)
    if (r.resolution_warning) o.line(fmt("  [warn] coarse time grid for s = %g", r.s));
  o.add_json("strichartz.json", j);
  return o;
}

Outcome run_check(const ExperimentConfig& c) {
  Outcome o = run_scatter(c);
  o.merge(run_evolve(c));
  o.merge(run_decay(c));
  o.merge(run_strichartz(c));

  Outcome f;
  f.line("form bound: " + c.potential_label);
  const double reach = std::max(c.potential.support(), 1.0) + 2.0;
  const Eigen::VectorXd x = uniform_grid(0.0, reach, 1.0 / 256.0);
  std::vector<double> centers, widths{1.0, 0.5, 0.25, 0.125};
  for (double z = 0.25; z < reach - 1.0; z += 0.25) centers.push_back(z);
  const auto family = tent_family(x, centers, widths);
  Json rows = Json::array();
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    const FormBoundReport r = form_bound_check(c.potential, family, eps);
    rows.push_back({{"epsilon", eps}, {"K", r.measured}, {"bound", r.bound}, {"C", r.local_l1}, {"delta", r.delta}});
    char buf[128];
    std::snprintf(buf, sizeof buf, "eps = %g: K = %.4f <= C(1 + 1/delta) = %.4f", eps, r.measured, r.bound);
    f.require(r.ok(), buf);
  }
  f.add_json("form_bound.json", Json{{"potential", c.potential_label}, {"rows", rows}});
  o.merge(std::move(f));
  return o;
}

}  // namespace halfline
