#include "halfline/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "halfline/errors.hpp"

namespace halfline {

namespace {
std::vector<double> number_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw ConfigError("io", std::string("missing array '") + key + "'");
  std::vector<double> out;
  for (const auto& e : j[key]) {
    if (!e.is_number()) throw ConfigError("io", std::string("non-numeric entry in '") + key + "'");
    out.push_back(e.get<double>());
  }
  return out;
}

double number_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw ConfigError("io", std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

void require_params(const std::vector<double>& p, std::size_t n, const std::string& kind) {
  if (p.size() != n)
    throw ConfigError("io", kind + " expects " + std::to_string(n) + " params, got " + std::to_string(p.size()));
}

Json array_of(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }
}  // namespace

Json potential_to_json(const Potential& v) {
  Json j;
  j["kind"] = v.name();
  j["params"] = v.params();
  j["L_V"] = v.support();
  j["dx"] = v.dx();
  if (v.kind() == PotentialKind::table) {
    j["x"] = v.table_x();
    j["v"] = v.table_v();
  }
  return j;
}

namespace {
Potential build_potential(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("io", "potential needs a string 'kind'");
  const std::string kind = j["kind"];
  const double dx = j.contains("dx") ? number_field(j, "dx") : Potential::default_dx;
  const std::vector<double> p = j.contains("params") ? number_array(j, "params") : std::vector<double>{};
  Potential v = Potential::zero();
  if (kind == "zero") {
    v = Potential::zero();
  } else if (kind == "square_well") {
    require_params(p, 2, kind);
    v = Potential::square_well(p[0], p[1]);
  } else if (kind == "exp") {
    require_params(p, 2, kind);
    v = Potential::exponential(p[0], p[1], number_field(j, "L_V"));
  } else if (kind == "gaussian") {
    require_params(p, 3, kind);
    v = Potential::gaussian(p[0], p[1], p[2], number_field(j, "L_V"));
  } else if (kind == "table") {
    return Potential::table(number_array(j, "x"), number_array(j, "v"), dx);
  } else {
    throw ConfigError("io", "unknown potential kind '" + kind + "'");
  }
  return v.with_dx(dx);
}
}  // namespace

Potential potential_from_json(const Json& j) {
  try {
    return build_potential(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("io", e.what());
  }
}

Potential load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("io", "cannot open potential file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("io", path + ": " + e.what());
  }
  return potential_from_json(j);
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", value);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".part";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw DataError("io", "cannot write " + path);
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::string& path, Json j) {
  Json out;
  out["schema_version"] = schema_version;
  for (auto& [key, value] : j.items())
    if (key != "schema_version") out[key] = value;
  write_text(path, out.dump(2) + "\n");
}

std::string kernel_csv(const KernelField& kernel) {
  std::ostringstream s;
  s << "# X_max=" << format_number(kernel.x_max()) << " dx=" << format_number(kernel.dx())
    << " L_V=" << format_number(kernel.support()) << " breakpoints=";
  for (std::size_t i = 0; i < kernel.breakpoints().size(); ++i)
    s << (i ? ";" : "") << format_number(kernel.breakpoints()[i]);
  s << "\nu,v,h\n";
  const double step = kernel.step();
  for (long i = 0; i <= kernel.intervals(); ++i)
    for (long j = 0; j <= i; ++j)
      s << format_number(i * step) << ',' << format_number(j * step) << ',' << format_number(kernel.h(i, j)) << '\n';
  return s.str();
}

void write_kernel_csv(const std::string& path, const KernelField& kernel) { write_text(path, kernel_csv(kernel)); }

KernelField read_kernel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("io", "cannot open kernel dump " + path);
  std::string header, columns;
  std::getline(in, header);
  std::getline(in, columns);
  double x_max = 0, dx = 0, support = 0;
  std::vector<double> breaks;
  std::istringstream hs(header.substr(header.find_first_not_of("# ")));
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw DataError("io", "malformed kernel header");
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    if (key == "X_max") x_max = std::stod(value);
    else if (key == "dx") dx = std::stod(value);
    else if (key == "L_V") support = std::stod(value);
    else if (key == "breakpoints") {
      std::istringstream bs(value);
      for (std::string b; std::getline(bs, b, ';');)
        if (!b.empty()) breaks.push_back(std::stod(b));
    }
  }
  if (!(dx > 0) || columns != "u,v,h") throw DataError("io", "malformed kernel header");
  std::vector<double> h;
  for (std::string line; std::getline(in, line);) {
    const auto last = line.rfind(',');
    if (last == std::string::npos) throw DataError("io", "malformed kernel row");
    h.push_back(std::stod(line.substr(last + 1)));
  }
  return KernelField(support, x_max, dx, breaks, Eigen::Map<Eigen::VectorXd>(h.data(), h.size()));
}

Json scattering_to_json(const ScatteringData& data, const BoundStateSet& bound_states) {
  Json j;
  j["k"] = array_of(data.k);
  j["S_re"] = array_of(data.S.real());
  j["S_im"] = array_of(data.S.imag());
  j["jost_zero_energy"] = data.jost_zero_energy;
  j["max_unimodularity_defect"] = data.max_unimodularity_defect();
  j["max_conjugation_defect"] = data.max_conjugation_defect();
  Json bound = Json::array();
  for (std::size_t i = 0; i < bound_states.size(); ++i)
    bound.push_back({{"kappa", bound_states.kappas[i]},
                     {"energy", bound_states.energies[i]},
                     {"norm", bound_states.norms[i]},
                     {"origin_residual", bound_states.origin_values[i]}});
  j["bound_states"] = bound;
  j["warnings"] = bound_states.warnings;
  return j;
}

std::string field_csv(const WaveField& field) {
  std::ostringstream s;
  s << "x,re,im\n";
  for (Eigen::Index i = 0; i < field.size(); ++i)
    s << format_number(field.x(i)) << ',' << format_number(field.values(i).real()) << ','
      << format_number(field.values(i).imag()) << '\n';
  return s.str();
}

std::string decay_csv(const std::vector<DecayReport>& reports) {
  std::ostringstream s;
  s << "label,p,projected,t,norm,sobolev_norm\n";
  for (const DecayReport& r : reports)
    for (std::size_t i = 0; i < r.times.size(); ++i)
      s << r.label << ',' << format_number(r.p) << ',' << (r.projected ? 1 : 0) << ',' << format_number(r.times[i])
        << ',' << format_number(r.norms[i]) << ',' << format_number(r.sobolev_norms[i]) << '\n';
  return s.str();
}

Json decay_to_json(const DecayReport& r) {
  auto fit = [](const PowerFit& f) {
    return Json{{"alpha", f.alpha}, {"constant", f.constant}, {"residual_rms", f.residual_rms}, {"samples", f.samples}};
  };
  return Json{{"label", r.label},   {"p", r.p},
              {"target", r.target}, {"projected", r.projected},
              {"fit", fit(r.fit)},  {"sobolev_fit", fit(r.sobolev_fit)},
              {"worst_trace", r.worst_trace}};
}

std::string strichartz_csv(const std::vector<StrichartzRow>& rows) {
  std::ostringstream s;
  s << "label,s,inv_p,inv_r,T,ratio,resolution_warning\n";
  for (const StrichartzRow& r : rows)
    s << r.label << ',' << format_number(r.s) << ',' << format_number(r.inv_p) << ',' << format_number(r.inv_r) << ','
      << format_number(r.T) << ',' << format_number(r.ratio) << ',' << (r.resolution_warning ? 1 : 0) << '\n';
  return s.str();
}

}  // namespace halfline
