#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "halfline/estimates.hpp"
#include "halfline/jost.hpp"
#include "halfline/potential.hpp"
#include "halfline/scattering.hpp"
#include "halfline/wavefield.hpp"

namespace halfline {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

/// Potential file: {kind, params, L_V, dx} plus x[], v[] for tables.
/// Kinds: zero, square_well [depth, width], exp [amplitude, rate],
/// gaussian [amplitude, center, width], table.
Json potential_to_json(const Potential& v);
Potential potential_from_json(const Json& j);
Potential load_potential(const std::string& path);

/// Fixed-format number so repeated runs produce identical bytes.
std::string format_number(double value);

/// Writes `text` to `path` through a temporary file renamed into place.
void write_text(const std::string& path, const std::string& text);
/// Adds schema_version and writes pretty-printed JSON.
void write_json(const std::string& path, Json j);

/// Triangular dump of h(u, v): comment header with X_max, dx and the support,
/// then rows "u,v,h" for every node 0 <= v <= u <= L_V (h vanishes beyond).
std::string kernel_csv(const KernelField& kernel);
void write_kernel_csv(const std::string& path, const KernelField& kernel);
KernelField read_kernel_csv(const std::string& path);

Json scattering_to_json(const ScatteringData& data, const BoundStateSet& bound_states);

/// CSV with columns x, re, im.
std::string field_csv(const WaveField& field);

/// CSV rows "label,p,projected,t,norm,sobolev_norm".
std::string decay_csv(const std::vector<DecayReport>& reports);
Json decay_to_json(const DecayReport& report);

struct StrichartzRow {
  std::string label;
  double s = 0.0;  ///< segment parameter of the point where the norm is taken
  double inv_p = 0.0, inv_r = 0.0;
  double T = 0.0;
  double ratio = 0.0;
  bool resolution_warning = false;
};
/// CSV rows "label,s,inv_p,inv_r,T,ratio,resolution_warning".
std::string strichartz_csv(const std::vector<StrichartzRow>& rows);

}  // namespace halfline
