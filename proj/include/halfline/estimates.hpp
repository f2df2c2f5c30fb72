#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "halfline/oracle.hpp"
#include "halfline/propagator.hpp"
#include "halfline/wavefield.hpp"

namespace halfline {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Trapezoid L^p norm of |u|; p = infinity is the grid maximum.
double lp_norm(const WaveField& field, double p);

struct SobolevNorm {
  double value = 0.0;  ///< |u|_p + |u'|_p
  double trace = 0.0;  ///< |u(0)|
};
/// Derivative by centered differences (one-sided at the ends).
SobolevNorm sobolev_norm(const WaveField& field, double p);

/// Conjugate exponent, 1 <-> infinity.
double dual_exponent(double p);

struct PowerFit {
  double alpha = 0.0;     ///< norm ~ constant * t^(-alpha)
  double constant = 0.0;
  double residual_rms = 0.0;
  std::size_t samples = 0;
};
/// Log-log least squares over the samples with t >= 1; needs at least 6.
PowerFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values);

/// Evolution backend: returns e^{-itH} P phi at each requested time.
using Evolution = std::function<std::vector<WaveField>(const WaveField&, const std::vector<double>&)>;
/// The caller keeps H (or the propagator) alive while the evolution is in use.
Evolution oracle_evolution(const DiscreteHamiltonian& H, Subspace subspace);
Evolution propagator_evolution(const ContinuousPropagator& propagator, PropagatorMode mode);

struct DecayReport {
  std::string label;
  double p = 1.0;
  double target = 0.5;  ///< 1/p - 1/2
  bool projected = true;
  std::vector<double> times;
  std::vector<double> norms;          ///< |u(t)|_{p'}
  std::vector<double> sobolev_norms;  ///< |u(t)|_{W^{1,p'}}
  PowerFit fit;
  PowerFit sobolev_fit;
  double worst_trace = 0.0;  ///< max_t |u(t, 0)| / |u(t)|_inf

  bool within(double tol) const { return std::abs(fit.alpha - target) <= tol; }
  bool sobolev_within(double tol) const { return std::abs(sobolev_fit.alpha - target) <= tol; }
};

/// Default time grid t = 2^j, j = 0..6.
std::vector<double> default_decay_times();

DecayReport decay_fit(const Evolution& evolution, const WaveField& phi, double p, const std::vector<double>& times);

struct DecayOptions {
  double box_length = 600.0;
  long cells = 8192;
  bool projected = true;
};
/// Oracle-backed fit; phi is resampled onto the oracle grid.
DecayReport decay_fit(const Potential& v, const WaveField& phi, double p, const std::vector<double>& times,
                      DecayOptions options = {});

/// Exponent pair (1/p, 1/r). Points of the admissible segment satisfy
/// 1/p + 2/r = 1/2 with 0 <= 1/p <= 1/2.
struct AdmissiblePoint {
  double inv_p = 0.5;
  double inv_r = 0.0;

  /// s = 0 is B = (1/2, 0), s = 1 is C = (0, 1/4).
  static AdmissiblePoint on_segment(double s);
  double p() const { return inv_p > 0 ? 1.0 / inv_p : infinity; }
  double r() const { return inv_r > 0 ? 1.0 / inv_r : infinity; }
  double p_dual() const { return dual_exponent(p()); }
  double r_dual() const { return dual_exponent(r()); }
  /// (1 - 1/p, 1 - 1/r), which lies on the dual segment.
  AdmissiblePoint dual() const { return {1.0 - inv_p, 1.0 - inv_r}; }
  bool admissible(double tol = 1e-12) const;
  /// True when this point lies on the dual segment 1/p + 2/r = 5/2, 1/2 <= 1/p <= 1.
  bool dual_admissible(double tol = 1e-12) const;
};

struct StrichartzValue {
  double value = 0.0;
  double coarse_value = 0.0;  ///< same norm from every other time sample
  bool resolution_warning = false;
};

/// |u|_{L^r([0,T], L^p)} by the trapezoid rule over the fields' time stamps <= T,
/// which must increase strictly.
StrichartzValue strichartz_norm(const std::vector<WaveField>& trajectory, const AdmissiblePoint& point, double T);

/// Time grid for Strichartz sums: step `fine` on [0, 4], then geometric with ratio 1 + fine.
std::vector<double> strichartz_times(double T, double fine = 1.0 / 32.0);

/// (G f)(t) = int_0^t e^{-i(t - tau) H} P_c f(tau) d tau by the trapezoid rule in tau.
WaveField duhamel_apply(const Evolution& evolution, const std::vector<WaveField>& forcing,
                        const std::vector<double>& taus, double t);

struct FormBoundReport {
  double epsilon = 0.0;
  double local_l1 = 0.0;  ///< C = sup_x int_x^{x+1} |V|
  double delta = 0.0;     ///< epsilon / C
  double bound = 0.0;     ///< C (1 + 1/delta)
  double measured = 0.0;  ///< K(epsilon) over the family
  std::size_t worst = 0;
  bool ok() const { return measured <= bound * (1.0 + 1e-12) + 1e-14; }
};
/// K(eps) = max(0, sup_phi (int |V| |phi|^2 - eps |phi'|^2) / |phi|^2).
FormBoundReport form_bound_check(const Potential& v, const std::vector<WaveField>& family, double epsilon);

/// Normalized tents, one per (center, half width) pair.
std::vector<WaveField> tent_family(const Eigen::VectorXd& x, const std::vector<double>& centers,
                                   const std::vector<double>& half_widths);

}  // namespace halfline
