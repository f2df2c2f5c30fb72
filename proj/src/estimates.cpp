#include "halfline/estimates.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "halfline/errors.hpp"

namespace halfline {

namespace {
double lp_of_samples(const Eigen::VectorXd& x, const Eigen::VectorXd& mag, double p) {
  if (mag.size() == 0) return 0.0;
  if (std::isinf(p)) return mag.maxCoeff();
  const double peak = mag.maxCoeff();
  if (peak == 0.0) return 0.0;
  // scale by the peak to keep |u|^p representable for large p
  const Eigen::VectorXd powered = (mag.array() / peak).pow(p).matrix();
  return peak * std::pow(trapezoid(x, powered), 1.0 / p);
}

Eigen::VectorXd derivative_magnitude(const WaveField& f) {
  const Eigen::Index n = f.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  if (n < 2) return out;
  out(0) = std::abs((f.values(1) - f.values(0)) / (f.x(1) - f.x(0)));
  out(n - 1) = std::abs((f.values(n - 1) - f.values(n - 2)) / (f.x(n - 1) - f.x(n - 2)));
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    out(i) = std::abs((f.values(i + 1) - f.values(i - 1)) / (f.x(i + 1) - f.x(i - 1)));
  return out;
}
}  // namespace

double lp_norm(const WaveField& field, double p) {
  if (!(p >= 1.0)) throw DomainError("estimates", "p must lie in [1, infinity]");
  return lp_of_samples(field.x, field.values.cwiseAbs(), p);
}

SobolevNorm sobolev_norm(const WaveField& field, double p) {
  if (!(p >= 1.0)) throw DomainError("estimates", "p must lie in [1, infinity]");
  SobolevNorm out;
  if (field.size() == 0) return out;
  out.value = lp_norm(field, p) + lp_of_samples(field.x, derivative_magnitude(field), p);
  out.trace = std::abs(field.values(0));
  return out;
}

double dual_exponent(double p) {
  if (p == 1.0) return infinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

PowerFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw DomainError("estimates", "times and values differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 1.0) continue;
    if (!(values[i] > 0.0)) throw NumericalError("estimates", "non-positive norm in power-law fit");
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 6) throw DomainError("estimates", "power-law fit needs at least 6 samples with t >= 1");
  const auto n = static_cast<Eigen::Index>(lx.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = lx[i];
    b(i) = ly[i];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  PowerFit fit;
  fit.alpha = -coef(1);
  fit.constant = std::exp(coef(0));
  fit.residual_rms = std::sqrt((a * coef - b).squaredNorm() / n);
  fit.samples = lx.size();
  return fit;
}

Evolution oracle_evolution(const DiscreteHamiltonian& H, Subspace subspace) {
  return [&H, subspace](const WaveField& phi, const std::vector<double>& times) {
    return evolve_oracle(H, phi, times, subspace);
  };
}

Evolution propagator_evolution(const ContinuousPropagator& propagator, PropagatorMode mode) {
  return [&propagator, mode](const WaveField& phi, const std::vector<double>& times) {
    std::vector<WaveField> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(propagator.evolve(phi, t, mode));
    return out;
  };
}

std::vector<double> default_decay_times() { return {1, 2, 4, 8, 16, 32, 64}; }

DecayReport decay_fit(const Evolution& evolution, const WaveField& phi, double p, const std::vector<double>& times) {
  if (!(p >= 1.0 && p <= 2.0)) throw DomainError("estimates", "decay fits take p in [1, 2]");
  DecayReport r;
  r.p = p;
  r.target = 1.0 / p - 0.5;
  r.times = times;
  const double q = dual_exponent(p);
  for (const WaveField& u : evolution(phi, times)) {
    r.norms.push_back(lp_norm(u, q));
    const SobolevNorm s = sobolev_norm(u, q);
    r.sobolev_norms.push_back(s.value);
    const double peak = lp_norm(u, infinity);
    if (peak > 0) r.worst_trace = std::max(r.worst_trace, s.trace / peak);
  }
  r.fit = fit_power_law(r.times, r.norms);
  r.sobolev_fit = fit_power_law(r.times, r.sobolev_norms);
  return r;
}

DecayReport decay_fit(const Potential& v, const WaveField& phi, double p, const std::vector<double>& times,
                      DecayOptions options) {
  const DiscreteHamiltonian H = build_hamiltonian(v, options.box_length, options.box_length / options.cells);
  WaveField start = resample(phi, H.x);
  start.values(0) = 0.0;
  start.values(start.size() - 1) = 0.0;
  DecayReport r =
      decay_fit(oracle_evolution(H, options.projected ? Subspace::continuous : Subspace::all), start, p, times);
  r.projected = options.projected;
  r.label = v.name();
  return r;
}

AdmissiblePoint AdmissiblePoint::on_segment(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("estimates", "segment parameter must lie in [0, 1]");
  return {0.5 * (1.0 - s), 0.25 * s};
}

bool AdmissiblePoint::admissible(double tol) const {
  return std::abs(inv_p + 2.0 * inv_r - 0.5) <= tol && inv_p >= -tol && inv_p <= 0.5 + tol;
}

bool AdmissiblePoint::dual_admissible(double tol) const {
  return std::abs(inv_p + 2.0 * inv_r - 2.5) <= tol && inv_p >= 0.5 - tol && inv_p <= 1.0 + tol;
}

StrichartzValue strichartz_norm(const std::vector<WaveField>& trajectory, const AdmissiblePoint& point, double T) {
  std::vector<double> ts, ns;
  for (const WaveField& u : trajectory) {
    if (u.time > T + 1e-12) break;
    if (!ts.empty() && !(u.time > ts.back()))
      throw DomainError("estimates", "trajectory times must increase strictly");
    ts.push_back(u.time);
    ns.push_back(lp_norm(u, point.p()));
  }
  StrichartzValue out;
  if (ts.empty()) return out;
  auto time_norm = [&](std::size_t stride) {
    Eigen::VectorXd t, f;
    std::vector<double> tv, fv;
    for (std::size_t i = 0; i < ts.size(); i += stride) {
      tv.push_back(ts[i]);
      fv.push_back(ns[i]);
    }
    if (tv.back() != ts.back()) {
      tv.push_back(ts.back());
      fv.push_back(ns.back());
    }
    t = Eigen::Map<Eigen::VectorXd>(tv.data(), tv.size());
    f = Eigen::Map<Eigen::VectorXd>(fv.data(), fv.size());
    return lp_of_samples(t, f, point.r());
  };
  out.value = time_norm(1);
  out.coarse_value = time_norm(2);
  out.resolution_warning = std::abs(out.value - out.coarse_value) > 1e-2 * std::max(out.value, 1e-300);
  return out;
}

std::vector<double> strichartz_times(double T, double fine) {
  std::vector<double> out;
  const long head = std::lround(std::min(T, 4.0) / fine);
  for (long i = 0; i <= head; ++i) out.push_back(i * fine);
  double t = out.back();
  while (t < T - 1e-12) {
    t = std::min(T, t * (1.0 + fine));
    out.push_back(t);
  }
  return out;
}

WaveField duhamel_apply(const Evolution& evolution, const std::vector<WaveField>& forcing,
                        const std::vector<double>& taus, double t) {
  if (forcing.size() != taus.size() || forcing.empty())
    throw DomainError("estimates", "forcing needs matching, non-empty time samples");
  WaveField out = forcing.front();
  out.values.setZero();
  out.time = t;
  for (std::size_t m = 0; m < taus.size(); ++m) {
    if (taus[m] > t + 1e-12) throw DomainError("estimates", "forcing sampled beyond the evaluation time");
    double w = 0.0;
    if (m > 0) w += 0.5 * (taus[m] - taus[m - 1]);
    if (m + 1 < taus.size()) w += 0.5 * (taus[m + 1] - taus[m]);
    if (w == 0.0) continue;
    // both backends return P_c f at a zero time step
    out.values += w * evolution(forcing[m], {t - taus[m]}).front().values;
  }
  return out;
}

FormBoundReport form_bound_check(const Potential& v, const std::vector<WaveField>& family, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("estimates", "epsilon must be positive");
  FormBoundReport r;
  r.epsilon = epsilon;
  r.local_l1 = local_l1_sup(v);
  if (r.local_l1 > 0.0) {
    r.delta = epsilon / r.local_l1;
    r.bound = r.local_l1 * (1.0 + 1.0 / r.delta);
  }
  const auto& gauss = gauss_legendre(4);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const WaveField& phi = family[k];
    double potential = 0.0, kinetic = 0.0;
    // phi is read as its piecewise-linear interpolant
    for (Eigen::Index i = 0; i + 1 < phi.size(); ++i) {
      const double a = phi.x(i), b = phi.x(i + 1), h = b - a;
      const Complex ua = phi.values(i), ub = phi.values(i + 1);
      kinetic += std::norm(ub - ua) / h;
      if (a >= v.support()) continue;
      for (int g = 0; g < gauss.size; ++g) {
        const double s = 0.5 * (1.0 + gauss.nodes[g]);
        potential += 0.5 * h * gauss.weights[g] * std::abs(v(a + s * h)) * std::norm(ua + s * (ub - ua));
      }
    }
    const double mass = l2_norm(phi);
    if (mass == 0.0) continue;
    const double ratio = (potential - epsilon * kinetic) / (mass * mass);
    if (ratio > r.measured) {
      r.measured = ratio;
      r.worst = k;
    }
  }
  return r;
}

std::vector<WaveField> tent_family(const Eigen::VectorXd& x, const std::vector<double>& centers,
                                   const std::vector<double>& half_widths) {
  std::vector<WaveField> out;
  for (double c : centers)
    for (double w : half_widths) {
      WaveField f = make_profile("tent", {c, w}, x);
      const double n = l2_norm(f);
      if (n > 0) f.values /= n;
      out.push_back(f);
    }
  return out;
}

}  // namespace halfline
