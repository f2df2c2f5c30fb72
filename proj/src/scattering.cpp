#include "halfline/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "halfline/errors.hpp"
#include "halfline/parallel.hpp"

namespace halfline {

namespace {
constexpr Complex I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

double raised_cosine(double k, double k_max, double fraction) {
  const double edge = (1.0 - fraction) * k_max;
  const double a = std::abs(k);
  if (a <= edge) return 1.0;
  if (a >= k_max) return 0.0;
  return 0.5 * (1.0 + std::cos(pi * (a - edge) / (fraction * k_max)));
}
}  // namespace

double ScatteringData::max_unimodularity_defect() const {
  return S.size() ? (S.cwiseAbs().array() - 1.0).abs().maxCoeff() : 0.0;
}

double ScatteringData::max_conjugation_defect() const {
  const Eigen::Index n = S.size();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(S(n - 1 - i) - std::conj(S(i))));
  return worst;
}

ScatteringData scattering_matrix(const Potential& v, ScatteringOptions options) {
  if (options.k_count < 1 || !(options.k_max > 0)) throw DomainError("scattering", "invalid k grid");
  ScatteringData out;
  out.jost_zero_energy = jost_at_origin(v, 0.0)(0).real();
  if (std::abs(out.jost_zero_energy) < options.resonance_threshold)
    throw UnsupportedError("scattering", "zero-energy resonance detected (f(0,0) ~ 0); this case is not supported");

  const long n = options.k_count;
  const double dk = options.k_max / n;
  Eigen::VectorXcd positive(n);
  parallel_for(n, [&](long j) { positive(j) = jost_at_origin(v, (j + 1) * dk)(0); });

  out.k.resize(2 * n);
  out.jost_origin.resize(2 * n);
  for (long j = 0; j < n; ++j) {
    const double k = (j + 1) * dk;
    if (std::abs(positive(j)) < options.conditioning_threshold) {
      std::ostringstream msg;
      msg << "|f(k,0)| below " << options.conditioning_threshold << " at k = " << k;
      throw ConditioningError("scattering", msg.str());
    }
    out.k(n + j) = k;
    out.k(n - 1 - j) = -k;
    out.jost_origin(n + j) = positive(j);
    out.jost_origin(n - 1 - j) = std::conj(positive(j));
  }
  out.S = out.jost_origin.conjugate().cwiseQuotient(out.jost_origin);
  out.T = out.S.array() - 1.0;

  // T~(z) = (1/pi) sum_{k>0} Re(T(k) e^{ikz}) w(k) dk; the k = 0 node carries T(0) = 0
  out.z = uniform_grid(-options.z_extent, options.z_extent, options.z_step);
  out.t_hat.resize(out.z.size());
  Eigen::VectorXcd weighted(n);
  for (long j = 0; j < n; ++j) weighted(j) = out.T(n + j) * raised_cosine((j + 1) * dk, options.k_max, options.window_fraction);
  parallel_for(out.z.size(), [&](long i) {
    const double z = out.z(i);
    const Complex step = std::exp(I * dk * z);
    Complex phase = step, sum = 0.0;
    for (long j = 0; j < n; ++j) {
      sum += weighted(j) * phase;
      phase *= step;
      if ((j & 255) == 255) phase = std::exp(I * ((j + 2) * dk * z));
    }
    out.t_hat(i) = sum.real() * dk / pi;
  });
  out.t_hat_l1 = trapezoid(out.z, out.t_hat.cwiseAbs());
  const double inner = 0.9 * options.z_extent;
  double tail = 0.0;
  for (Eigen::Index i = 0; i + 1 < out.z.size(); ++i)
    if (std::abs(out.z(i)) >= inner && std::abs(out.z(i + 1)) >= inner)
      tail += 0.5 * (out.z(i + 1) - out.z(i)) * (std::abs(out.t_hat(i)) + std::abs(out.t_hat(i + 1)));
  out.t_hat_tail_mass = tail;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double jost_imag_axis(const Potential& v, double kappa) { return jost_at_origin(v, Complex(0.0, kappa))(0).real(); }

// ||f(i kappa, .)||^2 on [0, L_V] by trapezoid at two resolutions plus one Richardson step,
// and the exact exp(-2 kappa x) tail beyond L_V.
double jost_norm(const Potential& v, double kappa) {
  const double lv = v.support();
  double tail = std::exp(-2.0 * kappa * lv) / (2.0 * kappa);
  if (lv <= 0) return std::sqrt(tail);
  auto trap = [&](double step) {
    const Eigen::VectorXd grid = uniform_grid(0.0, lv, step);
    const JostSolution s = solve_jost_ode(v, Complex(0.0, kappa), grid);
    return trapezoid(grid, s.f.cwiseAbs2());
  };
  const long cells = std::max(64L, static_cast<long>(std::ceil(lv * 1024.0)));
  const double coarse = trap(lv / cells), fine = trap(lv / (2 * cells));
  return std::sqrt((4.0 * fine - coarse) / 3.0 + tail);
}

}  // namespace

BoundStateSet find_bound_states(const Potential& v, BoundStateOptions options) {
  BoundStateSet out;
  out.potential = v;
  double kappa_max = options.kappa_max > 0 ? options.kappa_max : std::sqrt(v.sup_abs()) + 1.0;
  if (!(kappa_max > options.epsilon)) throw DomainError("scattering", "kappa_max must exceed epsilon");
  if (v.is_zero()) return out;

  const long m = options.scan_points;
  std::vector<double> grid(m + 1), values(m + 1);
  for (long i = 0; i <= m; ++i) grid[i] = options.epsilon + (kappa_max - options.epsilon) * i / m;
  parallel_for(m + 1, [&](long i) { values[i] = jost_imag_axis(v, grid[i]); });

  double scale = 0.0;
  for (double f : values) scale = std::max(scale, std::abs(f));
  for (long i = 0; i < m; ++i) {
    double a = grid[i], b = grid[i + 1];
    double fa = values[i], fb = values[i + 1];
    if (fa == 0.0) fb = fa;
    if ((fa < 0) != (fb < 0)) {
      while (b - a > options.tol) {
        const double c = 0.5 * (a + b);
        const double fc = jost_imag_axis(v, c);
        if ((fc < 0) == (fa < 0)) {
          a = c;
          fa = fc;
        } else {
          b = c;
        }
      }
      const double kappa = 0.5 * (a + b);
      if (i == 0 || i == m - 1) out.warnings.push_back("root near the edge of the kappa window at " + std::to_string(kappa));
      out.kappas.push_back(kappa);
    } else if (i > 0) {
      // local minimum of |f| without sign change: possible double root
      const double fm = std::abs(values[i]);
      if (fm < std::abs(values[i - 1]) && fm < std::abs(values[i + 1]) && fm < 1e-6 * scale)
        out.warnings.push_back("possible double root near kappa = " + std::to_string(grid[i]) + "; refine the scan grid");
    }
  }
  std::sort(out.kappas.begin(), out.kappas.end());
  for (double kappa : out.kappas) {
    out.energies.push_back(-kappa * kappa);
    const double norm = jost_norm(v, kappa);
    out.norms.push_back(norm);
    out.origin_values.push_back(jost_imag_axis(v, kappa) / norm);
  }
  return out;
}

Eigen::VectorXd BoundStateSet::eigenfunction(std::size_t j, const Eigen::VectorXd& x) const {
  if (j >= kappas.size()) throw DomainError("scattering", "bound state index out of range");
  Eigen::VectorXd values(x.size());
  // the ODE grid must be increasing; sort a copy of the inside nodes
  std::vector<Eigen::Index> inside;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < 0) throw DomainError("scattering", "eigenfunction grid must be non-negative");
    if (x(i) < potential.support()) inside.push_back(i);
    else values(i) = std::exp(-kappas[j] * x(i)) / norms[j];
  }
  if (!inside.empty()) {
    std::sort(inside.begin(), inside.end(), [&](auto a, auto b) { return x(a) < x(b); });
    Eigen::VectorXd grid(inside.size());
    for (std::size_t i = 0; i < inside.size(); ++i) grid(i) = x(inside[i]);
    const JostSolution s = solve_jost_ode(potential, Complex(0.0, kappas[j]), grid);
    for (std::size_t i = 0; i < inside.size(); ++i) values(inside[i]) = s.f(i).real() / norms[j];
  }
  return values;
}

WaveField apply_pp_projector(const BoundStateSet& states, const WaveField& phi) {
  WaveField out{phi.x, Eigen::VectorXcd::Zero(phi.size()), phi.time};
  const std::size_t q = states.size();
  if (q == 0) return out;
  Eigen::MatrixXd basis(phi.size(), q);
  for (std::size_t j = 0; j < q; ++j) basis.col(j) = states.eigenfunction(j, phi.x);
  // trapezoid weights of the field grid
  Eigen::VectorXd w = Eigen::VectorXd::Zero(phi.size());
  for (Eigen::Index i = 0; i + 1 < phi.size(); ++i) {
    const double h = 0.5 * (phi.x(i + 1) - phi.x(i));
    w(i) += h;
    w(i + 1) += h;
  }
  const Eigen::MatrixXd gram = basis.transpose() * w.asDiagonal() * basis;
  const Eigen::VectorXcd overlaps = basis.transpose().cast<Complex>() * (w.cast<Complex>().cwiseProduct(phi.values));
  const Eigen::VectorXcd coeff = gram.cast<Complex>().ldlt().solve(overlaps);
  out.values = basis.cast<Complex>() * coeff;
  return out;
}

WaveField apply_continuous_projector(const BoundStateSet& states, const WaveField& phi) {
  WaveField out = apply_pp_projector(states, phi);
  out.values = phi.values - out.values;
  return out;
}

}  // namespace halfline
