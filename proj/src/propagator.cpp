#include "halfline/propagator.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "halfline/errors.hpp"
#include "halfline/parallel.hpp"

namespace halfline {

namespace {
constexpr Complex I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

void require_time(double t) {
  if (t == 0.0) throw DomainError("propagator", "t = 0 is outside the kernel's domain");
}

std::span<const Complex> as_span(const Eigen::VectorXcd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& x) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double h = 0.5 * (x(i + 1) - x(i));
    w(i) += h;
    w(i + 1) += h;
  }
  return w;
}

// Index range [first, last] holding the non-negligible samples of g.
bool support_range(const Eigen::VectorXcd& g, Eigen::Index& first, Eigen::Index& last) {
  const double peak = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  if (peak == 0.0) return false;
  const double floor = 1e-15 * peak;
  first = 0;
  last = g.size() - 1;
  while (std::abs(g(first)) <= floor) ++first;
  while (std::abs(g(last)) <= floor) --last;
  if (first > 0) --first;
  if (last + 1 < g.size()) ++last;
  return true;
}

void require_uniform_from_zero(const WaveField& f, const char* what) {
  if (f.size() < 2 || !f.uniform() || std::abs(f.x(0)) > 1e-12)
    throw DomainError("propagator", std::string(what) + " must be sampled on a uniform grid starting at x = 0");
}
}  // namespace

Complex fresnel_kernel(double t, double z) {
  require_time(t);
  const double phase = z * z / (4.0 * t) - (t > 0 ? 0.25 : -0.25) * pi;
  return std::exp(I * phase) / std::sqrt(4.0 * pi * std::abs(t));
}

Complex free_kernel(double t, double x, double y) { return fresnel_kernel(t, x - y) - fresnel_kernel(t, x + y); }

Complex correction_b(const KernelField& kernel, double t, double x, double y) {
  require_time(t);
  if (x >= kernel.support()) return 0.0;
  const long i0 = kernel.index_of(x);
  const std::vector<double> samples = kernel.diagonal(i0);
  const auto breaks = kernel.diagonal_breaks(i0);
  return 2.0 * integrate_cubic<double>(
                   samples, kernel.step(), breaks, [&](double v) { return fresnel_kernel(t, y - x - 2.0 * v); }, 8);
}

Complex correction_c(const KernelField& kernel, double t, double x, double y) {
  require_time(t);
  if (y >= kernel.support()) return 0.0;
  const long i0 = kernel.index_of(y);
  const std::vector<double> samples = kernel.diagonal(i0);
  const auto breaks = kernel.diagonal_breaks(i0);
  return 2.0 * integrate_cubic<double>(
                   samples, kernel.step(), breaks, [&](double v) { return fresnel_kernel(t, x - y - 2.0 * v); }, 8);
}

Eigen::MatrixXcd correction_e_matrix(const KernelField& kernel, double t, const Eigen::VectorXd& xs,
                                     const Eigen::VectorXd& ys) {
  require_time(t);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(xs.size(), ys.size());
  const long n = kernel.intervals();
  const double step = kernel.step();
  for (Eigen::Index c = 0; c < ys.size(); ++c) {
    if (ys(c) >= kernel.support()) continue;
    kernel.index_of(ys(c));
    // B(m) = b_t(y, m step) for z = m step in [0, 2 L_V]
    Eigen::VectorXcd b(2 * n + 1);
    parallel_for(2 * n + 1, [&](long m) { b(m) = correction_b(kernel, t, ys(c), m * step) ; });
    // correction_b(y, z) integrates K(y, .) against f_t(z - .), which is what e_t needs
    for (Eigen::Index r = 0; r < xs.size(); ++r) {
      if (xs(r) >= kernel.support()) continue;
      const long i0 = kernel.index_of(xs(r));
      const std::vector<double> diag = kernel.diagonal(i0);
      std::vector<Complex> prod(diag.size());
      for (std::size_t j = 0; j < diag.size(); ++j) prod[j] = diag[j] * b(i0 + 2 * static_cast<long>(j));
      out(r, c) = 2.0 * integrate_cubic<Complex>(prod, step, kernel.diagonal_breaks(i0), [](double) { return 1.0; });
    }
  }
  return out;
}

Complex correction_e(const KernelField& kernel, double t, double x, double y) {
  Eigen::VectorXd xs(1), ys(1);
  xs << x;
  ys << y;
  return correction_e_matrix(kernel, t, xs, ys)(0, 0);
}

double kernel_row_l1(const KernelField& kernel, double x) {
  if (x >= kernel.support()) return 0.0;
  const long i0 = kernel.index_of(x);
  std::vector<double> samples = kernel.diagonal(i0);
  for (double& s : samples) s = std::abs(s);
  return 2.0 * integrate_cubic<double>(samples, kernel.step(), kernel.diagonal_breaks(i0), [](double) { return 1.0; });
}

// ---------------------------------------------------------------------------

Eigen::VectorXcd fresnel_transform(const WaveField& g, double t, const Eigen::VectorXd& points) {
  require_time(t);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(points.size());
  if (!g.uniform()) throw DomainError("propagator", "fresnel_transform requires a uniform grid");
  Eigen::Index first, last;
  if (!support_range(g.values, first, last) || points.size() == 0) return out;
  const double h = g.spacing();
  const double ya = g.x(first), yb = g.x(last);
  double reach = 0.0;
  for (Eigen::Index i = 0; i < points.size(); ++i)
    reach = std::max({reach, std::abs(ya - points(i)), std::abs(yb - points(i))});
  // phase advance per cell at most 0.5 rad
  const long refine = std::max(1L, static_cast<long>(std::ceil(reach * h / (2.0 * std::abs(t)) / 0.5)));
  const double hf = h / refine;
  const long nf = (last - first) * refine + 1;
  Eigen::VectorXcd fine(nf);
  const auto src = as_span(g.values);
  for (long i = 0; i < nf; ++i) {
    if (i % refine == 0) fine(i) = g.values(first + i / refine);
    else fine(i) = interpolate_cubic<Complex>(src, g.x(0), h, ya + i * hf);
  }
  fine(0) *= 0.5;
  fine(nf - 1) *= 0.5;
  const Complex prefactor = fresnel_kernel(t, 0.0) * hf;
  const double inv4t = 1.0 / (4.0 * t);
  const Complex curvature = std::exp(I * (2.0 * hf * hf * inv4t));
  parallel_for(points.size(), [&](long p) {
    const double s = points(p);
    Complex sum = 0.0, e, d;
    for (long i = 0; i < nf; ++i) {
      if (i % 64 == 0) {
        const double w = ya + i * hf - s;
        e = std::exp(I * (w * w * inv4t));
        d = std::exp(I * ((2.0 * w * hf + hf * hf) * inv4t));
      }
      sum += fine(i) * e;
      e *= d;
      d *= curvature;
    }
    out(p) = prefactor * sum;
  });
  return out;
}

WaveField apply_free(const WaveField& g, double t) {
  require_uniform_from_zero(g, "initial data");
  const Eigen::Index n = g.size();
  Eigen::VectorXd points(2 * n);
  points.head(n) = g.x;
  points.tail(n) = -g.x;
  const Eigen::VectorXcd a = fresnel_transform(g, t, points);
  WaveField out{g.x, a.head(n) - a.tail(n), g.time + t};
  out.values(0) = 0.0;
  return out;
}

WaveField apply_t_term(const ScatteringData& scattering, const WaveField& phi, double t) {
  require_time(t);
  require_uniform_from_zero(phi, "initial data");
  const double dl = phi.spacing();
  const Eigen::Index nz = scattering.z.size(), nx = phi.size();
  if (nz < 2 || std::abs((scattering.z(1) - scattering.z(0)) - dl) > 1e-9 * dl)
    throw CoverageError("propagator", "T~ sampling step must equal the field spacing");
  if (scattering.t_hat_tail_mass > 1e-3 * std::max(scattering.t_hat_l1, 1e-300) && scattering.t_hat_l1 > 1e-12)
    throw CoverageError("propagator", "T~ grid too short: tail mass exceeds 1e-3 of its L1 norm");
  WaveField out{phi.x, Eigen::VectorXcd::Zero(nx), phi.time + t};
  if (scattering.t_hat.cwiseAbs().maxCoeff() == 0.0) return out;
  const double s0 = scattering.z(0) - phi.x(nx - 1);
  Eigen::VectorXd s(nz + nx - 1);
  for (Eigen::Index m = 0; m < s.size(); ++m) s(m) = s0 + m * dl;
  const Eigen::VectorXcd a = fresnel_transform(phi, t, s);
  const Eigen::VectorXd wz = trapezoid_weights(scattering.z).cwiseProduct(scattering.t_hat);
  parallel_for(nx, [&](long i) {
    Complex sum = 0.0;
    for (Eigen::Index j = 0; j < nz; ++j) sum += wz(j) * a(j - i + nx - 1);
    out.values(i) = -sum;
  });
  return out;
}

WaveField apply_t_term_spectral(const ScatteringData& scattering, const WaveField& phi, double t) {
  require_time(t);
  const Eigen::Index nk = scattering.k.size() / 2, nx = phi.size();
  WaveField out{phi.x, Eigen::VectorXcd::Zero(nx), phi.time + t};
  Eigen::Index first, last;
  if (nk == 0 || !support_range(phi.values, first, last)) return out;
  const double dk = scattering.k(nk);  // first positive node
  const Eigen::VectorXd wy = trapezoid_weights(phi.x);
  // phi^(k) = int e^{iky} phi(y) dy for k > 0 and k < 0
  Eigen::VectorXcd plus(nk), minus(nk);
  parallel_for(nk, [&](long j) {
    const double k = scattering.k(nk + j);
    Complex sp = 0.0, sm = 0.0;
    for (Eigen::Index i = first; i <= last; ++i) {
      const Complex e = std::exp(I * (k * phi.x(i)));
      const Complex v = wy(i) * phi.values(i);
      sp += v * e;
      sm += v * std::conj(e);
    }
    const double kw = (j == nk - 1 ? 0.5 : 1.0) * dk;
    const Complex evo = std::exp(-I * (t * k * k)) * kw;
    plus(j) = evo * scattering.T(nk + j) * sp;
    minus(j) = evo * scattering.T(nk - 1 - j) * sm;
  });
  parallel_for(nx, [&](long i) {
    const double x = phi.x(i);
    const Complex step = std::exp(I * (dk * x));
    Complex e = step, sum = 0.0;
    for (Eigen::Index j = 0; j < nk; ++j) {
      if ((j & 127) == 127) e = std::exp(I * ((j + 1) * dk * x));
      sum += plus(j) * e + minus(j) * std::conj(e);
      e *= step;
    }
    out.values(i) = -sum / (2.0 * pi);
  });
  return out;
}

WaveField apply_kernel(const KernelField& kernel, const WaveField& w) {
  require_uniform_from_zero(w, "field");
  WaveField out{w.x, Eigen::VectorXcd::Zero(w.size()), w.time};
  const double step = kernel.step();
  const auto src = as_span(w.values);
  for (Eigen::Index i = 0; i < w.size() && w.x(i) < kernel.support(); ++i) {
    const long i0 = kernel.index_of(w.x(i));
    const std::vector<double> diag = kernel.diagonal(i0);
    std::vector<Complex> prod(diag.size());
    for (std::size_t j = 0; j < diag.size(); ++j)
      prod[j] = diag[j] * interpolate_cubic<Complex>(src, 0.0, w.spacing(), w.x(i) + 2.0 * j * step);
    out.values(i) = 2.0 * integrate_cubic<Complex>(prod, step, kernel.diagonal_breaks(i0), [](double) { return 1.0; });
  }
  return out;
}

WaveField apply_kernel_transpose(const KernelField& kernel, const WaveField& w) {
  require_uniform_from_zero(w, "field");
  WaveField out{w.x, Eigen::VectorXcd::Zero(w.size()), w.time};
  const double step = kernel.step();
  const auto src = as_span(w.values);
  for (Eigen::Index i = 1; i < w.size() && w.x(i) < 2.0 * kernel.support(); ++i) {
    const long m = kernel.index_of(w.x(i));
    if (m % 2 != 0) throw DomainError("propagator", "field lattice must be a multiple of the kernel spacing");
    long j_lo = 0;
    const std::vector<double> anti = kernel.antidiagonal(m, j_lo);
    std::vector<Complex> prod(anti.size());
    for (std::size_t j = 0; j < anti.size(); ++j)
      prod[j] = anti[j] * interpolate_cubic<Complex>(src, 0.0, w.spacing(), w.x(i) - 2.0 * (j_lo + long(j)) * step);
    out.values(i) = 2.0 * integrate_cubic<Complex>(prod, step, kernel.antidiagonal_breaks(m, j_lo, anti.size()),
                                                   [](double) { return 1.0; });
  }
  return out;
}

// ---------------------------------------------------------------------------

ContinuousPropagator::ContinuousPropagator(const Potential& v, PropagatorOptions options)
    : potential_(v), options_(options) {
  const double dl = options_.lattice_step;
  const double ratio = dl / options_.marchenko.dx;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1)
    throw DomainError("propagator", "lattice step must be a multiple of the kernel spacing");
  options_.scattering.z_step = dl;
  kernel_ = solve_marchenko_kernel(v, v.support() + 10.0, options_.marchenko);
  scattering_ = scattering_matrix(v, options_.scattering);
  bound_states_ = find_bound_states(v, options_.bound_states);

  // Jost values on lattice nodes inside the support, for the direct mode
  const long inside = static_cast<long>(std::ceil(v.support() / dl - 1e-9));
  const long nk = scattering_.k.size() / 2;
  jost_table_.resize(nk, inside);
  if (inside > 0) {
    const Eigen::VectorXd grid = uniform_grid(0.0, (inside - 1) * dl, dl);
    parallel_for(nk, [&](long j) {
      jost_table_.row(j) = solve_jost_ode(v, scattering_.k(nk + j), grid).f.transpose();
    });
  }
}

void ContinuousPropagator::require_lattice(const WaveField& phi) const {
  require_uniform_from_zero(phi, "initial data");
  if (std::abs(phi.spacing() - options_.lattice_step) > 1e-9 * options_.lattice_step)
    throw DomainError("propagator", "field spacing differs from the propagator lattice; resample first");
}

WaveField ContinuousPropagator::project_continuous(const WaveField& phi) const {
  return apply_continuous_projector(bound_states_, phi);
}

PropagatorPieces ContinuousPropagator::assemble(const WaveField& phi, double t) const {
  require_lattice(phi);
  require_time(t);
  PropagatorPieces p;
  WaveField g = phi;
  g.values += apply_kernel_transpose(kernel_, phi).values;

  p.free = apply_free(phi, t);
  const WaveField free_g = apply_free(g, t);
  WaveField dressed = free_g;
  dressed.values += apply_kernel(kernel_, free_g).values;
  p.kernel_terms = dressed;
  p.kernel_terms.values -= p.free.values;

  p.t_term = apply_t_term(scattering_, phi, t);

  const WaveField w_g = apply_t_term_spectral(scattering_, g, t);
  const WaveField w_phi = apply_t_term_spectral(scattering_, phi, t);
  p.t_cross = w_g;
  p.t_cross.values += apply_kernel(kernel_, w_g).values - w_phi.values;

  p.total = p.free;
  p.total.values += p.kernel_terms.values + p.t_term.values + p.t_cross.values;
  return p;
}

WaveField ContinuousPropagator::evolve_direct(const WaveField& phi, double t) const {
  const Eigen::Index nk = scattering_.k.size() / 2, nx = phi.size();
  const long inside = jost_table_.cols();
  const double dk = scattering_.k(nk);
  const Eigen::VectorXd wy = trapezoid_weights(phi.x);
  WaveField out{phi.x, Eigen::VectorXcd::Zero(nx), phi.time + t};
  Eigen::Index first, last;
  if (!support_range(phi.values, first, last)) return out;

  // c(k) = F(-k) - S(k) F(k), F(k) = int f(k, y) phi(y) dy, for both signs
  Eigen::VectorXcd c_plus(nk), c_minus(nk);
  parallel_for(nk, [&](long j) {
    const double k = scattering_.k(nk + j);
    Complex fp = 0.0, fm = 0.0;
    for (Eigen::Index i = first; i <= last; ++i) {
      const Complex f = i < inside ? jost_table_(j, i) : std::exp(I * (k * phi.x(i)));
      const Complex v = wy(i) * phi.values(i);
      fp += f * v;
      fm += std::conj(f) * v;
    }
    const double kw = (j == nk - 1 ? 0.5 : 1.0) * dk / (2.0 * pi);
    const Complex evo = std::exp(-I * (t * k * k)) * kw;
    c_plus(j) = evo * (fm - scattering_.S(nk + j) * fp);
    c_minus(j) = evo * (fp - scattering_.S(nk - 1 - j) * fm);
  });
  parallel_for(nx, [&](long i) {
    const double x = phi.x(i);
    Complex sum = 0.0;
    if (i < inside) {
      for (Eigen::Index j = 0; j < nk; ++j) {
        const Complex f = jost_table_(j, i);
        sum += f * c_plus(j) + std::conj(f) * c_minus(j);
      }
    } else {
      const Complex step = std::exp(I * (dk * x));
      Complex e = step;
      for (Eigen::Index j = 0; j < nk; ++j) {
        if ((j & 127) == 127) e = std::exp(I * ((j + 1) * dk * x));
        sum += e * c_plus(j) + std::conj(e) * c_minus(j);
        e *= step;
      }
    }
    out.values(i) = sum;
  });
  return out;
}

WaveField ContinuousPropagator::evolve(const WaveField& phi, double t, PropagatorMode mode) const {
  require_lattice(phi);
  if (t == 0.0) return project_continuous(phi);
  WaveField out = mode == PropagatorMode::direct ? evolve_direct(phi, t) : assemble(phi, t).total;
  out.time = phi.time + t;
  return out;
}

WaveField evolve_continuous(const Potential& v, const WaveField& phi, double t, PropagatorMode mode) {
  PropagatorOptions options;
  options.lattice_step = phi.spacing();
  return ContinuousPropagator(v, options).evolve(phi, t, mode);
}

}  // namespace halfline
