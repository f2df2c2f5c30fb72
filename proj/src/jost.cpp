#include "halfline/jost.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "halfline/errors.hpp"

namespace halfline {

namespace {
constexpr Complex I{0.0, 1.0};

// Grid-alignment check: returns round(x / step) or -1.
long aligned_index(double x, double step) {
  const double pos = x / step;
  const long i = std::lround(pos);
  return std::abs(pos - i) <= 1e-7 * std::max(1.0, std::abs(pos)) ? i : -1;
}
}  // namespace

Eigen::VectorXcd JostSolution::distortion() const {
  Eigen::VectorXcd d(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) d(i) = f(i) - std::exp(I * k * x(i));
  return d;
}

Eigen::VectorXcd wronskian(const JostSolution& a, const JostSolution& b) {
  return a.f.cwiseProduct(b.fp) - a.fp.cwiseProduct(b.f);
}

JostSolution solve_jost_ode(const Potential& v, Complex k, const Eigen::VectorXd& x_grid, OdeTolerance tol) {
  if (k.imag() < 0) throw DomainError("jost", "Jost solution requires Im k >= 0");
  for (Eigen::Index i = 0; i < x_grid.size(); ++i) {
    if (x_grid(i) < 0) throw DomainError("jost", "grid must lie in [0, inf)");
    if (i > 0 && !(x_grid(i) > x_grid(i - 1))) throw DomainError("jost", "grid must be increasing");
  }
  JostSolution out{k, x_grid, Eigen::VectorXcd(x_grid.size()), Eigen::VectorXcd(x_grid.size())};
  const double lv = v.support();
  for (Eigen::Index i = 0; i < x_grid.size(); ++i)
    if (x_grid(i) >= lv) {
      const Complex e = std::exp(I * k * x_grid(i));
      out.f(i) = e;
      out.fp(i) = I * k * e;
    }
  if (x_grid.size() == 0 || x_grid(0) >= lv) return out;

  // stops, descending from L_V: breakpoints and grid nodes below L_V
  std::vector<double> stops;
  for (double b : v.breakpoints())
    if (b < lv && b > x_grid(0)) stops.push_back(b);
  for (Eigen::Index i = 0; i < x_grid.size(); ++i)
    if (x_grid(i) < lv) stops.push_back(x_grid(i));
  std::sort(stops.begin(), stops.end(), std::greater<>());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  const Complex k2 = k * k;
  // integrate the solution normalized to 1 at L_V (keeps the tolerances relative), rescale on output
  const Complex scale = std::exp(I * k * lv);
  Eigen::Vector2cd y(1.0, I * k);
  double step = 0.05 / std::max(1.0, std::abs(k));
  double hi = lv;
  Eigen::Index node = x_grid.size() - 1;
  while (node >= 0 && x_grid(node) >= lv) --node;
  for (double lo : stops) {
    auto coef = [&, lo, hi](double x) -> Complex {
      const int side = x <= lo ? 1 : (x >= hi ? -1 : 0);
      return v.value(x, side) - k2;
    };
    dopri5_linear(coef, hi, lo, y, step, tol);
    hi = lo;
    if (node >= 0 && x_grid(node) == lo) {
      out.f(node) = scale * y(0);
      out.fp(node) = scale * y(1);
      --node;
    }
  }
  return out;
}

Eigen::Vector2cd jost_at_origin(const Potential& v, Complex k, OdeTolerance tol) {
  Eigen::VectorXd grid(1);
  grid << 0.0;
  const JostSolution s = solve_jost_ode(v, k, grid, tol);
  return {s.f(0), s.fp(0)};
}

// ---------------------------------------------------------------------------

KernelField::KernelField(double support, double x_max, double dx, std::vector<double> breakpoints, Eigen::VectorXd h)
    : support_(support), x_max_(x_max), dx_(dx), breakpoints_(std::move(breakpoints)), h_(std::move(h)) {
  n_ = std::lround(support_ / step());
  if (h_.size() != (n_ + 1) * (n_ + 2) / 2) throw DataError("jost", "kernel table size does not match its grid");
}

long KernelField::index_of(double x) const {
  const long i = aligned_index(x, step());
  if (i < 0) throw DomainError("jost", "point is not on the kernel lattice");
  return i;
}

double KernelField::K(double x, double y) const {
  if (y < x || x < 0) return 0.0;
  const double u = 0.5 * (x + y) / step(), w = 0.5 * (y - x) / step();
  const long iu = std::lround(u), iv = std::lround(w);
  if (std::abs(u - iu) < 1e-9 && std::abs(w - iv) < 1e-9) return h(iu, iv);
  const long i0 = static_cast<long>(std::floor(u)), j0 = static_cast<long>(std::floor(w));
  const double fu = u - i0, fv = w - j0;
  auto at = [&](long i, long j) { return h(i, std::min(j, i)); };
  return (1 - fu) * (1 - fv) * at(i0, j0) + fu * (1 - fv) * at(i0 + 1, j0) + (1 - fu) * fv * at(i0, j0 + 1) +
         fu * fv * at(i0 + 1, j0 + 1);
}

std::vector<double> KernelField::diagonal(long i0) const {
  std::vector<double> s;
  for (long j = 0; i0 + j <= n_; ++j) s.push_back(h(i0 + j, j));
  return s;
}

namespace {
std::vector<long> breakpoint_indices(const std::vector<double>& breakpoints, double step) {
  std::vector<long> idx;
  for (double b : breakpoints) {
    const long i = aligned_index(b, step);
    if (i >= 0) idx.push_back(i);
  }
  return idx;
}
}  // namespace

std::vector<std::size_t> KernelField::diagonal_breaks(long i0) const {
  std::set<std::size_t> out;
  const long count = n_ - i0 + 1;
  const auto b = breakpoint_indices(breakpoints_, step());
  for (long bi : b) {
    const long j = bi - i0;
    if (j > 0 && j < count - 1) out.insert(static_cast<std::size_t>(j));
    for (long bj : b) {
      const long jj = bi - bj;
      if (jj > 0 && jj < count - 1) out.insert(static_cast<std::size_t>(jj));
    }
  }
  return {out.begin(), out.end()};
}

std::vector<double> KernelField::antidiagonal(long m, long& j_lo) const {
  j_lo = std::max(0L, m - n_);
  std::vector<double> s;
  for (long j = j_lo; 2 * j <= m; ++j) s.push_back(h(m - j, j));
  return s;
}

std::vector<std::size_t> KernelField::antidiagonal_breaks(long m, long j_lo, std::size_t count) const {
  std::set<std::size_t> out;
  const auto b = breakpoint_indices(breakpoints_, step());
  auto add = [&](long j) {
    const long local = j - j_lo;
    if (local > 0 && local < static_cast<long>(count) - 1) out.insert(static_cast<std::size_t>(local));
  };
  for (long bi : b) {
    add(m - bi);
    if ((m - bi) % 2 == 0) add((m - bi) / 2);
    for (long bj : b) add(bi - bj);
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------

namespace {

struct PicardResult {
  Eigen::VectorXd h;
  std::vector<double> history;
};

PicardResult picard_solve(const Potential& v, long n, double step, const MarchenkoOptions& options) {
  const auto idx = [](long i, long j) { return i * (i + 1) / 2 + j; };
  const long size = (n + 1) * (n + 2) / 2;
  Eigen::VectorXd source(n + 1), vg(n + 1);
  for (long i = 0; i <= n; ++i) {
    source(i) = 0.5 * tail_integral(v, i * step);
    vg(i) = v.value(i * step, 0);
  }
  PicardResult out;
  out.h.resize(size);
  for (long i = 0; i <= n; ++i)
    for (long j = 0; j <= i; ++j) out.h(idx(i, j)) = source(i);

  Eigen::VectorXd g(size), next(size), acc(n + 1);
  const double half = 0.5 * step;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    // inner integral in y, cumulative along each row
    for (long l = 0; l <= n; ++l) {
      const long base = idx(l, 0);
      g(base) = 0.0;
      double prev = vg(l) * out.h(base);
      for (long j = 1; j <= l; ++j) {
        const double q = vg(l - j) * out.h(base + j);
        g(base + j) = g(base + j - 1) + half * (prev + q);
        prev = q;
      }
    }
    // outer integral in x from the right
    acc.setZero();
    for (long i = n; i >= 0; --i) {
      if (i < n) {
        const long base = idx(i, 0), above = idx(i + 1, 0);
        for (long j = 0; j <= i; ++j) acc(j) += half * (g(base + j) + g(above + j));
      }
      const long base = idx(i, 0);
      for (long j = 0; j <= i; ++j) next(base + j) = source(i) + acc(j);
    }
    const double diff = (next - out.h).cwiseAbs().maxCoeff();
    out.h.swap(next);
    out.history.push_back(diff);
    if (diff < options.tol) return out;
    if (!std::isfinite(diff)) break;
  }
  std::ostringstream msg;
  msg << "Picard iteration did not converge in " << options.max_iter << " sweeps; last difference "
      << (out.history.empty() ? 0.0 : out.history.back());
  if (out.history.size() >= 2)
    msg << ", observed contraction ratio " << out.history.back() / out.history[out.history.size() - 2];
  throw IterationError("jost", msg.str());
}

}  // namespace

KernelField solve_marchenko_kernel(const Potential& v, double x_max, MarchenkoOptions options) {
  if (!(options.dx > 0)) throw DomainError("jost", "kernel spacing must be positive");
  if (x_max < v.support()) throw DomainError("jost", "X_max must be at least the support bound");
  first_moment(v);  // admissibility gate
  const double step = 0.5 * options.dx;
  const double fine = options.richardson ? 0.5 * step : step;
  const long n = aligned_index(v.support(), step);
  if (n < 0) throw DomainError("jost", "support bound is not a multiple of the kernel spacing");
  for (double b : v.breakpoints())
    if (aligned_index(b, fine) < 0) throw DomainError("jost", "potential breakpoint is not on the kernel lattice");

  PicardResult coarse = picard_solve(v, n, step, options);
  Eigen::VectorXd h = coarse.h;
  if (options.richardson && n > 0) {
    const PicardResult refined = picard_solve(v, 2 * n, fine, options);
    for (long i = 0; i <= n; ++i)
      for (long j = 0; j <= i; ++j) {
        const long c = i * (i + 1) / 2 + j;
        const long f = (2 * i) * (2 * i + 1) / 2 + 2 * j;
        h(c) = (4.0 * refined.h(f) - coarse.h(c)) / 3.0;
      }
  }
  KernelField field(v.support(), x_max, options.dx, v.breakpoints(), std::move(h));
  field.picard_history = std::move(coarse.history);
  return field;
}

Complex jost_from_kernel(const KernelField& kernel, Complex k, double x) {
  if (k.imag() < 0) throw DomainError("jost", "Jost solution requires Im k >= 0");
  if (x < 0 || x > kernel.x_max() + 1e-12) throw DomainError("jost", "x outside the kernel grid");
  const Complex plane = std::exp(I * k * x);
  if (x >= kernel.support()) return plane;
  const long i0 = kernel.index_of(x);
  const std::vector<double> samples = kernel.diagonal(i0);
  const auto breaks = kernel.diagonal_breaks(i0);
  const Complex twice_k = 2.0 * k;
  const Complex integral = integrate_cubic<double>(samples, kernel.step(), breaks,
                                                   [&](double w) { return std::exp(I * twice_k * w); });
  return plane * (1.0 + 2.0 * integral);
}

double kernel_envelope(const MomentProfile& moments, double u, double v) {
  return 0.5 * moments.sigma(u) * std::exp(moments.sigma1(u - v) - moments.sigma1(u));
}

KernelBoundReport kernel_bound_check(const KernelField& kernel, const Potential& v, const MomentProfile& moments,
                                     double tol) {
  KernelBoundReport report;
  report.tolerance = tol;
  report.worst_kernel_margin = report.worst_h_margin = std::numeric_limits<double>::infinity();
  report.worst_du_excess = report.worst_dv_excess = -std::numeric_limits<double>::infinity();
  const long n = kernel.intervals();
  const double step = kernel.step();
  for (long i = 0; i <= n; ++i)
    for (long j = 0; j <= i; ++j) {
      const double u = i * step, w = j * step;
      const double q = kernel_envelope(moments, u, w);
      const double value = std::abs(kernel.h(i, j));
      ++report.nodes;
      report.worst_h_margin = std::min(report.worst_h_margin, q - value);
      if (value > q + tol) ++report.h_violations;
      // K at (x, y) = (u - v, u + v), bound (1/2) sigma((x+y)/2) exp(sigma_1(x) - sigma_1((x+y)/2))
      const double bound = 0.5 * moments.sigma(u) * std::exp(moments.sigma1(u - w) - moments.sigma1(u));
      const double kv = std::abs(kernel.K(u - w, u + w));
      report.worst_kernel_margin = std::min(report.worst_kernel_margin, bound - kv);
      if (kv > bound + tol) ++report.kernel_violations;

      // derivative bounds from centered (or one-sided) differences
      if (n >= 2) {
        const long ia = std::max(j, i - 1), ib = std::min(n, i + 1);
        const long ja = std::max(0L, j - 1), jb = std::min(i, j + 1);
        const double sig = moments.sigma(u - w);
        if (ib > ia) {
          const double du = (kernel.h(ib, j) - kernel.h(ia, j)) / ((ib - ia) * step);
          const double vmax = std::max({std::abs(v.value(u, -1)), std::abs(v.value(u, 1)),
                                        std::abs(v.value(ia * step, 0)), std::abs(v.value(ib * step, 0))});
          const double b = 0.5 * vmax + sig * kernel_envelope(moments, std::max(u, ia * step), w);
          const double slack = tol + step * (0.5 * vmax + sig * q) + 2.0 * step;
          const double excess = std::abs(du) - (0.5 * vmax + sig * std::max(q, kernel_envelope(moments, ia * step, std::min(w, ia * step))));
          report.worst_du_excess = std::max(report.worst_du_excess, std::abs(du) - b);
          if (excess > slack) ++report.du_violations;
        }
        if (jb > ja) {
          const double dv = (kernel.h(i, jb) - kernel.h(i, ja)) / ((jb - ja) * step);
          const double qmax = std::max(kernel_envelope(moments, u, jb * step), q);
          const double sigmax = std::max(sig, moments.sigma(u - jb * step));
          const double b = sigmax * qmax;
          report.worst_dv_excess = std::max(report.worst_dv_excess, std::abs(dv) - b);
          if (std::abs(dv) - b > tol + 2.0 * step * b + step) ++report.dv_violations;
        }
      }
    }
  if (report.nodes == 0) report.worst_kernel_margin = report.worst_h_margin = 0.0;
  return report;
}

}  // namespace halfline
