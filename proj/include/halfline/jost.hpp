#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "halfline/ode.hpp"
#include "halfline/potential.hpp"
#include "halfline/quadrature.hpp"

namespace halfline {

/// Jost solution f(k, x) and its x-derivative sampled on a grid.
struct JostSolution {
  Complex k;
  Eigen::VectorXd x;
  Eigen::VectorXcd f;
  Eigen::VectorXcd fp;

  /// d(k, x) = f(k, x) - exp(ikx).
  Eigen::VectorXcd distortion() const;
};

/// Wronskian f1 f2' - f1' f2, one value per grid node.
Eigen::VectorXcd wronskian(const JostSolution& a, const JostSolution& b);

/// Integrates -f'' + V f = k^2 f backward from x = L_V, where f = exp(ikx).
/// Nodes beyond L_V are filled with the plane wave. Requires Im k >= 0.
JostSolution solve_jost_ode(const Potential& v, Complex k, const Eigen::VectorXd& x_grid, OdeTolerance tol = {});

/// (f(k, 0), f'(k, 0)).
Eigen::Vector2cd jost_at_origin(const Potential& v, Complex k, OdeTolerance tol = {});

struct MarchenkoOptions {
  double dx = 1.0 / 64.0;  ///< (x, y) spacing; the (u, v) grid uses dx / 2
  double tol = 1e-10;
  int max_iter = 200;
  bool richardson = true;  ///< extrapolate from a second solve at half spacing
};

/// Transformation kernel K(x, y) stored through h(u, v) = K(u - v, u + v) on the
/// triangle 0 <= v <= u <= L_V with spacing `step()`. h vanishes for u >= L_V.
class KernelField {
 public:
  KernelField() = default;
  KernelField(double support, double x_max, double dx, std::vector<double> breakpoints, Eigen::VectorXd h);

  double support() const { return support_; }
  double x_max() const { return x_max_; }
  double dx() const { return dx_; }
  double step() const { return 0.5 * dx_; }
  long intervals() const { return n_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const Eigen::VectorXd& h_table() const { return h_; }

  /// Node value h(i step, j step); zero outside the triangle.
  double h(long i, long j) const {
    if (j < 0 || j > i || i > n_) return 0.0;
    return h_(i * (i + 1) / 2 + j);
  }
  /// K(x, y); zero for y < x. Grid-aligned arguments are exact, others bilinear in (u, v).
  double K(double x, double y) const;

  /// Samples h(x + v_j, v_j), j = 0..n - i0 for grid-aligned x = i0 step,
  /// i.e. K(x, x + 2 v_j). Together with `diagonal_breaks` this feeds integrate_cubic.
  std::vector<double> diagonal(long i0) const;
  std::vector<std::size_t> diagonal_breaks(long i0) const;
  /// Samples h(z - v, v) for v_j = j_lo + j, the anti-diagonal u + v = z (z = m step,
  /// K(z - 2v, z)); returns the first v index through `j_lo`.
  std::vector<double> antidiagonal(long m, long& j_lo) const;
  std::vector<std::size_t> antidiagonal_breaks(long m, long j_lo, std::size_t count) const;

  /// Grid index of a point that must lie on the (u, v) lattice.
  long index_of(double x) const;

  /// sup-norm of successive Picard differences (coarse solve), for contraction diagnostics.
  std::vector<double> picard_history;

 private:
  double support_ = 0.0;
  double x_max_ = 0.0;
  double dx_ = 1.0 / 64.0;
  long n_ = 0;
  std::vector<double> breakpoints_;
  Eigen::VectorXd h_;
};

/// Solves h(u,v) = (1/2) int_u^inf V + int_u^inf dx int_0^v V(x-y) h(x,y) dy by
/// Picard iteration with trapezoid quadrature. Throws IterationError when the
/// iteration has not converged after max_iter sweeps.
KernelField solve_marchenko_kernel(const Potential& v, double x_max, MarchenkoOptions options = {});

/// f(k, x) = exp(ikx) + int_x^inf K(x, y) exp(iky) dy. x must lie on the kernel lattice.
Complex jost_from_kernel(const KernelField& kernel, Complex k, double x);

struct KernelBoundReport {
  long nodes = 0;
  long kernel_violations = 0;   ///< |K(x,y)| above the sigma/sigma_1 envelope
  long h_violations = 0;        ///< |h(u,v)| above q(u,v)
  double worst_kernel_margin = 0.0;  ///< min over nodes of bound - |K|
  double worst_h_margin = 0.0;
  long du_violations = 0;  ///< finite-difference d_u h above its bound beyond the discretization term
  long dv_violations = 0;
  double worst_du_excess = 0.0;  ///< max of |d_u h| - bound (negative means satisfied everywhere)
  double worst_dv_excess = 0.0;
  double tolerance = 0.0;
  bool ok() const { return kernel_violations == 0 && h_violations == 0; }
};

/// q(u, v) = (1/2) sigma(u) exp(sigma_1(u - v) - sigma_1(u)).
double kernel_envelope(const MomentProfile& moments, double u, double v);

KernelBoundReport kernel_bound_check(const KernelField& kernel, const Potential& v, const MomentProfile& moments,
                                     double tol = 1e-6);

}  // namespace halfline
