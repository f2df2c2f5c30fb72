#pragma once

#include <memory>

#include <Eigen/Core>

#include "halfline/jost.hpp"
#include "halfline/scattering.hpp"
#include "halfline/wavefield.hpp"

namespace halfline {

/// f_t(z) = exp(i z^2 / 4t) / sqrt(4 pi i t), principal branch.
Complex fresnel_kernel(double t, double z);
/// Dirichlet free kernel f_t(x - y) - f_t(x + y).
Complex free_kernel(double t, double x, double y);

/// b_t(x, y) = int_x^inf f_t(y - z) K(x, z) dz. x must lie on the kernel lattice.
Complex correction_b(const KernelField& kernel, double t, double x, double y);
/// c_t(x, y) = int_y^inf f_t(x - z) K(y, z) dz. y must lie on the kernel lattice.
Complex correction_c(const KernelField& kernel, double t, double x, double y);
/// e_t(x, y) = int int K(x, z1) K(y, z2) f_t(z1 - z2) dz1 dz2.
Complex correction_e(const KernelField& kernel, double t, double x, double y);
/// e_t on a product lattice (rows: xs, columns: ys); reuses the inner convolution per y.
Eigen::MatrixXcd correction_e_matrix(const KernelField& kernel, double t, const Eigen::VectorXd& xs,
                                     const Eigen::VectorXd& ys);
/// int |K(x, z)| dz, the constant in |b_t(x, .)| <= (4 pi |t|)^(-1/2) int |K(x, z)| dz.
double kernel_row_l1(const KernelField& kernel, double x);

/// A(s) = int f_t(y - s) g(y) dy over g's uniform grid (free evolution on the line
/// of g extended by zero), with the quadrature refined until the chirp is resolved.
Eigen::VectorXcd fresnel_transform(const WaveField& g, double t, const Eigen::VectorXd& points);
/// Dirichlet free evolution on g's grid: int [f_t(x - y) - f_t(x + y)] g(y) dy.
WaveField apply_free(const WaveField& g, double t);

/// (T_{t,3} phi)(x) = -int T~(z) int f_t(x + y - z) phi(y) dy dz on phi's grid, whose
/// spacing must equal the T~ sampling step.
WaveField apply_t_term(const ScatteringData& scattering, const WaveField& phi, double t);
/// Same operator evaluated in k-space: -(1/2pi) int e^{-itk^2} T(k) e^{ikx} phi^(k) dk.
WaveField apply_t_term_spectral(const ScatteringData& scattering, const WaveField& phi, double t);

/// (K w)(x) = int K(x, z) w(z) dz and (K^T w)(z) = int K(y, z) w(y) dy on w's grid.
WaveField apply_kernel(const KernelField& kernel, const WaveField& w);
WaveField apply_kernel_transpose(const KernelField& kernel, const WaveField& w);

enum class PropagatorMode {
  assembled,  ///< free term + Fresnel-convolution corrections + T-terms
  direct      ///< k-quadrature of the Parseval kernel with ODE Jost solutions
};

struct PropagatorOptions {
  double lattice_step = 1.0 / 32.0;
  MarchenkoOptions marchenko{};
  ScatteringOptions scattering{};
  BoundStateOptions bound_states{};
};

/// Pieces of one assembled evaluation; total = free + kernel_terms + t_term + t_cross.
struct PropagatorPieces {
  WaveField free;          ///< U0 phi
  WaveField kernel_terms;  ///< (I+K) U0 (I+K^T) phi - U0 phi: the b, c, e terms and their mirrors
  WaveField t_term;        ///< T_{t,3} phi through T~
  WaveField t_cross;       ///< T(k) d(k,.) cross terms, evaluated in k-space
  WaveField total;
};

/// e^{-itH} P_c on fields sampled on the lattice {0, step, 2 step, ...}.
class ContinuousPropagator {
 public:
  explicit ContinuousPropagator(const Potential& v, PropagatorOptions options = {});

  const Potential& potential() const { return potential_; }
  const KernelField& kernel() const { return kernel_; }
  const ScatteringData& scattering() const { return scattering_; }
  const BoundStateSet& bound_states() const { return bound_states_; }
  const PropagatorOptions& options() const { return options_; }

  WaveField evolve(const WaveField& phi, double t, PropagatorMode mode = PropagatorMode::assembled) const;
  PropagatorPieces assemble(const WaveField& phi, double t) const;
  WaveField project_continuous(const WaveField& phi) const;

 private:
  void require_lattice(const WaveField& phi) const;
  WaveField evolve_direct(const WaveField& phi, double t) const;

  Potential potential_;
  PropagatorOptions options_;
  KernelField kernel_;
  ScatteringData scattering_;
  BoundStateSet bound_states_;
  Eigen::MatrixXcd jost_table_;  ///< f(k_j, x_i), k_j > 0, lattice nodes below L_V
};

WaveField evolve_continuous(const Potential& v, const WaveField& phi, double t,
                            PropagatorMode mode = PropagatorMode::assembled);

}  // namespace halfline
