#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "halfline/jost.hpp"
#include "halfline/potential.hpp"
#include "halfline/wavefield.hpp"

namespace halfline {

struct ScatteringOptions {
  double k_max = 32.0;
  long k_count = 4096;             ///< nodes per sign; k_j = j k_max / k_count
  double window_fraction = 0.1;    ///< raised-cosine taper on the outer part of the k range
  double z_extent = 40.0;          ///< inverse transform sampled on [-z_extent, z_extent]
  double z_step = 1.0 / 32.0;
  double resonance_threshold = 1e-8;
  double conditioning_threshold = 1e-12;
};

/// S(k) = f(-k,0)/f(k,0) on a symmetric grid, T = S - 1, and the windowed
/// inverse transform T~(z) = (1/2pi) int T(k) exp(ikz) dk.
struct ScatteringData {
  Eigen::VectorXd k;     ///< ascending, symmetric, zero excluded
  Eigen::VectorXcd jost_origin;  ///< f(k, 0)
  Eigen::VectorXcd S;
  Eigen::VectorXcd T;
  Eigen::VectorXd z;
  Eigen::VectorXd t_hat;          ///< real by the symmetry T(-k) = conj T(k)
  double t_hat_l1 = 0.0;          ///< int |T~(z)| dz over the sampled range
  double t_hat_tail_mass = 0.0;   ///< mass in the outer 10% of the z range
  double jost_zero_energy = 1.0;  ///< f(0, 0)
  double k_step() const { return k.size() > 1 ? k(k.size() - 1) - k(k.size() - 2) : 0.0; }
  double max_unimodularity_defect() const;
  double max_conjugation_defect() const;
};

ScatteringData scattering_matrix(const Potential& v, ScatteringOptions options = {});

/// Bound states: zeros k = i kappa_j of f(k, 0).
struct BoundStateSet {
  Potential potential = Potential::zero();
  std::vector<double> kappas;       ///< increasing
  std::vector<double> energies;     ///< -kappa^2
  std::vector<double> norms;        ///< ||f(i kappa_j, .)||_{L2}
  std::vector<double> origin_values;  ///< f(i kappa_j, 0) / norm: residual of the Dirichlet condition
  std::vector<std::string> warnings;

  std::size_t size() const { return kappas.size(); }
  /// Normalized eigenfunction f(i kappa_j, x) / ||f|| sampled on x.
  Eigen::VectorXd eigenfunction(std::size_t j, const Eigen::VectorXd& x) const;
};

struct BoundStateOptions {
  double kappa_max = 0.0;  ///< 0 selects sqrt(sup |V|) + 1
  double epsilon = 1e-6;
  long scan_points = 4000;
  double tol = 1e-10;
};

BoundStateSet find_bound_states(const Potential& v, BoundStateOptions options = {});

/// P_pp phi = sum_j f_j (phi, f_j), with the eigenfunctions resampled on phi's
/// grid and orthonormalized against the trapezoid inner product of that grid.
WaveField apply_pp_projector(const BoundStateSet& states, const WaveField& phi);
/// phi - P_pp phi.
WaveField apply_continuous_projector(const BoundStateSet& states, const WaveField& phi);

}  // namespace halfline
