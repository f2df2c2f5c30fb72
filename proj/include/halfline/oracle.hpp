#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "halfline/potential.hpp"
#include "halfline/wavefield.hpp"

namespace halfline {

enum class Subspace { all, pp, continuous };

/// -d^2/dx^2 + V on x_i = i h, i = 1..N, with u(0) = u(L_box) = 0.
/// Fields exchanged with the oracle live on {0, h, ..., L_box} and carry the
/// two boundary zeros explicitly.
struct DiscreteHamiltonian {
  double box_length = 0.0;
  double h = 0.0;
  Eigen::VectorXd x;             ///< full grid including both boundary nodes
  Eigen::VectorXd diagonal;      ///< 2/h^2 + mean of V over the cell around x_i
  double off_diagonal = 0.0;     ///< -1/h^2
  Eigen::VectorXd eigenvalues;   ///< ascending
  Eigen::MatrixXd eigenvectors;  ///< columns orthonormal in the plain l2 sense

  Eigen::Index size() const { return diagonal.size(); }
  bool has_eigenpairs() const { return eigenvectors.size() > 0; }
  long negative_count() const;
  /// Field with zero values on the oracle grid.
  WaveField zero_field() const;
  /// Coefficients (phi, e_n) for the interior samples of phi.
  Eigen::VectorXcd coefficients(const WaveField& phi) const;
  /// Field sum_n c_n e_n.
  WaveField synthesize(const Eigen::VectorXcd& c, double time = 0.0) const;
  /// Mask selecting the eigenindices of a subspace.
  Eigen::VectorXd subspace_mask(Subspace s) const;
  /// 64-bit key identifying (V samples, L_box, h).
  std::uint64_t fingerprint() const;
};

/// Builds the operator and, unless `eigenpairs` is false, its full
/// eigendecomposition. L_box must exceed the potential's support.
DiscreteHamiltonian build_hamiltonian(const Potential& v, double box_length, double h, bool eigenpairs = true);

/// As build_hamiltonian, reusing `<cache_dir>/<fingerprint>.eig` when present.
DiscreteHamiltonian build_hamiltonian_cached(const Potential& v, double box_length, double h,
                                             const std::string& cache_dir);

/// Grid check shared by every oracle entry point.
void require_oracle_grid(const DiscreteHamiltonian& H, const WaveField& phi);

WaveField evolve_oracle(const DiscreteHamiltonian& H, const WaveField& phi, double t, Subspace subspace = Subspace::all);
/// Several times from one projection.
std::vector<WaveField> evolve_oracle(const DiscreteHamiltonian& H, const WaveField& phi,
                                     const std::vector<double>& times, Subspace subspace = Subspace::all);

/// Cayley-transform stepping (I + i dt H / 2) u' = (I - i dt H / 2) u.
WaveField crank_nicolson(const DiscreteHamiltonian& H, const WaveField& phi, double t, int steps);

/// int_0^t e^{-i(t - tau) H} P f(tau) d tau by the trapezoid rule in tau,
/// with each forcing sample projected once.
WaveField duhamel_oracle(const DiscreteHamiltonian& H, const std::vector<WaveField>& forcing,
                         const std::vector<double>& taus, double t, Subspace subspace = Subspace::continuous);
/// Duhamel integral at several times. Each time must lie on the tau grid or
/// beyond its last node (where the forcing is taken to vanish).
std::vector<WaveField> duhamel_oracle(const DiscreteHamiltonian& H, const std::vector<WaveField>& forcing,
                                      const std::vector<double>& taus, const std::vector<double>& times,
                                      Subspace subspace = Subspace::continuous);

}  // namespace halfline
