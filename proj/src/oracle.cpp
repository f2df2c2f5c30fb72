#include "halfline/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <lapacke.h>

#include "halfline/errors.hpp"

namespace halfline {

namespace {
constexpr Complex I{0.0, 1.0};

// Real matrix times complex vector, split into two real products.
Eigen::VectorXcd real_times_complex(const Eigen::MatrixXd& m, const Eigen::VectorXcd& c, bool transpose) {
  Eigen::VectorXd re, im;
  if (transpose) {
    re.noalias() = m.transpose() * c.real();
    im.noalias() = m.transpose() * c.imag();
  } else {
    re.noalias() = m * c.real();
    im.noalias() = m * c.imag();
  }
  Eigen::VectorXcd out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

void require_eigenpairs(const DiscreteHamiltonian& H) {
  if (!H.has_eigenpairs()) throw DomainError("oracle", "operator was built without eigenpairs");
}
}  // namespace

long DiscreteHamiltonian::negative_count() const { return (eigenvalues.array() < 0.0).count(); }

WaveField DiscreteHamiltonian::zero_field() const { return {x, Eigen::VectorXcd::Zero(x.size()), 0.0}; }

Eigen::VectorXcd DiscreteHamiltonian::coefficients(const WaveField& phi) const {
  require_eigenpairs(*this);
  return real_times_complex(eigenvectors, phi.values.segment(1, size()), true);
}

WaveField DiscreteHamiltonian::synthesize(const Eigen::VectorXcd& c, double time) const {
  WaveField out = zero_field();
  out.values.segment(1, size()) = real_times_complex(eigenvectors, c, false);
  out.time = time;
  return out;
}

Eigen::VectorXd DiscreteHamiltonian::subspace_mask(Subspace s) const {
  Eigen::VectorXd mask(eigenvalues.size());
  for (Eigen::Index n = 0; n < mask.size(); ++n) {
    const bool bound = eigenvalues(n) < 0.0;
    mask(n) = s == Subspace::all || (s == Subspace::pp) == bound ? 1.0 : 0.0;
  }
  return mask;
}

std::uint64_t DiscreteHamiltonian::fingerprint() const {
  // FNV-1a over the raw bytes of everything that defines the operator
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) hash = (hash ^ p[i]) * 1099511628211ULL;
  };
  mix(&box_length, sizeof box_length);
  mix(&h, sizeof h);
  mix(diagonal.data(), sizeof(double) * diagonal.size());
  return hash;
}

DiscreteHamiltonian build_hamiltonian(const Potential& v, double box_length, double h, bool eigenpairs) {
  if (!(h > 0.0) || !std::isfinite(box_length)) throw DomainError("oracle", "grid spacing must be positive");
  if (box_length <= v.support() + 10.0 * h)
    throw DomainError("oracle", "box length must exceed the potential support by a margin");
  const long cells = std::lround(box_length / h);
  if (cells < 3) throw DomainError("oracle", "grid too coarse");

  DiscreteHamiltonian H;
  H.box_length = cells * h;
  H.h = h;
  H.x = Eigen::VectorXd::LinSpaced(cells + 1, 0.0, H.box_length);
  const long n = cells - 1;
  H.diagonal.resize(n);
  // cell averages of V keep second order when a jump falls between nodes
  std::vector<double> tails(n + 1);
  for (long i = 0; i <= n; ++i) tails[i] = tail_integral(v, std::min(H.x(i) + 0.5 * h, v.support()));
  for (long i = 0; i < n; ++i) H.diagonal(i) = 2.0 / (h * h) + (tails[i] - tails[i + 1]) / h;
  H.off_diagonal = -1.0 / (h * h);
  if (!eigenpairs) return H;

  Eigen::VectorXd d = H.diagonal, e = Eigen::VectorXd::Constant(n, H.off_diagonal);
  H.eigenvalues.resize(n);
  H.eigenvectors.resize(n, n);
  std::vector<lapack_int> support(2 * n);
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0, &found,
                                         H.eigenvalues.data(), H.eigenvectors.data(), n, n, support.data(), &tryrac);
  if (info != 0 || found != n)
    throw NumericalError("oracle", "tridiagonal eigensolver failed (info " + std::to_string(info) + ")");
  return H;
}

DiscreteHamiltonian build_hamiltonian_cached(const Potential& v, double box_length, double h,
                                             const std::string& cache_dir) {
  DiscreteHamiltonian H = build_hamiltonian(v, box_length, h, false);
  std::ostringstream name;
  name << std::hex << H.fingerprint() << ".eig";
  const std::filesystem::path path = std::filesystem::path(cache_dir) / name.str();
  const Eigen::Index n = H.size();
  const std::size_t bytes = sizeof(double) * n * (n + 1);
  if (std::ifstream in{path, std::ios::binary}) {
    H.eigenvalues.resize(n);
    H.eigenvectors.resize(n, n);
    in.read(reinterpret_cast<char*>(H.eigenvalues.data()), sizeof(double) * n);
    in.read(reinterpret_cast<char*>(H.eigenvectors.data()), sizeof(double) * n * n);
    if (in.gcount() == static_cast<std::streamsize>(sizeof(double) * n * n)) return H;
  }
  H = build_hamiltonian(v, box_length, h, true);
  std::filesystem::create_directories(cache_dir);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out{tmp, std::ios::binary};
    out.write(reinterpret_cast<const char*>(H.eigenvalues.data()), sizeof(double) * n);
    out.write(reinterpret_cast<const char*>(H.eigenvectors.data()), sizeof(double) * n * n);
    if (!out) return H;  // an unwritable cache is not an error
  }
  if (std::filesystem::file_size(tmp) == bytes) std::filesystem::rename(tmp, path);
  return H;
}

void require_oracle_grid(const DiscreteHamiltonian& H, const WaveField& phi) {
  if (phi.size() != H.x.size() || std::abs(phi.x(0)) > 1e-12 ||
      std::abs(phi.x(phi.size() - 1) - H.box_length) > 1e-9 * H.box_length || !phi.uniform())
    throw DomainError("oracle", "field is not sampled on the oracle grid");
}

std::vector<WaveField> evolve_oracle(const DiscreteHamiltonian& H, const WaveField& phi,
                                     const std::vector<double>& times, Subspace subspace) {
  require_oracle_grid(H, phi);
  const Eigen::VectorXcd c = H.coefficients(phi).cwiseProduct(H.subspace_mask(subspace));
  std::vector<WaveField> out;
  out.reserve(times.size());
  for (double t : times) {
    const Eigen::VectorXcd phases = (-I * t * H.eigenvalues.array()).exp().matrix();
    out.push_back(H.synthesize(c.cwiseProduct(phases), phi.time + t));
  }
  return out;
}

WaveField evolve_oracle(const DiscreteHamiltonian& H, const WaveField& phi, double t, Subspace subspace) {
  return evolve_oracle(H, phi, std::vector<double>{t}, subspace).front();
}

WaveField crank_nicolson(const DiscreteHamiltonian& H, const WaveField& phi, double t, int steps) {
  if (steps < 1) throw DomainError("oracle", "crank_nicolson needs at least one step");
  require_oracle_grid(H, phi);
  const Eigen::Index n = H.size();
  const Complex a = 0.5 * I * (t / steps);
  // (1 + a H) u' = (1 - a H) u; the left factor is factored once
  const Complex off = a * H.off_diagonal;
  Eigen::VectorXcd diag = (1.0 + a * H.diagonal.array()).matrix();
  Eigen::VectorXcd pivot(n), upper(n);
  pivot(0) = diag(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    upper(i - 1) = off / pivot(i - 1);
    pivot(i) = diag(i) - off * upper(i - 1);
    if (std::abs(pivot(i)) < 1e-300) throw NumericalError("oracle", "singular Cayley system");
  }
  Eigen::VectorXcd u = phi.values.segment(1, n), rhs(n);
  for (int s = 0; s < steps; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex hu = H.diagonal(i) * u(i);
      if (i > 0) hu += H.off_diagonal * u(i - 1);
      if (i + 1 < n) hu += H.off_diagonal * u(i + 1);
      rhs(i) = u(i) - a * hu;
    }
    u(0) = rhs(0) / pivot(0);
    for (Eigen::Index i = 1; i < n; ++i) u(i) = (rhs(i) - off * u(i - 1)) / pivot(i);
    for (Eigen::Index i = n - 2; i >= 0; --i) u(i) -= upper(i) * u(i + 1);
  }
  WaveField out = H.zero_field();
  out.values.segment(1, n) = u;
  out.time = phi.time + t;
  return out;
}

std::vector<WaveField> duhamel_oracle(const DiscreteHamiltonian& H, const std::vector<WaveField>& forcing,
                                      const std::vector<double>& taus, const std::vector<double>& times,
                                      Subspace subspace) {
  if (forcing.size() != taus.size()) throw DomainError("oracle", "forcing and time samples differ in length");
  for (std::size_t m = 1; m < taus.size(); ++m)
    if (!(taus[m] > taus[m - 1])) throw DomainError("oracle", "forcing times must increase");
  // cumulative trapezoid of e^{i lambda tau} (f(tau), e_n)
  std::vector<Eigen::VectorXcd> cumulative;
  Eigen::VectorXcd previous;
  for (std::size_t m = 0; m < taus.size(); ++m) {
    require_oracle_grid(H, forcing[m]);
    const Eigen::VectorXcd phases = (I * taus[m] * H.eigenvalues.array()).exp().matrix();
    Eigen::VectorXcd current = H.coefficients(forcing[m]).cwiseProduct(phases);
    if (m == 0) cumulative.push_back(Eigen::VectorXcd::Zero(H.size()));
    else cumulative.push_back(cumulative.back() + 0.5 * (taus[m] - taus[m - 1]) * (previous + current));
    previous = std::move(current);
  }
  const Eigen::VectorXd mask = H.subspace_mask(subspace);
  std::vector<WaveField> out;
  for (double t : times) {
    if (taus.empty() || t < taus.front()) {
      WaveField zero = H.zero_field();
      zero.time = t;
      out.push_back(zero);
      continue;
    }
    std::size_t m = taus.size() - 1;
    if (t < taus.back()) {
      const auto it = std::lower_bound(taus.begin(), taus.end(), t - 1e-12);
      m = static_cast<std::size_t>(it - taus.begin());
      if (std::abs(taus[m] - t) > 1e-12) throw DomainError("oracle", "evaluation time is not on the forcing grid");
    }
    const Eigen::VectorXcd phases = (-I * t * H.eigenvalues.array()).exp().matrix();
    out.push_back(H.synthesize(cumulative[m].cwiseProduct(phases).cwiseProduct(mask), t));
  }
  return out;
}

WaveField duhamel_oracle(const DiscreteHamiltonian& H, const std::vector<WaveField>& forcing,
                         const std::vector<double>& taus, double t, Subspace subspace) {
  return duhamel_oracle(H, forcing, taus, std::vector<double>{t}, subspace).front();
}

}  // namespace halfline
