#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace halfline {

using Complex = std::complex<double>;

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  int size;
  std::array<double, 8> nodes;
  std::array<double, 8> weights;
};

/// Supported sizes: 2, 4, 6, 8.
const GaussRule& gauss_legendre(int n);

/// Composite trapezoid with step doubling and Richardson extrapolation
/// (Romberg). Stops when two successive diagonal entries agree to `rtol`
/// relative (or both are exactly zero).
template <class F>
double romberg(F&& f, double a, double b, double rtol = 1e-10, int max_levels = 22) {
  if (b <= a) return 0.0;
  std::vector<double> prev, cur;
  double h = b - a;
  prev.push_back(0.5 * h * (f(a) + f(b)));
  for (int level = 1; level < max_levels; ++level) {
    const long n = 1L << (level - 1);
    h *= 0.5;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += f(a + (2 * i + 1) * h);
    cur.assign(level + 1, 0.0);
    cur[0] = 0.5 * prev[0] + h * sum;
    double factor = 1.0;
    for (int m = 1; m <= level; ++m) {
      factor *= 4.0;
      cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (factor - 1.0);
    }
    const double diff = std::abs(cur[level] - prev[level - 1]);
    if (level >= 4 && diff <= rtol * std::abs(cur[level])) return cur[level];
    if (level >= 4 && diff <= 1e-300) return cur[level];
    prev.swap(cur);
  }
  return prev.back();
}

/// Trapezoid rule for samples on an arbitrary increasing grid.
template <class Derived>
typename Derived::Scalar trapezoid(const Eigen::VectorXd& x, const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  Scalar sum{0};
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) sum += 0.5 * (x(i + 1) - x(i)) * (y(i) + y(i + 1));
  return sum;
}

namespace detail {
// Lagrange basis on nodes 0..3 evaluated at the Gauss points of interval
// [offset, offset+1]; table[offset][gauss point][node].
const std::array<std::array<std::array<double, 4>, 8>, 3>& cubic_basis_table(int gauss_size);
}  // namespace detail

/// Integrates p(s) * weight(s) over [0, (n-1) * step], where p is the piecewise
/// cubic Lagrange interpolant of `samples` (s_j = j * step). `breaks` holds
/// sample indices where the sampled function is not smooth; stencils never
/// straddle them. Each cell is integrated with a Gauss-Legendre rule.
template <class Scalar, class Weight>
auto integrate_cubic(std::span<const Scalar> samples, double step, std::span<const std::size_t> breaks,
                     Weight&& weight, int gauss_size = 6) {
  using Result = decltype(Scalar{} * weight(0.0));
  Result total{0};
  const std::size_t n = samples.size();
  if (n < 2) return total;
  const GaussRule& rule = gauss_legendre(gauss_size);
  const auto& table = detail::cubic_basis_table(gauss_size);

  std::vector<std::size_t> cuts{0};
  for (std::size_t b : breaks)
    if (b > cuts.back() && b < n - 1) cuts.push_back(b);
  cuts.push_back(n - 1);

  for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
    const std::size_t p0 = cuts[piece], p1 = cuts[piece + 1];
    const std::size_t nodes = p1 - p0 + 1;
    for (std::size_t j = p0; j < p1; ++j) {
      const double left = j * step;
      for (int g = 0; g < rule.size; ++g) {
        const double tau = 0.5 * (rule.nodes[g] + 1.0);
        const double s = left + tau * step;
        Scalar value{0};
        if (nodes >= 4) {
          std::size_t start = j >= p0 + 1 ? j - 1 : p0;
          if (start + 3 > p1) start = p1 - 3;
          const auto& basis = table[j - start][g];
          for (int m = 0; m < 4; ++m) value += basis[m] * samples[start + m];
        } else {
          // Low-order Lagrange on the whole short piece.
          const double local = (s - p0 * step) / step;
          for (std::size_t m = 0; m < nodes; ++m) {
            double l = 1.0;
            for (std::size_t q = 0; q < nodes; ++q)
              if (q != m) l *= (local - double(q)) / (double(m) - double(q));
            value += l * samples[p0 + m];
          }
        }
        total += (0.5 * step * rule.weights[g]) * value * weight(s);
      }
    }
  }
  return total;
}

/// Cubic Lagrange interpolation of uniform samples (origin x0, spacing step)
/// at an arbitrary point inside the sampled range; zero outside.
template <class Scalar>
Scalar interpolate_cubic(std::span<const Scalar> samples, double x0, double step, double x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(samples.size());
  if (n == 0) return Scalar{0};
  const double pos = (x - x0) / step;
  if (pos < -1e-9 || pos > double(n - 1) + 1e-9) return Scalar{0};
  if (n == 1) return samples[0];
  std::ptrdiff_t j = static_cast<std::ptrdiff_t>(std::floor(pos));
  if (j >= n - 1) j = n - 2;
  if (j < 0) j = 0;
  const double frac = pos - double(j);
  if (std::abs(frac) < 1e-12) return samples[j];
  if (n < 4) {
    return (1.0 - frac) * samples[j] + frac * samples[j + 1];
  }
  std::ptrdiff_t start = j - 1;
  if (start < 0) start = 0;
  if (start + 3 > n - 1) start = n - 4;
  const double t = pos - double(start);
  Scalar value{0};
  for (int m = 0; m < 4; ++m) {
    double l = 1.0;
    for (int q = 0; q < 4; ++q)
      if (q != m) l *= (t - q) / double(m - q);
    value += l * samples[start + m];
  }
  return value;
}

}  // namespace halfline
