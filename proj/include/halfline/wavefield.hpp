#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "halfline/quadrature.hpp"

namespace halfline {

/// Complex samples u(x, t) on an increasing spatial grid at one time.
struct WaveField {
  Eigen::VectorXd x;
  Eigen::VectorXcd values;
  double time = 0.0;

  Eigen::Index size() const { return x.size(); }
  bool uniform(double rel_tol = 1e-9) const;
  double spacing() const { return x.size() > 1 ? x(1) - x(0) : 0.0; }
};

/// x0, x0 + step, ..., up to x1 (inclusive when x1 is on the lattice).
Eigen::VectorXd uniform_grid(double x0, double x1, double step);

/// (a, b) = int a conj(b) by the trapezoid rule on the shared grid.
Complex inner_product(const WaveField& a, const WaveField& b);
double l2_norm(const WaveField& a);
/// Relative L2 distance |a - b| / |b| on the shared grid.
double relative_l2_error(const WaveField& a, const WaveField& b);

/// Cubic resampling from a uniform source grid; zero outside the source range.
WaveField resample(const WaveField& field, const Eigen::VectorXd& x);

/// Named initial profiles:
///   gaussian(center, width):   exp(-(x-c)^2 / (2 w^2))
///   xgauss(width):             x exp(-x^2 / (2 w^2))
///   bump(center, radius):      exp(1 - 1 / (1 - r^2)), r = (x - c) / radius, |r| < 1
///   tent(center, half_width):  max(0, 1 - |x - c| / w)
WaveField make_profile(const std::string& name, const std::vector<double>& params, const Eigen::VectorXd& x);

}  // namespace halfline
