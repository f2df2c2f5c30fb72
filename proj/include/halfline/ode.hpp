#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "halfline/errors.hpp"
#include "halfline/quadrature.hpp"

namespace halfline {

struct OdeTolerance {
  double rtol = 1e-10;
  double atol = 1e-14;
};

/// Adaptive Dormand-Prince 5(4) for the linear system y0' = y1, y1' = c(x) y0.
/// Integrates from x0 to x1 (either direction); `step` carries the step-size
/// guess in and the last accepted size out. Returns the number of accepted steps.
template <class Coefficient>
long dopri5_linear(Coefficient&& c, double x0, double x1, Eigen::Vector2cd& y, double& step, OdeTolerance tol = {}) {
  static constexpr double a21 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40, a41 = 44.0 / 45, a42 = -56.0 / 15,
                          a43 = 32.0 / 9, a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729, a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656, b1 = 35.0 / 384, b3 = 500.0 / 1113,
                          b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84, e1 = 71.0 / 57600,
                          e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                          e7 = -1.0 / 40;
  static constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9;

  const double span = x1 - x0;
  if (span == 0.0) return 0;
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = std::min(std::abs(step), std::abs(span)) * dir;
  if (h == 0.0) h = 1e-3 * dir;
  auto rhs = [&](double x, const Eigen::Vector2cd& s) {
    return Eigen::Vector2cd(s(1), c(x) * s(0));
  };

  double x = x0;
  long accepted = 0;
  Eigen::Vector2cd k1 = rhs(x, y);
  while ((x1 - x) * dir > 0) {
    bool last = false;
    if ((x + h - x1) * dir >= 0) {
      h = x1 - x;
      last = true;
    }
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x)))
      throw StiffnessError("jost", "step size underflow in Dormand-Prince integration");
    const Eigen::Vector2cd k2 = rhs(x + c2 * h, y + h * a21 * k1);
    const Eigen::Vector2cd k3 = rhs(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Eigen::Vector2cd k4 = rhs(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::Vector2cd k5 = rhs(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double xe = last ? x1 : x + h;
    const Eigen::Vector2cd k6 = rhs(xe, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::Vector2cd ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::Vector2cd k7 = rhs(xe, ynew);
    const Eigen::Vector2cd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double norm = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double scale = tol.atol + tol.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      norm = std::max(norm, std::abs(err(i)) / scale);
    }
    if (norm <= 1.0) {
      x = xe;
      y = ynew;
      k1 = k7;
      ++accepted;
      const double grow = norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(norm, -0.2));
      if (!last) step = h;
      h *= grow;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
    }
  }
  step = std::abs(step);
  return accepted;
}

}  // namespace halfline
