#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace halfline {

enum class PotentialKind { zero, square_well, exponential, gaussian, table };

/// Real potential on the half-line, identically zero beyond its support
/// bound L_V. Closed-form kinds are evaluated exactly; the table kind is
/// piecewise linear between its nodes.
class Potential {
 public:
  static constexpr double default_dx = 1.0 / 64.0;

  /// V == 0. The support bound is 0.
  static Potential zero();
  /// V = -depth on [0, width].
  static Potential square_well(double depth, double width);
  /// V = amplitude * exp(-rate x) on [0, support].
  static Potential exponential(double amplitude, double rate, double support);
  /// V = amplitude * exp(-(x-center)^2 / (2 width^2)) on [0, support].
  static Potential gaussian(double amplitude, double center, double width, double support);
  /// Piecewise-linear table; x must start at 0 and increase strictly.
  static Potential table(std::vector<double> x, std::vector<double> v, double dx = default_dx);

  PotentialKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double support() const { return support_; }
  double dx() const { return dx_; }
  Potential with_dx(double dx) const;
  bool is_zero() const { return kind_ == PotentialKind::zero; }

  /// side < 0: left limit, side > 0: right limit, side == 0: mean of both
  /// limits (the value a trapezoid rule wants at a jump node).
  double value(double x, int side = 0) const;
  double operator()(double x) const { return value(x, 0); }

  /// Points in (0, L_V] where V or V' is discontinuous.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// Breakpoints plus the zeros of V inside the support: |V| is smooth between these.
  std::vector<double> abs_breakpoints() const;

  double sup_abs() const;
  /// Closed-form kinds: parameter list as stored (for serialization).
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& table_x() const { return tx_; }
  const std::vector<double>& table_v() const { return tv_; }

 private:
  Potential() = default;
  double raw(double x) const;  // smooth formula on [0, L_V], no truncation logic

  PotentialKind kind_ = PotentialKind::zero;
  std::string name_;
  double support_ = 0.0;
  double dx_ = default_dx;
  std::vector<double> params_;
  std::vector<double> tx_, tv_;
  std::vector<double> breakpoints_;
};

/// Integral of g(y) |V(y)| over [a, b], split at the smooth pieces of |V|.
template <class G>
double integrate_abs_weighted(const Potential& v, double a, double b, G&& g);

/// sigma(x) = int_x^inf |V|.
double sigma(const Potential& v, double x);
/// sigma_1(x) = int_x^inf sigma = int_x^inf (y - x) |V(y)| dy.
double sigma1(const Potential& v, double x);
/// int_0^inf x |V(x)| dx; throws DataError on non-finite samples.
double first_moment(const Potential& v);
/// int_x^inf V (signed).
double tail_integral(const Potential& v, double x);
/// sup over window starts of int_s^{s+1} |V|.
double local_l1_sup(const Potential& v);

/// sigma and sigma_1 tabulated on [0, L_V] with spacing `step`.
class MomentProfile {
 public:
  MomentProfile(const Potential& v, double step);

  double step() const { return step_; }
  double first_moment() const { return first_moment_; }
  const Eigen::VectorXd& sigma_table() const { return sigma_; }
  const Eigen::VectorXd& sigma1_table() const { return sigma1_; }
  /// Exact node values when x is on the grid, direct quadrature otherwise.
  double sigma(double x) const;
  double sigma1(double x) const;

 private:
  Potential potential_;
  double step_;
  double first_moment_;
  Eigen::VectorXd sigma_, sigma1_;
};

}  // namespace halfline

#include "halfline/potential_impl.hpp"
