#include "halfline/potential.hpp"

#include <cmath>
#include <limits>

#include "halfline/errors.hpp"

namespace halfline {

namespace {
void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw DataError("potential", std::string("non-finite ") + what);
}
}  // namespace

Potential Potential::zero() {
  Potential v;
  v.kind_ = PotentialKind::zero;
  v.name_ = "zero";
  return v;
}

Potential Potential::square_well(double depth, double width) {
  require_finite(depth, "well depth");
  require_finite(width, "well width");
  if (width <= 0) throw DataError("potential", "square well width must be positive");
  Potential v;
  v.kind_ = PotentialKind::square_well;
  v.name_ = "square_well";
  v.support_ = width;
  v.params_ = {depth, width};
  v.breakpoints_ = {width};
  return v;
}

Potential Potential::exponential(double amplitude, double rate, double support) {
  require_finite(amplitude, "amplitude");
  require_finite(rate, "rate");
  if (support <= 0) throw DataError("potential", "support bound must be positive");
  Potential v;
  v.kind_ = PotentialKind::exponential;
  v.name_ = "exp";
  v.support_ = support;
  v.params_ = {amplitude, rate};
  v.breakpoints_ = {support};
  return v;
}

Potential Potential::gaussian(double amplitude, double center, double width, double support) {
  require_finite(amplitude, "amplitude");
  require_finite(center, "center");
  if (width <= 0 || support <= 0) throw DataError("potential", "gaussian width and support must be positive");
  Potential v;
  v.kind_ = PotentialKind::gaussian;
  v.name_ = "gaussian";
  v.support_ = support;
  v.params_ = {amplitude, center, width};
  v.breakpoints_ = {support};
  return v;
}

Potential Potential::table(std::vector<double> x, std::vector<double> values, double dx) {
  if (x.size() != values.size() || x.size() < 2)
    throw DataError("potential", "table needs equal-length x[] and v[] with at least two nodes");
  if (x.front() != 0.0) throw DataError("potential", "table must start at x = 0");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require_finite(x[i], "table abscissa");
    require_finite(values[i], "table value");
    if (i > 0 && !(x[i] > x[i - 1])) throw DataError("potential", "table abscissae must increase");
  }
  Potential v;
  v.kind_ = PotentialKind::table;
  v.name_ = "table";
  v.support_ = x.back();
  v.dx_ = dx;
  v.breakpoints_.assign(x.begin() + 1, x.end());
  v.tx_ = std::move(x);
  v.tv_ = std::move(values);
  return v;
}

Potential Potential::with_dx(double dx) const {
  if (!(dx > 0)) throw DataError("potential", "grid spacing must be positive");
  Potential copy = *this;
  copy.dx_ = dx;
  return copy;
}

double Potential::raw(double x) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::square_well: return -params_[0];
    case PotentialKind::exponential: return params_[0] * std::exp(-params_[1] * x);
    case PotentialKind::gaussian: {
      const double z = (x - params_[1]) / params_[2];
      return params_[0] * std::exp(-0.5 * z * z);
    }
    case PotentialKind::table: {
      auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
      if (it == tx_.begin()) return tv_.front();
      if (it == tx_.end()) return tv_.back();
      const std::size_t i = static_cast<std::size_t>(it - tx_.begin()) - 1;
      const double t = (x - tx_[i]) / (tx_[i + 1] - tx_[i]);
      return (1.0 - t) * tv_[i] + t * tv_[i + 1];
    }
  }
  return 0.0;
}

double Potential::value(double x, int side) const {
  if (kind_ == PotentialKind::zero || x < 0.0 || x > support_) return 0.0;
  if (x == support_) {
    const double inside = raw(x);
    if (side < 0) return inside;
    if (side > 0) return 0.0;
    return 0.5 * inside;
  }
  if (kind_ == PotentialKind::square_well) return raw(x);
  if (x == 0.0 && side < 0) return 0.0;
  return raw(x);
}

std::vector<double> Potential::abs_breakpoints() const {
  std::vector<double> points = breakpoints_;
  if (kind_ == PotentialKind::table) {
    for (std::size_t i = 0; i + 1 < tx_.size(); ++i)
      if ((tv_[i] < 0 && tv_[i + 1] > 0) || (tv_[i] > 0 && tv_[i + 1] < 0))
        points.push_back(tx_[i] + (tx_[i + 1] - tx_[i]) * tv_[i] / (tv_[i] - tv_[i + 1]));
    std::sort(points.begin(), points.end());
  }
  return points;
}

double Potential::sup_abs() const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::square_well: return std::abs(params_[0]);
    case PotentialKind::exponential:
      return std::abs(params_[0]) * std::max(1.0, std::exp(-params_[1] * support_));
    case PotentialKind::gaussian: return std::abs(params_[0]);
    case PotentialKind::table: {
      double m = 0.0;
      for (double v : tv_) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

double sigma(const Potential& v, double x) {
  if (x < 0) throw DomainError("potential", "sigma requires x >= 0");
  if (x >= v.support()) return 0.0;
  return integrate_abs_weighted(v, x, v.support(), [](double) { return 1.0; });
}

double sigma1(const Potential& v, double x) {
  if (x < 0) throw DomainError("potential", "sigma1 requires x >= 0");
  if (x >= v.support()) return 0.0;
  return integrate_abs_weighted(v, x, v.support(), [x](double y) { return y - x; });
}

double first_moment(const Potential& v) {
  const double m = integrate_abs_weighted(v, 0.0, v.support(), [](double y) { return y; });
  if (!std::isfinite(m)) throw DataError("potential", "first moment is not finite");
  return m;
}

double tail_integral(const Potential& v, double x) {
  if (x >= v.support()) return 0.0;
  return detail::integrate_potential_pieces<false>(v, x, v.support(), [](double) { return 1.0; });
}

double local_l1_sup(const Potential& v) {
  if (v.is_zero()) return 0.0;
  const double step = v.dx();
  // mass(s) = int_s^{s+1} |V| = sigma(max(s,0)) - sigma(s+1)
  auto mass = [&](double s) { return sigma(v, std::max(s, 0.0)) - sigma(v, std::max(s + 1.0, 0.0)); };
  const long first = -static_cast<long>(std::ceil(1.0 / step));
  const long last = static_cast<long>(std::ceil(v.support() / step));
  long best = first;
  double best_mass = -1.0;
  for (long j = first; j <= last; ++j) {
    const double m = mass(j * step);
    if (m > best_mass) {
      best_mass = m;
      best = j;
    }
  }
  // golden-section refinement around the best grid start
  double lo = (best - 1) * step, hi = (best + 1) * step;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
  double mc = mass(c), md = mass(d);
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    if (mc > md) {
      hi = d;
      d = c;
      md = mc;
      c = hi - ratio * (hi - lo);
      mc = mass(c);
    } else {
      lo = c;
      c = d;
      mc = md;
      d = lo + ratio * (hi - lo);
      md = mass(d);
    }
  }
  return std::max({best_mass, mc, md});
}

MomentProfile::MomentProfile(const Potential& v, double step) : potential_(v), step_(step) {
  if (!(step > 0)) throw DomainError("potential", "moment profile step must be positive");
  const long n = static_cast<long>(std::ceil(v.support() / step - 1e-9));
  sigma_.resize(n + 1);
  sigma1_.resize(n + 1);
  for (long i = 0; i <= n; ++i) {
    sigma_(i) = halfline::sigma(v, i * step);
    sigma1_(i) = halfline::sigma1(v, i * step);
  }
  first_moment_ = halfline::first_moment(v);
}

double MomentProfile::sigma(double x) const {
  const double pos = x / step_;
  const long i = std::lround(pos);
  if (std::abs(pos - i) < 1e-9 && i >= 0) return i < sigma_.size() ? sigma_(i) : 0.0;
  return halfline::sigma(potential_, x);
}

double MomentProfile::sigma1(double x) const {
  const double pos = x / step_;
  const long i = std::lround(pos);
  if (std::abs(pos - i) < 1e-9 && i >= 0) return i < sigma1_.size() ? sigma1_(i) : 0.0;
  return halfline::sigma1(potential_, x);
}

}  // namespace halfline
