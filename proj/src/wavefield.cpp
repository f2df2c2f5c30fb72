#include "halfline/wavefield.hpp"

#include <cmath>

#include "halfline/errors.hpp"

namespace halfline {

bool WaveField::uniform(double rel_tol) const {
  if (x.size() < 3) return true;
  const double h = x(1) - x(0);
  for (Eigen::Index i = 2; i < x.size(); ++i)
    if (std::abs((x(i) - x(i - 1)) - h) > rel_tol * std::abs(h) + 1e-14) return false;
  return true;
}

Eigen::VectorXd uniform_grid(double x0, double x1, double step) {
  if (!(step > 0) || x1 < x0) throw DomainError("wavefield", "invalid uniform grid");
  const long n = static_cast<long>(std::floor((x1 - x0) / step + 1e-9));
  Eigen::VectorXd x(n + 1);
  for (long i = 0; i <= n; ++i) x(i) = x0 + i * step;
  return x;
}

namespace {
void require_same_grid(const WaveField& a, const WaveField& b) {
  if (a.x.size() != b.x.size() || (a.x - b.x).cwiseAbs().maxCoeff() > 1e-9)
    throw DomainError("wavefield", "fields live on different grids; resample first");
}
}  // namespace

Complex inner_product(const WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  return trapezoid(a.x, a.values.cwiseProduct(b.values.conjugate()));
}

double l2_norm(const WaveField& a) {
  return std::sqrt(trapezoid(a.x, a.values.cwiseAbs2()));
}

double relative_l2_error(const WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  WaveField diff{a.x, a.values - b.values, a.time};
  const double ref = l2_norm(b);
  return ref > 0 ? l2_norm(diff) / ref : l2_norm(diff);
}

WaveField resample(const WaveField& field, const Eigen::VectorXd& x) {
  if (!field.uniform()) throw DomainError("wavefield", "resampling requires a uniform source grid");
  WaveField out{x, Eigen::VectorXcd::Zero(x.size()), field.time};
  if (field.size() == 0) return out;
  const std::span<const Complex> samples(field.values.data(), field.values.size());
  const double h = field.spacing();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out.values(i) = field.size() == 1 ? field.values(0) : interpolate_cubic<Complex>(samples, field.x(0), h, x(i));
  return out;
}

WaveField make_profile(const std::string& name, const std::vector<double>& params, const Eigen::VectorXd& x) {
  auto need = [&](std::size_t n) {
    if (params.size() != n) throw DomainError("wavefield", "profile '" + name + "' expects " + std::to_string(n) + " parameters");
  };
  WaveField out{x, Eigen::VectorXcd::Zero(x.size()), 0.0};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    double value = 0.0;
    if (name == "gaussian") {
      need(2);
      const double z = (xi - params[0]) / params[1];
      value = std::exp(-0.5 * z * z);
    } else if (name == "xgauss") {
      need(1);
      value = xi * std::exp(-0.5 * xi * xi / (params[0] * params[0]));
    } else if (name == "bump") {
      need(2);
      const double r = (xi - params[0]) / params[1];
      value = std::abs(r) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
    } else if (name == "tent") {
      need(2);
      value = std::max(0.0, 1.0 - std::abs(xi - params[0]) / params[1]);
    } else {
      throw DomainError("wavefield", "unknown profile '" + name + "'");
    }
    out.values(i) = value;
  }
  return out;
}

}  // namespace halfline
