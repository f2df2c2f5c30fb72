#pragma once

#include <algorithm>

#include "halfline/quadrature.hpp"

namespace halfline {

namespace detail {
template <bool Abs, class G>
double integrate_potential_pieces(const Potential& v, double a, double b, G&& g) {
  if (v.is_zero()) return 0.0;
  a = std::max(a, 0.0);
  b = std::min(b, v.support());
  if (b <= a) return 0.0;
  std::vector<double> cuts{a};
  for (double p : Abs ? v.abs_breakpoints() : v.breakpoints())
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    total += romberg(
        [&](double y) {
          const int side = y <= lo ? 1 : (y >= hi ? -1 : 0);
          const double value = v.value(y, side);
          return g(y) * (Abs ? std::abs(value) : value);
        },
        lo, hi);
  }
  return total;
}
}  // namespace detail

template <class G>
double integrate_abs_weighted(const Potential& v, double a, double b, G&& g) {
  return detail::integrate_potential_pieces<true>(v, a, b, std::forward<G>(g));
}

}  // namespace halfline
