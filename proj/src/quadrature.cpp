#include "halfline/quadrature.hpp"

#include <stdexcept>

namespace halfline {

const GaussRule& gauss_legendre(int n) {
  static const GaussRule g2{2, {-0.5773502691896257645, 0.5773502691896257645}, {1.0, 1.0}};
  static const GaussRule g4{4,
                            {-0.8611363115940525752, -0.3399810435848562648, 0.3399810435848562648,
                             0.8611363115940525752},
                            {0.3478548451374538574, 0.6521451548625461426, 0.6521451548625461426,
                             0.3478548451374538574}};
  static const GaussRule g6{6,
                            {-0.9324695142031520278, -0.6612093864662645137, -0.2386191860831969086,
                             0.2386191860831969086, 0.6612093864662645137, 0.9324695142031520278},
                            {0.1713244923791703450, 0.3607615730481386076, 0.4679139345726910474,
                             0.4679139345726910474, 0.3607615730481386076, 0.1713244923791703450}};
  static const GaussRule g8{8,
                            {-0.9602898564975362317, -0.7966664774136267396, -0.5255324099163289858,
                             -0.1834346424956498049, 0.1834346424956498049, 0.5255324099163289858,
                             0.7966664774136267396, 0.9602898564975362317},
                            {0.1012285362903762591, 0.2223810344533744706, 0.3137066458778872873,
                             0.3626837833783619830, 0.3626837833783619830, 0.3137066458778872873,
                             0.2223810344533744706, 0.1012285362903762591}};
  switch (n) {
    case 2: return g2;
    case 4: return g4;
    case 6: return g6;
    case 8: return g8;
    default: throw std::invalid_argument("gauss_legendre: unsupported rule size");
  }
}

namespace detail {

const std::array<std::array<std::array<double, 4>, 8>, 3>& cubic_basis_table(int gauss_size) {
  static const auto build = [](int size) {
    std::array<std::array<std::array<double, 4>, 8>, 3> table{};
    const GaussRule& rule = gauss_legendre(size);
    for (int offset = 0; offset < 3; ++offset)
      for (int g = 0; g < rule.size; ++g) {
        const double t = offset + 0.5 * (rule.nodes[g] + 1.0);
        for (int m = 0; m < 4; ++m) {
          double l = 1.0;
          for (int q = 0; q < 4; ++q)
            if (q != m) l *= (t - q) / double(m - q);
          table[offset][g][m] = l;
        }
      }
    return table;
  };
  static const auto t2 = build(2), t4 = build(4), t6 = build(6), t8 = build(8);
  switch (gauss_size) {
    case 2: return t2;
    case 4: return t4;
    case 6: return t6;
    case 8: return t8;
    default: throw std::invalid_argument("cubic_basis_table: unsupported rule size");
  }
}

}  // namespace detail
}  // namespace halfline
