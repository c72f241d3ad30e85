#include "sce/special_functions.hpp"

#include <stdexcept>

namespace sce {

std::vector<double> laguerre_sequence(int n, double a, double x) {
  if (n < 0) throw std::invalid_argument("laguerre: n must be >= 0");
  std::vector<double> L(static_cast<std::size_t>(n) + 1);
  L[0] = 1.0;
  if (n == 0) return L;
  L[1] = 1.0 + a - x;
  for (int k = 1; k < n; ++k) {
    // (k+1) L_{k+1} = (2k+1+a-x) L_k - (k+a) L_{k-1}
    L[static_cast<std::size_t>(k) + 1] =
        ((2.0 * k + 1.0 + a - x) * L[static_cast<std::size_t>(k)] -
         (k + a) * L[static_cast<std::size_t>(k) - 1]) /
        (k + 1.0);
  }
  return L;
}

double laguerre(int n, double a, double x) {
  return laguerre_sequence(n, a, x).back();
}

}  // namespace sce
