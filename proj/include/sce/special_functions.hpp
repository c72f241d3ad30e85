#pragma once

// Generalized Laguerre polynomials by the stable three-term recurrence.

#include <vector>

namespace sce {

/// L_n^a(x).
double laguerre(int n, double a, double x);

/// L_k^a(x) for k = 0..n.
std::vector<double> laguerre_sequence(int n, double a, double x);

}  // namespace sce
