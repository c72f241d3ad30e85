#pragma once

// Phase-space linear algebra: the symplectic form, Sp(2n) membership
// checks, seeded random symplectic matrices and the Weyl-Heisenberg
// composition law.  Points z = (q_1..q_n, p_1..p_n) are stored as plain
// Eigen vectors; hbar is always an explicit argument, never baked into
// stored data.

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace sce {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Standard symplectic form matrix J = [[0, I], [-I, 0]] for n degrees
/// of freedom (2n x 2n).
Mat symplectic_J(int n);

/// sigma(z, w) = z . J w.  Antisymmetric bilinear form.
double symplectic_form(const Vec& z, const Vec& w);

/// True iff ||M^T J M - J||_max <= tol.  Throws on odd dimension.
bool is_symplectic(const Mat& M, double tol = 1e-9);

/// exp(J S) for a seeded random symmetric S with entries in
/// [-spread, spread].  Exactly symplectic up to the matrix-exponential
/// truncation; deterministic per seed.
Mat random_symplectic(int n, std::uint64_t seed, double spread = 1.0);

/// Result of composing two Weyl-Heisenberg translations:
/// T(z) T(w) = exp(i phase) T(z + w).
struct WeylPhase {
  double phase = 0.0;  // radians
  Vec displacement;
};

/// phase = -sigma(z, w) / (2 hbar), displacement = z + w.
WeylPhase weyl_compose(const Vec& z, const Vec& w, double hbar);

}  // namespace sce
