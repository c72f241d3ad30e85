#pragma once

// Mehlig-Wilkinson apparatus: the Cayley-type matrix A, the covariant
// symbol modulus |det(1-M)|^{-1/2}, the matrices N, K, B with the
// prefactor c_t = |det N|^{-1/2}, and the squeeze x rotation polar
// decomposition of a symplectic matrix.  The metaplectic phase factor
// is deliberately not computed; all consumers work with moduli.

#include "sce/phase_space.hpp"

namespace sce {

struct EigenvalueOneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InternalInvariantViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Covariant-symbol data of the metaplectic operator for M:
/// |Omega(z)| = prefactor_modulus for every z (A real symmetric).
struct GaussianSymbol {
  double prefactor_modulus = 0.0;  // |det(1-M)|^{-1/2}
  Mat A;                           // real symmetric 2n x 2n
  double hbar = 1.0;
};

struct MWMatrices {
  CMat N;          // -(iJ/2)((1-iJ)F + 1 + iJ); always defined
  CMat K;          // (-J+i)(1-2iA)^{-1}(J+i)
  CMat B;          // (F-1) N^{-1}
  double ct = 1.0; // |det N|^{-1/2} in (0, 1]
};

/// Squeeze and rotation generators of the polar decomposition
/// F = exp(L(E)) * O(Gamma), with L the symmetric Hamiltonian generator
/// built from E and O the orthogonal symplectic rotation generated by
/// the Hermitian n x n matrix Gamma.  For n = 1 both reduce to scalars
/// (squeeze parameter r >= 0 and rotation angle).
struct SqueezeRotation {
  CMat E;      // complex symmetric n x n
  CMat Gamma;  // Hermitian n x n
};

/// A = (J/2)(M-1)^{-1}(1+M); asserts agreement with the commuted form
/// (1/2) J (M+1)(M-1)^{-1} and symmetry.  Throws EigenvalueOneError when
/// |det(1-M)| < tol_sing.
Mat cayley_A(const Mat& M, double tol_sing = 1e-8);

GaussianSymbol mw_symbol(const Mat& M, double hbar, double tol_sing = 1e-8);

MWMatrices mw_matrices(const Mat& F);

/// True iff F is orthogonal (hence unitary as an element of Sp(2n)).
bool is_unitary_symplectic(const Mat& F, double tol = 1e-8);

SqueezeRotation squeeze_rotation_decompose(const Mat& F);

/// Rebuild F from its squeeze/rotation generators (inverse of the
/// decomposition; used by tests and phase diagnostics).
Mat squeeze_rotation_reconstruct(const SqueezeRotation& sr);

/// Rotation matrix 1 cos(theta) + J sin(theta) for n = 1.
Mat rotation_matrix(double theta);

}  // namespace sce
