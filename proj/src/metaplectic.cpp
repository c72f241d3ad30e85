#include "sce/metaplectic.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace sce {

namespace {

void check_even_square(const Mat& M, const char* who) {
  if (M.rows() != M.cols() || M.rows() % 2 != 0 || M.rows() == 0)
    throw DimensionError(std::string(who) + ": expected even square matrix");
}

}  // namespace

Mat rotation_matrix(double theta) {
  return Mat::Identity(2, 2) * std::cos(theta) + symplectic_J(1) * std::sin(theta);
}

Mat cayley_A(const Mat& M, double tol_sing) {
  check_even_square(M, "cayley_A");
  const int n = static_cast<int>(M.rows()) / 2;
  const Mat I = Mat::Identity(2 * n, 2 * n);
  const Mat J = symplectic_J(n);
  if (std::abs((I - M).determinant()) <= tol_sing)
    throw EigenvalueOneError("cayley_A: 1 is (numerically) an eigenvalue of M");

  const Mat inv = (M - I).inverse();
  const Mat A1 = 0.5 * J * inv * (I + M);
  const Mat A2 = 0.5 * J * (M + I) * inv;  // commuted form, must agree
  // Roundoff in the two products grows with the conditioning of M - 1.
  const double tol = 1e-12 * std::max(1.0, inv.cwiseAbs().maxCoeff());
  if ((A1 - A2).cwiseAbs().maxCoeff() > std::max(1e-10, tol))
    throw InternalInvariantViolated("cayley_A: the two A formulas disagree");
  if ((A1 - A1.transpose()).cwiseAbs().maxCoeff() > std::max(1e-10, tol))
    throw InternalInvariantViolated("cayley_A: A is not symmetric");
  return 0.5 * (A1 + A1.transpose());
}

GaussianSymbol mw_symbol(const Mat& M, double hbar, double tol_sing) {
  GaussianSymbol sym;
  sym.A = cayley_A(M, tol_sing);
  const Mat I = Mat::Identity(M.rows(), M.cols());
  sym.prefactor_modulus = 1.0 / std::sqrt(std::abs((I - M).determinant()));
  sym.hbar = hbar;
  return sym;
}

MWMatrices mw_matrices(const Mat& F) {
  check_even_square(F, "mw_matrices");
  const int n = static_cast<int>(F.rows()) / 2;
  const Complex i(0.0, 1.0);
  const CMat I = CMat::Identity(2 * n, 2 * n);
  const CMat J = symplectic_J(n).cast<Complex>();
  const CMat Fc = F.cast<Complex>();

  MWMatrices mw;
  mw.N = -0.5 * i * J * ((I - i * J) * Fc + I + i * J);
  const double detN = std::abs(mw.N.determinant());
  if (detN < 1e-12)
    throw InternalInvariantViolated("mw_matrices: |det N| vanished (contradicts Lemma on N)");
  mw.ct = 1.0 / std::sqrt(detN);
  mw.B = (Fc - I) * mw.N.inverse();
  // (1 - 2iA)^{-1} = B/2, so K needs no A route.
  mw.K = -(I + i * J) * (0.5 * mw.B) * (I - i * J);

  // When A exists (comfortably away from eigenvalue 1, so the inverse
  // is well conditioned), cross-check both appendix identities.
  if (std::abs((Mat::Identity(2 * n, 2 * n) - F).determinant()) > 1e-6) {
    const Mat A = cayley_A(F);
    const CMat inv = (Fc - I).inverse();
    // Roundoff in the inverses scales with their magnitude.
    const double tol =
        std::max(1e-9, 1e-12 * (1.0 + inv.cwiseAbs().maxCoeff()) *
                           (1.0 + A.cwiseAbs().maxCoeff()));
    const CMat half_minus_iA = 0.5 * I - i * A.cast<Complex>();
    if ((half_minus_iA - mw.N * inv).cwiseAbs().maxCoeff() > tol)
      throw InternalInvariantViolated("mw_matrices: (1/2 - iA) != N(F-1)^{-1}");
    const CMat bracket = I - (I + i * J) * (I - 2.0 * i * A.cast<Complex>()).inverse() * (I - i * J);
    if ((I + mw.K - bracket).cwiseAbs().maxCoeff() > tol)
      throw InternalInvariantViolated("mw_matrices: 1 + K bracket identity failed");
  }
  return mw;
}

bool is_unitary_symplectic(const Mat& F, double tol) {
  const Mat I = Mat::Identity(F.rows(), F.cols());
  return (F.transpose() * F - I).cwiseAbs().maxCoeff() <= tol;
}

SqueezeRotation squeeze_rotation_decompose(const Mat& F) {
  check_even_square(F, "squeeze_rotation_decompose");
  const int n = static_cast<int>(F.rows()) / 2;

  // Polar part: P = sqrt(F F^T) is symmetric positive symplectic,
  // O = P^{-1} F orthogonal symplectic.
  Eigen::SelfAdjointEigenSolver<Mat> es(F * F.transpose());
  const Vec lam = es.eigenvalues();
  const Mat V = es.eigenvectors();
  const Mat L = V * lam.array().log().matrix().asDiagonal() * V.transpose() * 0.5;
  const Mat P = (V * lam.array().sqrt().matrix().asDiagonal() * V.transpose());
  const Mat O = P.inverse() * F;

  // L = [[X, Y], [Y, -X]] with X, Y symmetric; E = X + iY.
  const Mat X = L.topLeftCorner(n, n);
  const Mat Y = L.topRightCorner(n, n);
  SqueezeRotation sr;
  sr.E = X.cast<Complex>() + Complex(0, 1) * Y.cast<Complex>();

  // O = [[Re U, Im U], [-Im U, Re U]] with U unitary; Gamma = -i log U.
  const CMat U = O.topLeftCorner(n, n).cast<Complex>() +
                 Complex(0, 1) * O.topRightCorner(n, n).cast<Complex>();
  Eigen::ComplexEigenSolver<CMat> ces(U);
  CVec phases(n);
  for (int k = 0; k < n; ++k) phases(k) = std::arg(ces.eigenvalues()(k));
  const CMat W = ces.eigenvectors();
  CMat Gamma = W * phases.asDiagonal() * W.inverse();
  sr.Gamma = 0.5 * (Gamma + Gamma.adjoint());
  return sr;
}

Mat squeeze_rotation_reconstruct(const SqueezeRotation& sr) {
  const int n = static_cast<int>(sr.E.rows());
  Mat L(2 * n, 2 * n);
  L.topLeftCorner(n, n) = sr.E.real();
  L.topRightCorner(n, n) = sr.E.imag();
  L.bottomLeftCorner(n, n) = sr.E.imag();
  L.bottomRightCorner(n, n) = -sr.E.real();
  const Mat P = L.exp();

  const CMat U = (Complex(0, 1) * sr.Gamma).exp();
  Mat O(2 * n, 2 * n);
  O.topLeftCorner(n, n) = U.real();
  O.topRightCorner(n, n) = U.imag();
  O.bottomLeftCorner(n, n) = -U.imag();
  O.bottomRightCorner(n, n) = U.real();
  return P * O;
}

}  // namespace sce
