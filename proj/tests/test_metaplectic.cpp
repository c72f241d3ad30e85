#include <random>

#include "doctest.h"
#include "sce/metaplectic.hpp"

using namespace sce;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("cayley_A closed forms") {
  CHECK(cayley_A(-Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  Mat A = cayley_A(diag2(2.0, 0.5));
  CHECK(A(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(A(0, 1) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(A(1, 0) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(A(1, 1) == doctest::Approx(0.0).epsilon(1e-12));

  A = cayley_A(symplectic_J(1));  // rotation by pi/2
  CHECK((A - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  // General rotation: A = (1/2) cot(theta/2) identity.
  for (double th : {0.4, 1.1, 2.8}) {
    A = cayley_A(rotation_matrix(th));
    const double c = 0.5 / std::tan(th / 2.0);
    CHECK((A - c * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  }

  CHECK_THROWS_AS(cayley_A(Mat::Identity(2, 2)), EigenvalueOneError);
}

TEST_CASE("mw_symbol prefactors") {
  CHECK(mw_symbol(-Mat::Identity(2, 2), 1.0).prefactor_modulus ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mw_symbol(symplectic_J(1), 1.0).prefactor_modulus ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("mw_matrices special values") {
  const Mat J = symplectic_J(1);
  {
    const MWMatrices m = mw_matrices(Mat::Identity(2, 2));
    CHECK((m.N - Complex(0, -1) * J.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(m.N.determinant()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.ct == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.B.cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    const MWMatrices m = mw_matrices(-Mat::Identity(2, 2));
    CHECK((m.N + CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.ct == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.K.cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    const MWMatrices m = mw_matrices(diag2(2.0, 0.5));
    CHECK(std::abs(m.N.determinant()) > 1.0);
    CHECK(m.ct < 1.0);
  }
}

TEST_CASE("is_unitary_symplectic") {
  for (double th : {0.0, 0.3, 2.0})
    CHECK(is_unitary_symplectic(rotation_matrix(th), 1e-10));
  CHECK_FALSE(is_unitary_symplectic(diag2(2.0, 0.5), 1e-8));
  CHECK(is_unitary_symplectic(Mat::Identity(2, 2), 1e-12));
}

TEST_CASE("squeeze rotation decomposition") {
  {
    const double r = 0.7;
    const SqueezeRotation sr = squeeze_rotation_decompose(diag2(std::exp(r), std::exp(-r)));
    CHECK(std::abs(sr.E(0, 0).real() - r) < 1e-10);
    CHECK(std::abs(sr.E(0, 0).imag()) < 1e-10);
    CHECK(std::abs(sr.Gamma(0, 0)) < 1e-10);
  }
  {
    const SqueezeRotation sr = squeeze_rotation_decompose(rotation_matrix(0.9));
    CHECK(sr.E.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(sr.Gamma(0, 0).real() - 0.9) < 1e-10);
  }
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const int n = 1 + static_cast<int>(s % 2);
    const Mat F = random_symplectic(n, s, 0.7);
    const SqueezeRotation sr = squeeze_rotation_decompose(F);
    CHECK((squeeze_rotation_reconstruct(sr) - F).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("B = (1/2 - iA)^{-1} spectrum lies on the unit circle around 1") {
  // Spectrum of 1/2 - iA sits on the vertical line Re w = 1/2 (A real
  // symmetric), so the eigenvalues of its inverse B satisfy |z - 1| = 1
  // with 0 excluded -- the circle property behind the decreasing
  // exponential factor of the return formula.
  for (std::uint64_t s = 1; s <= 100; ++s) {
    Mat F = random_symplectic(1, s, 0.6);
    if (std::abs((Mat::Identity(2, 2) - F).determinant()) < 1e-6) continue;
    const Mat A = cayley_A(F);
    const CMat W = (0.5 * CMat::Identity(2, 2) -
                    Complex(0, 1) * A.cast<Complex>())
                       .inverse();
    const Eigen::ComplexEigenSolver<CMat> es(W);
    for (int i = 0; i < 2; ++i) {
      const Complex ev = es.eigenvalues()(i);
      CHECK(std::abs(std::abs(ev - 1.0) - 1.0) < 1e-8);
      CHECK(std::abs(ev) > 1e-8);
    }
  }
}

TEST_CASE("rotation matrices have |det N| = 1") {
  for (double th = 0.05; th < 6.28; th += 0.05) {
    const MWMatrices m = mw_matrices(rotation_matrix(th));
    CHECK(std::abs(std::abs(m.N.determinant()) - 1.0) < 1e-10);
  }
}

TEST_CASE("ct equals 1 exactly on unitary symplectic matrices") {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const Mat F = random_symplectic(1, s, 0.8);
    const double ct = mw_matrices(F).ct;
    const bool unitary = is_unitary_symplectic(F, 1e-8);
    if (unitary) CHECK(std::abs(ct - 1.0) < 1e-8);
    if (std::abs(ct - 1.0) < 1e-10) CHECK(is_unitary_symplectic(F, 1e-7));
  }
}

TEST_CASE("A-forms commute") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Mat M = random_symplectic(1, s + 5000, 0.6);
    if (std::abs((Mat::Identity(2, 2) - M).determinant()) < 1e-4) continue;
    const Mat inv = (M - Mat::Identity(2, 2)).inverse();
    const Mat lhs = inv * (Mat::Identity(2, 2) + M);
    const Mat rhs = (Mat::Identity(2, 2) + M) * inv;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}
