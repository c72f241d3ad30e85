#include "sce/phase_space.hpp"

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

namespace sce {

Mat symplectic_J(int n) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Mat::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return J;
}

double symplectic_form(const Vec& z, const Vec& w) {
  if (z.size() != w.size() || z.size() % 2 != 0 || z.size() == 0)
    throw DimensionError("symplectic_form: dimension mismatch or odd size");
  const int n = static_cast<int>(z.size()) / 2;
  // z.Jw = q_z.p_w - p_z.q_w, avoiding the explicit J product.
  return z.head(n).dot(w.tail(n)) - z.tail(n).dot(w.head(n));
}

bool is_symplectic(const Mat& M, double tol) {
  if (M.rows() != M.cols() || M.rows() % 2 != 0 || M.rows() == 0)
    throw DimensionError("is_symplectic: matrix must be square with even dimension");
  const int n = static_cast<int>(M.rows()) / 2;
  const Mat J = symplectic_J(n);
  return (M.transpose() * J * M - J).cwiseAbs().maxCoeff() <= tol;
}

Mat random_symplectic(int n, std::uint64_t seed, double spread) {
  if (n < 1) throw DimensionError("random_symplectic: n must be >= 1");
  if (!(spread > 0)) throw std::invalid_argument("random_symplectic: spread must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-spread, spread);
  Mat S(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = i; j < 2 * n; ++j) {
      S(i, j) = dist(rng);
      S(j, i) = S(i, j);
    }
  // exp(JS) lies in Sp(2n) exactly for symmetric S.
  return (symplectic_J(n) * S).exp();
}

WeylPhase weyl_compose(const Vec& z, const Vec& w, double hbar) {
  if (!(hbar > 0)) throw std::invalid_argument("weyl_compose: hbar must be > 0");
  WeylPhase out;
  out.phase = -symplectic_form(z, w) / (2.0 * hbar);
  out.displacement = z + w;
  return out;
}

}  // namespace sce
