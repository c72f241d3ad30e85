#include "sce/revivals.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "sce/special_functions.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sce {

ThawedGaussian propagate_coherent(const HamiltonianModel& H, const Vec& alpha,
                                  double t, double hbar, double dt) {
  if (!(hbar > 0)) throw std::invalid_argument("propagate_coherent: hbar must be > 0");
  ThawedGaussian tg;
  tg.origin = alpha;
  tg.hbar = hbar;
  if (t == 0.0) {
    tg.center = alpha;
    tg.stability = Mat::Identity(2 * H.dof, 2 * H.dof);
    tg.action = 0.0;
    return tg;
  }
  const Trajectory traj = integrate_full(H, alpha, t, dt);
  tg.center = traj.points.back();
  tg.stability = traj.stability.back();
  tg.action = traj.delta.back();
  return tg;
}

ReturnProbability return_probability_from(const ThawedGaussian& tg) {
  const Mat& F = tg.stability;
  const Mat I = Mat::Identity(F.rows(), F.cols());
  if (std::abs((I - F).determinant()) <= 1e-8)
    throw EigenvalueOneError("return_probability: F_t has 1 as eigenvalue");
  const MWMatrices mw = mw_matrices(F);
  const Vec z = tg.origin - tg.center;
  const CVec zc = z.cast<Complex>();
  const Complex quad = zc.dot((CMat::Identity(F.rows(), F.cols()) + mw.K) * zc);
  if (quad.real() < -1e-9 * (1.0 + z.squaredNorm()))
    throw InternalInvariantViolated("return_probability: Re(z.(1+K)z) < 0");
  ReturnProbability out;
  out.ct = mw.ct;
  out.R = mw.ct * std::exp(-quad.real() / (4.0 * tg.hbar));
  return out;
}

ReturnProbability return_probability(const HamiltonianModel& H, const Vec& alpha,
                                     double t, double hbar, double dt) {
  return return_probability_from(propagate_coherent(H, alpha, t, hbar, dt));
}

double quadratic_return_exact(const Mat& F, const Vec& alpha, double hbar) {
  const int n = static_cast<int>(F.rows()) / 2;
  const MWMatrices mw = mw_matrices(F);
  const Vec Ja = symplectic_J(n) * alpha;
  const CVec jac = Ja.cast<Complex>();
  const Complex quad = jac.dot(mw.B * jac);
  return mw.ct * std::exp(-quad.real() / (2.0 * hbar));
}

Complex rotation_overlap_exact(double G, const Vec& alpha, double hbar) {
  if (alpha.size() != 2)
    throw DimensionError("rotation_overlap_exact: n = 1 only");
  const double r2 = alpha.squaredNorm();
  const double s = std::sin(0.5 * G);
  return std::exp(Complex(-r2 * s * s / hbar,
                          -0.5 * G - 0.5 * r2 * std::sin(G) / hbar));
}

namespace {

Complex mathieu_radicand(const FloquetData& fd, double t) {
  Complex s(0, 0);
  for (int n = -fd.n_max; n <= fd.n_max; ++n)
    s += fd.coeff(n) * (0.5 / fd.C + 0.5 * (2.0 * n + fd.rho) / fd.D) *
         std::exp(Complex(0, n * fd.omega * t));
  return s;
}

}  // namespace

Complex mathieu_overlap(const FloquetData& fd, double t) {
  if (!fd.stable)
    throw std::invalid_argument("mathieu_overlap: unstable parameters");
  if (std::abs(fd.C) < 1e-12 || std::abs(fd.D) < 1e-12)
    throw std::invalid_argument("mathieu_overlap: degenerate C or D");
  // Continuity-tracked principal branch of S(t)^{-1/2} from t = 0.
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * fd.omega * 64 / M_PI)));
  Complex g_prev(1.0, 0.0);  // S(0) = 1 by construction
  for (int k = 1; k <= steps; ++k) {
    const double tk = t * k / steps;
    const Complex s = mathieu_radicand(fd, tk);
    if (std::abs(s) < 1e-10)
      throw BranchAmbiguityError("mathieu_overlap: radicand near zero");
    Complex g = 1.0 / std::sqrt(s);
    if (std::abs(-g - g_prev) < std::abs(g - g_prev)) g = -g;
    g_prev = g;
  }
  return std::exp(Complex(0, -fd.rho * fd.omega * t / 4.0)) * g_prev;
}

MathieuReference mathieu_reference_state(const FloquetData& fd, double hbar) {
  const Complex a = fd.omega * fd.D / (2.0 * fd.C);
  if (std::abs(a.imag()) > 1e-8 * std::abs(a))
    throw NonPositiveWidthError("mathieu_reference_state: width not real");
  if (a.real() == 0.0)
    throw NonPositiveWidthError("mathieu_reference_state: width a = 0");
  // The two Floquet branches (rho and 2 - rho) are complex conjugates of
  // each other and flip the sign of D/C; the normalizable reference
  // state belongs to the branch with positive width.
  return MathieuReference{std::abs(a.real()), hbar};
}

SingularEigenstate singular_eigenstate(int n, double g,
                                       const std::vector<double>& x_grid) {
  if (n < 0 || !(g > 0))
    throw std::invalid_argument("singular_eigenstate: need n >= 0, g > 0");
  SingularEigenstate st;
  st.a = 0.5 * std::sqrt(1.0 + 8.0 * g * g);
  st.energy = 2.0 * n + st.a + 1.0;
  const double log_norm =
      0.5 * (std::log(2.0) + std::lgamma(n + 1.0) - std::lgamma(st.a + n + 1.0));
  st.values.resize(x_grid.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    const double x = x_grid[j];
    if (!(x > 0)) throw std::invalid_argument("singular_eigenstate: grid must be on (0, x_max]");
    st.values[j] = std::exp(log_norm + (st.a + 0.5) * std::log(x) - 0.5 * x * x) *
                   laguerre(n, st.a, x * x);
  }
  return st;
}

std::vector<Complex> singular_time_state(int n, double g,
                                         const HillComplexSolution& hcs,
                                         std::size_t t_index,
                                         const std::vector<double>& x_grid) {
  if (t_index >= hcs.times.size())
    throw std::out_of_range("singular_time_state: bad time index");
  const double u = hcs.u[t_index];
  const double udot = hcs.udot[t_index];
  const double theta = hcs.theta[t_index];
  const double eu = std::exp(-u);
  std::vector<double> scaled(x_grid.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j) scaled[j] = x_grid[j] * eu;
  const SingularEigenstate phi = singular_eigenstate(n, g, scaled);
  std::vector<Complex> psi(x_grid.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    const double x = x_grid[j];
    psi[j] = std::exp(Complex(-0.5 * u, -theta * phi.energy + 0.5 * udot * x * x)) *
             phi.values[j];
  }
  return psi;
}

std::optional<double> rotation_form_angle(const Mat& F, double tol) {
  if (F.rows() != 2) return std::nullopt;
  double theta = std::atan2(F(0, 1), F(0, 0));
  if (theta < 0) theta += 2.0 * M_PI;
  if ((F - rotation_matrix(theta)).cwiseAbs().maxCoeff() <= tol) return theta;
  return std::nullopt;
}

RevivalReport revival_scan(const HamiltonianModel& H, const Vec& alpha, double hbar,
                           const std::vector<double>& t_grid,
                           const RevivalScanOptions& opt) {
  if (!(opt.epsilon > 0 && opt.epsilon < 1))
    throw std::invalid_argument("revival_scan: epsilon must be in (0,1)");
  if (t_grid.empty()) return {};
  const double t_max = t_grid.back();
  const Trajectory traj = integrate_full(H, alpha, t_max, opt.dt);
  const double h = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : t_max;

  RevivalReport rep;
  const std::size_t m = t_grid.size();
  rep.times = t_grid;
  rep.R.assign(m, 0.0);
  rep.ct.assign(m, 0.0);
  rep.rotation_angle.assign(m, std::numeric_limits<double>::quiet_NaN());
  // Byte buffer instead of vector<bool>: per-slot writes from different
  // threads must not share storage.
  std::vector<unsigned char> defined(m, 1);

  // Each grid point is independent; slot-indexed writes keep the output
  // identical for any thread count.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto idx = std::min(traj.size() - 1,
                              static_cast<std::size_t>(std::llround(t_grid[i] / h)));
    const Mat& F = traj.stability[idx];
    const Vec& zt = traj.points[idx];
    if (auto th = rotation_form_angle(F)) rep.rotation_angle[i] = *th;
    const bool ev1 =
        std::abs((Mat::Identity(F.rows(), F.cols()) - F).determinant()) <= 1e-8;
    if (opt.quadratic_exact) {
      rep.ct[i] = mw_matrices(F).ct;
      rep.R[i] = quadratic_return_exact(F, alpha, hbar);
    } else if (!ev1) {
      ThawedGaussian tg;
      tg.center = zt;
      tg.stability = F;
      tg.hbar = hbar;
      tg.origin = alpha;
      const ReturnProbability rp = return_probability_from(tg);
      rep.R[i] = rp.R;
      rep.ct[i] = rp.ct;
    } else {
      defined[i] = 0;
      rep.ct[i] = mw_matrices(F).ct;
      rep.R[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  rep.defined.assign(defined.begin(), defined.end());

  // Local maxima above threshold, refined by parabolic interpolation.
  for (std::size_t i = 1; i < m; ++i) {
    // i = 0 is skipped: a grid starting near t = 0 always shows the
    // trivial R -> 1 tail there.
    if (!rep.defined[i] || rep.R[i] < 1.0 - opt.epsilon) continue;
    const bool left_ok = !rep.defined[i - 1] || rep.R[i] >= rep.R[i - 1];
    const bool right_ok = i + 1 == m || !rep.defined[i + 1] || rep.R[i] >= rep.R[i + 1];
    if (!(left_ok && right_ok)) continue;
    double t_star = rep.times[i];
    if (i > 0 && i + 1 < m && rep.defined[i - 1] && rep.defined[i + 1]) {
      const double y0 = rep.R[i - 1], y1 = rep.R[i], y2 = rep.R[i + 1];
      const double denom = y0 - 2.0 * y1 + y2;
      if (std::abs(denom) > 1e-300) {
        const double shift = 0.5 * (y0 - y2) / denom;
        if (std::abs(shift) <= 1.0)
          t_star += shift * (rep.times[i + 1] - rep.times[i]);
      }
    }
    rep.revival_times.push_back(t_star);
  }
  return rep;
}

}  // namespace sce
