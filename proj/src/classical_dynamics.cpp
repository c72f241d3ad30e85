#include "sce/classical_dynamics.hpp"

#include <cmath>

namespace sce {

double FourierSeries::operator()(double t) const {
  double v = mean;
  for (std::size_t k = 0; k < cosc.size(); ++k) v += cosc[k] * std::cos((k + 1) * omega * t);
  for (std::size_t k = 0; k < sinc.size(); ++k) v += sinc[k] * std::sin((k + 1) * omega * t);
  return v;
}

double FourierSeries::primitive(double t) const {
  double v = mean * t;
  for (std::size_t k = 0; k < cosc.size(); ++k) {
    const double w = (k + 1) * omega;
    v += cosc[k] * std::sin(w * t) / w;
  }
  for (std::size_t k = 0; k < sinc.size(); ++k) {
    const double w = (k + 1) * omega;
    v += sinc[k] * (1.0 - std::cos(w * t)) / w;
  }
  return v;
}

namespace {

constexpr double kSingularQMin = 1e-6;

HamiltonianModel make_1d(std::function<double(double, double, double)> h,
                         std::function<double(double, double)> dq,
                         std::function<double(double, double)> dp,
                         std::function<double(double, double)> dqq,
                         double dpp, bool time_dep) {
  // Helper for separable 1-dof models H = T(p) + V(q, t) and friends.
  HamiltonianModel m;
  m.dof = 1;
  m.time_dependent = time_dep;
  m.value = [h](const Vec& z, double t) { return h(z(0), z(1), t); };
  m.gradient = [dq, dp](const Vec& z, double t) {
    Vec g(2);
    g(0) = dq(z(0), t);
    g(1) = dp(z(1), t);
    return g;
  };
  m.hessian = [dqq, dpp](const Vec& z, double t) {
    Mat h2 = Mat::Zero(2, 2);
    h2(0, 0) = dqq(z(0), t);
    h2(1, 1) = dpp;
    return h2;
  };
  return m;
}

}  // namespace

HamiltonianModel HamiltonianModel::harmonic() {
  return make_1d([](double q, double p, double) { return 0.5 * (q * q + p * p); },
                 [](double q, double) { return q; },
                 [](double p, double) { return p; },
                 [](double, double) { return 1.0; }, 1.0, false);
}

HamiltonianModel HamiltonianModel::free_particle() {
  return make_1d([](double, double p, double) { return 0.5 * p * p; },
                 [](double, double) { return 0.0; },
                 [](double p, double) { return p; },
                 [](double, double) { return 0.0; }, 1.0, false);
}

HamiltonianModel HamiltonianModel::pendulum() {
  return make_1d([](double q, double p, double) { return 0.5 * p * p - std::cos(q); },
                 [](double q, double) { return std::sin(q); },
                 [](double p, double) { return p; },
                 [](double q, double) { return std::cos(q); }, 1.0, false);
}

HamiltonianModel HamiltonianModel::quartic() {
  return make_1d([](double q, double p, double) { return 0.5 * p * p + 0.25 * q * q * q * q; },
                 [](double q, double) { return q * q * q; },
                 [](double p, double) { return p; },
                 [](double q, double) { return 3.0 * q * q; }, 1.0, false);
}

HamiltonianModel HamiltonianModel::dilation(FourierSeries g) {
  HamiltonianModel m;
  m.dof = 1;
  m.time_dependent = true;
  m.period = g.period();
  m.value = [g](const Vec& z, double t) { return g(t) * z(0) * z(1); };
  m.gradient = [g](const Vec& z, double t) {
    Vec out(2);
    out(0) = g(t) * z(1);
    out(1) = g(t) * z(0);
    return out;
  };
  m.hessian = [g](const Vec&, double t) {
    Mat h = Mat::Zero(2, 2);
    h(0, 1) = h(1, 0) = g(t);
    return h;
  };
  return m;
}

HamiltonianModel HamiltonianModel::isotropic(FourierSeries g) {
  HamiltonianModel m;
  m.dof = 1;
  m.time_dependent = true;
  m.period = g.period();
  m.value = [g](const Vec& z, double t) { return 0.5 * g(t) * (z(0) * z(0) + z(1) * z(1)); };
  m.gradient = [g](const Vec& z, double t) { return Vec(g(t) * z); };
  m.hessian = [g](const Vec&, double t) { return Mat(g(t) * Mat::Identity(2, 2)); };
  return m;
}

HamiltonianModel HamiltonianModel::mathieu(double lambda, double mu, double omega) {
  FourierSeries f;
  f.mean = mu;
  f.cosc = {lambda};
  f.omega = omega;
  return hill(f);
}

HamiltonianModel HamiltonianModel::hill(FourierSeries f) {
  auto m = make_1d(
      [f](double q, double p, double t) { return 0.5 * p * p + 0.5 * f(t) * q * q; },
      [f](double q, double t) { return f(t) * q; },
      [](double p, double) { return p; },
      [f](double, double t) { return f(t); }, 1.0, true);
  m.period = f.period();
  return m;
}

HamiltonianModel HamiltonianModel::singular(FourierSeries f, double g) {
  const double g2 = g * g;
  auto guard = [](double q) {
    if (q < kSingularQMin)
      throw NonFiniteError("singular oscillator reached q <= q_min");
  };
  auto m = make_1d(
      [f, g2, guard](double q, double p, double t) {
        guard(q);
        return 0.5 * p * p + 0.5 * f(t) * q * q + g2 / (q * q);
      },
      [f, g2, guard](double q, double t) {
        guard(q);
        return f(t) * q - 2.0 * g2 / (q * q * q);
      },
      [](double p, double) { return p; },
      [f, g2, guard](double q, double t) {
        guard(q);
        return f(t) + 6.0 * g2 / (q * q * q * q);
      },
      1.0, true);
  m.period = f.period();
  return m;
}

HamiltonianModel HamiltonianModel::quadratic(const Mat& S) {
  HamiltonianModel m;
  m.dof = static_cast<int>(S.rows()) / 2;
  m.time_dependent = false;
  m.value = [S](const Vec& z, double) { return 0.5 * z.dot(S * z); };
  m.gradient = [S](const Vec& z, double) { return Vec(S * z); };
  m.hessian = [S](const Vec&, double) { return S; };
  return m;
}

namespace {

// Combined RK4 state: z (2n), F (2n x 2n, column major), S (action).
struct FullState {
  Vec z;
  Mat F;
  double S = 0.0;
};

FullState rhs(const HamiltonianModel& H, const FullState& s, double t, const Mat& J) {
  FullState d;
  const Vec g = H.gradient(s.z, t);
  d.z = J * g;
  d.F = J * H.hessian(s.z, t) * s.F;
  const int n = H.dof;
  // qdot.p - H with qdot = dH/dp.
  d.S = g.tail(n).dot(s.z.tail(n)) - H.value(s.z, t);
  return d;
}

FullState axpy(const FullState& a, double h, const FullState& b) {
  FullState out;
  out.z = a.z + h * b.z;
  out.F = a.F + h * b.F;
  out.S = a.S + h * b.S;
  return out;
}

void rk4_step(const HamiltonianModel& H, FullState& s, double t, double h, const Mat& J) {
  const FullState k1 = rhs(H, s, t, J);
  const FullState k2 = rhs(H, axpy(s, 0.5 * h, k1), t + 0.5 * h, J);
  const FullState k3 = rhs(H, axpy(s, 0.5 * h, k2), t + 0.5 * h, J);
  const FullState k4 = rhs(H, axpy(s, h, k3), t + h, J);
  s.z += (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
  s.F += (h / 6.0) * (k1.F + 2.0 * k2.F + 2.0 * k3.F + k4.F);
  s.S += (h / 6.0) * (k1.S + 2.0 * k2.S + 2.0 * k3.S + k4.S);
}

}  // namespace

Trajectory integrate_full(const HamiltonianModel& H, const Vec& z0, double t_end,
                          double dt) {
  if (!(dt > 0)) throw std::invalid_argument("integrate: dt must be > 0");
  const int n = H.dof;
  const Mat J = symplectic_J(n);
  const int steps = std::max(1, static_cast<int>(std::llround(t_end / dt)));
  const double h = t_end / steps;

  FullState s;
  s.z = z0;
  s.F = Mat::Identity(2 * n, 2 * n);
  s.S = 0.0;

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.points.reserve(steps + 1);
  traj.stability.reserve(steps + 1);
  traj.action.reserve(steps + 1);
  traj.delta.reserve(steps + 1);
  traj.energy.reserve(steps + 1);

  const double qp0 = z0.head(n).dot(z0.tail(n));
  auto record = [&](double t) {
    if (!s.z.allFinite() || !s.F.allFinite() || !std::isfinite(s.S))
      throw NonFiniteError("trajectory blew up at t = " + std::to_string(t));
    traj.times.push_back(t);
    traj.points.push_back(s.z);
    traj.stability.push_back(s.F);
    traj.action.push_back(s.S);
    traj.delta.push_back(s.S - 0.5 * (s.z.head(n).dot(s.z.tail(n)) - qp0));
    traj.energy.push_back(H.value(s.z, t));
  };

  record(0.0);
  for (int i = 0; i < steps; ++i) {
    rk4_step(H, s, i * h, h, J);
    record((i + 1) * h);
  }

  const double drift = (s.F.transpose() * J * s.F - J).cwiseAbs().maxCoeff();
  if (drift > 1e-4)
    throw SymplecticityLost("stability matrix drift " + std::to_string(drift) +
                            " (dt too large?)");
  return traj;
}

Trajectory integrate_trajectory(const HamiltonianModel& H, const Vec& z0,
                                double t_end, double dt) {
  Trajectory traj = integrate_full(H, z0, t_end, dt);
  traj.stability.clear();
  traj.action.clear();
  traj.delta.clear();
  return traj;
}

void integrate_stability(const HamiltonianModel& H, Trajectory& traj) {
  if (traj.times.empty()) throw std::invalid_argument("integrate_stability: empty trajectory");
  const double t_end = traj.times.back();
  const double dt = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : t_end;
  Trajectory full = integrate_full(H, traj.points.front(), t_end, dt);
  traj.stability = std::move(full.stability);
}

void action_phase(const HamiltonianModel& H, Trajectory& traj) {
  if (traj.times.empty()) throw std::invalid_argument("action_phase: empty trajectory");
  const double t_end = traj.times.back();
  const double dt = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : t_end;
  Trajectory full = integrate_full(H, traj.points.front(), t_end, dt);
  traj.action = std::move(full.action);
  traj.delta = std::move(full.delta);
}

namespace {

Vec flow_to(const HamiltonianModel& H, const Vec& z0, double t, double dt) {
  if (t <= 0) return z0;
  return integrate_full(H, z0, t, dt).points.back();
}

}  // namespace

std::optional<double> find_period(const HamiltonianModel& H, const Vec& z0,
                                  double t_max, double tol, double dt) {
  if (H.time_dependent)
    throw std::invalid_argument("find_period: H must be time-independent");
  Trajectory traj = integrate_full(H, z0, t_max, dt);
  const double scale = std::max(1.0, z0.norm());

  // Locate the first local minimum of the return distance that comes
  // back within tol, after the orbit has genuinely left z0.
  bool departed = false;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double d = (traj.points[i] - z0).norm();
    if (d > 0.05 * scale) departed = true;
    if (!departed) continue;
    const double dm = (traj.points[i - 1] - z0).norm();
    const double dp = (traj.points[i + 1] - z0).norm();
    if (d <= dm && d <= dp && d <= 10.0 * tol + 0.01 * scale) {
      // Golden-section refinement of |Phi^T z0 - z0| on the bracket.
      double a = traj.times[i - 1], b = traj.times[i + 1];
      auto dist = [&](double t) { return (flow_to(H, z0, t, dt) - z0).norm(); };
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = dist(x1), f2 = dist(x2);
      for (int it = 0; it < 60 && (b - a) > 1e-12; ++it) {
        if (f1 < f2) {
          b = x2; x2 = x1; f2 = f1;
          x1 = b - gr * (b - a); f1 = dist(x1);
        } else {
          a = x1; x1 = x2; f1 = f2;
          x2 = a + gr * (b - a); f2 = dist(x2);
        }
      }
      const double T = 0.5 * (a + b);
      if (dist(T) <= tol) return T;
      departed = false;  // spurious minimum; keep scanning
    }
  }
  return std::nullopt;
}

Mat hill_monodromy(const std::function<double(double)>& f, double T, double dt) {
  if (!(T > 0)) throw std::invalid_argument("hill_monodromy: T must be > 0");
  const int steps = std::max(1, static_cast<int>(std::llround(T / dt)));
  const double h = T / steps;
  // Fundamental system of x'' + f x = 0 in (x, xdot) coordinates.
  Mat M = Mat::Identity(2, 2);
  auto deriv = [&f](const Mat& m, double t) {
    Mat d(2, 2);
    d.row(0) = m.row(1);
    d.row(1) = -f(t) * m.row(0);
    return d;
  };
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const Mat k1 = deriv(M, t);
    const Mat k2 = deriv(M + 0.5 * h * k1, t + 0.5 * h);
    const Mat k3 = deriv(M + 0.5 * h * k2, t + 0.5 * h);
    const Mat k4 = deriv(M + h * k3, t + h);
    M += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!M.allFinite()) throw NonFiniteError("hill_monodromy: blow up");
  }
  return M;
}

namespace {

// Complex solution of x'' + f x = 0 sampled on a uniform grid of
// n_samples+1 points over [0, t_end], with substeps of size <= dt.
void integrate_hill_complex(const std::function<double(double)>& f, Complex x0,
                            Complex v0, double t_end, double dt, int n_samples,
                            std::vector<Complex>& xs, std::vector<Complex>& vs) {
  xs.assign(n_samples + 1, Complex(0, 0));
  vs.assign(n_samples + 1, Complex(0, 0));
  xs[0] = x0;
  vs[0] = v0;
  const double hs = t_end / n_samples;
  Complex x = x0, v = v0;
  const int sub = std::max(1, static_cast<int>(std::ceil(hs / dt)));
  const double h = hs / sub;
  for (int i = 0; i < n_samples; ++i) {
    for (int k = 0; k < sub; ++k) {
      const double t = i * hs + k * h;
      auto ax = [&](double tt, Complex xx) { return -f(tt) * xx; };
      const Complex k1x = v, k1v = ax(t, x);
      const Complex k2x = v + 0.5 * h * k1v, k2v = ax(t + 0.5 * h, x + 0.5 * h * k1x);
      const Complex k3x = v + 0.5 * h * k2v, k3v = ax(t + 0.5 * h, x + 0.5 * h * k2x);
      const Complex k4x = v + h * k3v, k4v = ax(t + h, x + h * k3x);
      x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    xs[i + 1] = x;
    vs[i + 1] = v;
  }
}

}  // namespace

FloquetData floquet_analyze(const std::function<double(double)>& f, double omega,
                            double dt, int N) {
  FloquetData fd;
  fd.omega = omega;
  const double T = 2.0 * M_PI / omega;
  fd.monodromy = hill_monodromy(f, T, dt);
  const double tr = fd.monodromy.trace();
  fd.stable = std::abs(tr) <= 2.0;
  fd.marginal = std::abs(std::abs(tr) - 2.0) < 1e-10;
  fd.n_max = N;
  fd.coefficients.assign(2 * N + 1, Complex(0, 0));
  if (!fd.stable) return fd;

  // Branch: rho in [0, 2) with e^{i pi rho} in the upper half plane.
  fd.rho = std::acos(std::clamp(tr / 2.0, -1.0, 1.0)) / M_PI;
  const Complex lam = std::exp(Complex(0, M_PI * fd.rho));

  // Eigenvector of the monodromy for lam (pick the better-conditioned row).
  Complex v1, v2;
  if (std::abs(fd.monodromy(0, 1)) > std::abs(fd.monodromy(1, 0))) {
    v1 = fd.monodromy(0, 1);
    v2 = lam - fd.monodromy(0, 0);
  } else {
    v1 = lam - fd.monodromy(1, 1);
    v2 = fd.monodromy(1, 0);
  }
  if (std::abs(v1) + std::abs(v2) < 1e-14) { v1 = 1.0; v2 = 0.0; }

  // Fourier coefficients of e^{-i rho w t/2} x_+(t) over one period,
  // (2N+1)-point trapezoidal quadrature on the DFT grid.
  const int m = 2 * N + 1;
  std::vector<Complex> xs, vs;
  integrate_hill_complex(f, v1, v2, T * (m - 1) / m, dt, m - 1, xs, vs);
  for (int n = -N; n <= N; ++n) {
    Complex c(0, 0);
    for (int j = 0; j < m; ++j) {
      const double t = j * T / m;
      c += xs[static_cast<std::size_t>(j)] *
           std::exp(Complex(0, -(fd.rho * omega * 0.5 + n * omega) * t));
    }
    fd.coefficients[static_cast<std::size_t>(n + N)] = c / static_cast<double>(m);
  }
  fd.C = Complex(0, 0);
  fd.D = Complex(0, 0);
  for (int n = -N; n <= N; ++n) {
    fd.C += fd.coeff(n);
    fd.D += (2.0 * n + fd.rho) * fd.coeff(n);
  }
  return fd;
}

HillComplexSolution hill_complex_solution(const std::function<double(double)>& f,
                                          double alpha, double t_end, double dt,
                                          double drive_period) {
  if (alpha == 0.0) throw std::invalid_argument("hill_complex_solution: alpha must be nonzero");
  const int n_samples = std::max(2, static_cast<int>(std::llround(t_end / dt)));
  std::vector<Complex> xs, vs;
  integrate_hill_complex(f, Complex(alpha, 0.0), Complex(0.0, 1.0 / alpha), t_end,
                         dt, n_samples, xs, vs);

  HillComplexSolution sol;
  sol.alpha = alpha;
  sol.drive_period = drive_period;
  sol.times.resize(xs.size());
  sol.u.resize(xs.size());
  sol.theta.resize(xs.size());
  sol.udot.resize(xs.size());
  double prev_theta = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sol.times[i] = t_end * static_cast<double>(i) / n_samples;
    const double r = std::abs(xs[i]);
    if (r < 1e-12)
      throw ZeroCrossingError("hill_complex_solution: |x| crossed zero");
    sol.u[i] = std::log(r);
    double th = std::arg(xs[i]);
    if (i > 0) {
      // nearest-branch continuation; dt must keep |dtheta| < pi/2
      while (th - prev_theta > M_PI) th -= 2.0 * M_PI;
      while (th - prev_theta < -M_PI) th += 2.0 * M_PI;
      if (std::abs(th - prev_theta) > M_PI / 2.0)
        throw std::runtime_error("hill_complex_solution: phase step too large, reduce dt");
    }
    sol.theta[i] = th;
    prev_theta = th;
    sol.udot[i] = (vs[i] / xs[i]).real();
  }
  if (drive_period > 0 && t_end >= drive_period) {
    const auto j = static_cast<std::size_t>(std::llround(drive_period / (t_end / n_samples)));
    if (j < sol.u.size())
      sol.u_periodic = std::abs(sol.u[j] - sol.u[0]) <= 1e-6 &&
                       std::abs(sol.udot[j] - sol.udot[0]) <= 1e-6;
  }
  return sol;
}

double periodic_alpha(const FloquetData& fd) {
  if (!fd.stable)
    throw std::invalid_argument("periodic_alpha: parameters are in an unstable zone");
  const Complex lam = std::exp(Complex(0, M_PI * fd.rho));
  Complex v1, v2;
  if (std::abs(fd.monodromy(0, 1)) > std::abs(fd.monodromy(1, 0))) {
    v1 = fd.monodromy(0, 1);
    v2 = lam - fd.monodromy(0, 0);
  } else {
    v1 = lam - fd.monodromy(1, 1);
    v2 = fd.monodromy(1, 0);
  }
  double w = (std::conj(v1) * v2).imag();
  if (w < 0) {  // conjugate eigensolution carries the +1 Wronskian
    v1 = std::conj(v1);
    v2 = std::conj(v2);
    w = -w;
  }
  if (w < 1e-14)
    throw std::runtime_error("periodic_alpha: degenerate Floquet eigenvector");
  v1 /= std::sqrt(w);
  v2 /= std::sqrt(w);
  if (std::abs((std::conj(v1) * v2).real()) > 1e-6)
    throw std::runtime_error("periodic_alpha: drive is not even, udot(0) != 0");
  return std::abs(v1);
}

double mathieu_zone_boundary(double lambda, double omega, double mu_lo,
                             double mu_hi, double dt, double tol) {
  const double T = 2.0 * M_PI / omega;
  auto h = [&](double mu) {
    auto f = [&](double t) { return lambda * std::cos(omega * t) + mu; };
    return std::abs(hill_monodromy(f, T, dt).trace()) - 2.0;
  };
  double flo = h(mu_lo), fhi = h(mu_hi);
  if (flo * fhi > 0)
    throw std::invalid_argument("mathieu_zone_boundary: bracket does not straddle |tr|=2");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (mu_lo + mu_hi);
    const double fm = h(mid);
    if (std::abs(fm) < tol || mu_hi - mu_lo < 1e-14) return mid;
    if (flo * fm <= 0) {
      mu_hi = mid;
      fhi = fm;
    } else {
      mu_lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (mu_lo + mu_hi);
}

}  // namespace sce
