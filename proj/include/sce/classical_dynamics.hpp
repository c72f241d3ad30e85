#pragma once

// Classical trajectories with co-integrated stability matrices and
// action phases, periodic-orbit detection, and Floquet analysis of
// Hill/Mathieu equations (monodromy, exponent rho, Fourier
// coefficients c_n, and the complex solution x = e^{u + i theta}).

#include <functional>
#include <optional>
#include <vector>

#include "sce/phase_space.hpp"

namespace sce {

struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SymplecticityLost : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroCrossingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Finite Fourier series m + sum_k (a_k cos(k w t) + b_k sin(k w t)).
/// The scenario format specifies periodic drives this way.
struct FourierSeries {
  double mean = 0.0;
  std::vector<double> cosc;
  std::vector<double> sinc;
  double omega = 1.0;

  double operator()(double t) const;
  double primitive(double t) const;  // integral from 0 to t
  double period() const { return 2.0 * M_PI / omega; }
};

/// Classical Hamiltonian H(z, t) with analytic gradient and Hessian.
struct HamiltonianModel {
  std::function<double(const Vec&, double)> value;
  std::function<Vec(const Vec&, double)> gradient;
  std::function<Mat(const Vec&, double)> hessian;
  std::optional<double> period;  // drive period for time-periodic models
  int dof = 1;                   // n (phase space dimension 2n)
  bool time_dependent = false;

  static HamiltonianModel harmonic();
  static HamiltonianModel free_particle();
  static HamiltonianModel pendulum();
  static HamiltonianModel quartic();
  /// H = g(t) (q p); dilation generator.
  static HamiltonianModel dilation(FourierSeries g);
  /// H = g(t) (p^2 + q^2)/2.
  static HamiltonianModel isotropic(FourierSeries g);
  /// H = p^2/2 + (lambda cos(w t) + mu) q^2/2.
  static HamiltonianModel mathieu(double lambda, double mu, double omega);
  /// H = p^2/2 + f(t) q^2/2 (general Hill form).
  static HamiltonianModel hill(FourierSeries f);
  /// H = p^2/2 + f(t) q^2/2 + g^2/q^2 on the half-line q > 0.
  static HamiltonianModel singular(FourierSeries f, double g);
  /// Quadratic H = (1/2) z.Sz for constant symmetric S.
  static HamiltonianModel quadratic(const Mat& S);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> points;
  std::vector<Mat> stability;   // F_t, F_0 = 1
  std::vector<double> action;   // S_t
  std::vector<double> delta;    // delta_t = S_t - (q_t.p_t - q.p)/2
  std::vector<double> energy;

  std::size_t size() const { return times.size(); }
};

Trajectory integrate_trajectory(const HamiltonianModel& H, const Vec& z0,
                                double t_end, double dt);
/// Fills traj.stability by co-integrating dF/dt = J Hess F on the same
/// RK4 steps; throws SymplecticityLost if the drift exceeds 1e-4.
void integrate_stability(const HamiltonianModel& H, Trajectory& traj);
/// Fills traj.action and traj.delta.
void action_phase(const HamiltonianModel& H, Trajectory& traj);

/// One-call variant used by most consumers: trajectory + stability +
/// action in a single integration pass.
Trajectory integrate_full(const HamiltonianModel& H, const Vec& z0,
                          double t_end, double dt);

/// Smallest T in (0, t_max] with |Phi^T(z0) - z0| <= tol, refined to
/// the local return-distance minimum.  H must be time-independent.
std::optional<double> find_period(const HamiltonianModel& H, const Vec& z0,
                                  double t_max, double tol, double dt = 1e-3);

/// Monodromy of x'' + f(t) x = 0 over one period T.
Mat hill_monodromy(const std::function<double(double)>& f, double T, double dt);

struct FloquetData {
  Mat monodromy;             // 2x2
  double rho = 0.0;          // characteristic exponent, branch [0, 2)
  std::vector<Complex> coefficients;  // c_n, n in [-N, N]
  int n_max = 0;
  Complex C{0, 0};           // sum c_n
  Complex D{0, 0};           // sum (2n + rho) c_n
  bool stable = false;
  bool marginal = false;     // within 1e-10 of |tr| = 2
  double omega = 1.0;

  Complex coeff(int n) const { return coefficients[static_cast<std::size_t>(n + n_max)]; }
};

FloquetData floquet_analyze(const std::function<double(double)>& f, double omega,
                            double dt = 1e-4, int N = 32);

struct HillComplexSolution {
  std::vector<double> times;
  std::vector<double> u;      // log |x|
  std::vector<double> theta;  // unwrapped arg x
  std::vector<double> udot;
  double alpha = 1.0;
  double drive_period = 0.0;
  bool u_periodic = false;    // |u(T)-u(0)|, |udot(T)-udot(0)| <= 1e-6
};

/// Integrates the complex Hill solution with x(0) = alpha,
/// xdot(0) = i/alpha and extracts (u, theta, udot).
HillComplexSolution hill_complex_solution(const std::function<double(double)>& f,
                                          double alpha, double t_end, double dt,
                                          double drive_period);

/// Initial modulus alpha for which the Hill solution has T-periodic u
/// (the Floquet eigensolution with unit Wronskian).  Requires a stable
/// zone and an even drive f.
double periodic_alpha(const FloquetData& fd);

/// Bisection on |tr M_T| = 2 along mu at fixed lambda for the Mathieu
/// family; returns the boundary mu in [mu_lo, mu_hi].
double mathieu_zone_boundary(double lambda, double omega, double mu_lo,
                             double mu_hi, double dt = 1e-4, double tol = 1e-10);

}  // namespace sce
