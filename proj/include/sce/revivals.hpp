#pragma once

// Semiclassical return probability and revival prediction: thawed
// Gaussian propagation, the c_t |exp(-(1/4hbar) z.(1+K)z)| formula,
// the exact quadratic overlaps, the Mathieu reference-state recurrence
// and the singular-oscillator eigenstates.

#include "sce/classical_dynamics.hpp"
#include "sce/metaplectic.hpp"

namespace sce {

struct BranchAmbiguityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPositiveWidthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ThawedGaussian {
  Vec center;     // z_t
  Mat stability;  // F_t
  double action = 0.0;  // delta_t
  double hbar = 1.0;
  Vec origin;     // initial alpha
};

struct RevivalReport {
  std::vector<double> times;
  std::vector<double> R;
  std::vector<double> ct;
  std::vector<bool> defined;  // false where F_t has eigenvalue 1 and no exact route
  std::vector<double> rotation_angle;  // NaN where F_t is not of rotation form
  std::vector<double> revival_times;   // refined local maxima with R >= 1 - eps
};

ThawedGaussian propagate_coherent(const HamiltonianModel& H, const Vec& alpha,
                                  double t, double hbar, double dt);

struct ReturnProbability {
  double R = 0.0;
  double ct = 1.0;
};

/// Semiclassical return probability from (z_t, F_t):
/// R = c_t |exp(-(1/4hbar) z.(1+K)z)|, z = alpha - alpha_t.
ReturnProbability return_probability_from(const ThawedGaussian& tg);
ReturnProbability return_probability(const HamiltonianModel& H, const Vec& alpha,
                                     double t, double hbar, double dt);

/// Exact return probability for quadratic Hamiltonians:
/// |det N|^{-1/2} |exp(-(1/2hbar) J alpha . B J alpha)|.
double quadratic_return_exact(const Mat& F, const Vec& alpha, double hbar);

/// Exact overlap for H(t) = g(t)(P^2+Q^2)/2 with G = int_0^t g:
/// exp(-iG/2 - i(p^2+q^2) sin(G)/(2hbar) - (p^2+q^2) sin^2(G/2)/hbar).
Complex rotation_overlap_exact(double G, const Vec& alpha, double hbar);

/// Prop.-4.1 overlap of the Mathieu reference state,
/// e^{-i rho w t/4} G(t) with the branch tracked continuously from t=0.
Complex mathieu_overlap(const FloquetData& fd, double t);

struct MathieuReference {
  double a = 1.0;  // width parameter, psi ~ (a/pi hbar)^{1/4} exp(-a x^2/2hbar)
  double hbar = 1.0;
};

MathieuReference mathieu_reference_state(const FloquetData& fd, double hbar);

struct SingularEigenstate {
  std::vector<double> values;  // real samples on the half-line grid
  double a = 0.0;              // (1/2) sqrt(1 + 8 g^2)
  double energy = 0.0;         // E_n = 2n + a + 1
};

SingularEigenstate singular_eigenstate(int n, double g,
                                       const std::vector<double>& x_grid);

/// psi_n(x, t) = exp(-i theta E_n + (-u + i udot x^2)/2) phi_n(x e^{-u}),
/// evaluated from a Hill complex solution at sample index t_index.
std::vector<Complex> singular_time_state(int n, double g,
                                         const HillComplexSolution& hcs,
                                         std::size_t t_index,
                                         const std::vector<double>& x_grid);

/// theta in [0, 2pi) with F = 1 cos(theta) + J sin(theta), if any.
std::optional<double> rotation_form_angle(const Mat& F, double tol = 1e-8);

struct RevivalScanOptions {
  double dt = 1e-3;
  double epsilon = 0.01;
  bool quadratic_exact = false;  // use the exact route (builtin quadratic models)
};

RevivalReport revival_scan(const HamiltonianModel& H, const Vec& alpha, double hbar,
                           const std::vector<double>& t_grid,
                           const RevivalScanOptions& opt = {});

}  // namespace sce
