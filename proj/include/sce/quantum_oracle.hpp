#pragma once

// Brute-force quantum mechanics on 1D grids: coherent states,
// split-step Fourier propagation (full line and Dirichlet half-line),
// exact Gaussian evolution for quadratic Hamiltonians, a tridiagonal
// finite-difference eigensolver, the Wigner transform, and the
// phase-space trace evaluation of the metaplectic symbol.  Everything
// here is independent of the semiclassical formulas it verifies.

#include <functional>
#include <string>
#include <vector>

#include "sce/phase_space.hpp"

namespace sce {

struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NormLost : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotConfining : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid1D {
  double x_min = -20.0;
  double x_max = 20.0;
  int N = 4096;
  bool half_line = false;  // grid on (0, x_max], Dirichlet at 0

  double dx() const { return (x_max - x_min) / N; }
  /// Sample abscissa; on the half line x_j = (j+1) dx.
  double x(int j) const { return half_line ? (j + 1) * dx() : x_min + j * dx(); }

  static Grid1D full(double half_width, int N = 4096) {
    return Grid1D{-half_width, half_width, N, false};
  }
  static Grid1D half(double x_max, int N = 4096) { return Grid1D{0.0, x_max, N, true}; }
};

struct WavepacketGrid {
  std::vector<Complex> values;
  Grid1D grid;
  double hbar = 1.0;

  double norm() const;
};

/// Thawed-Gaussian parameters: psi(x) = amp * exp( i C (x-q)^2 / 2hbar
/// + i p (x-q)/hbar + i phase/hbar ), Im C > 0, |amp| fixed by
/// normalization.
struct GaussianParams {
  double q = 0.0;
  double p = 0.0;
  Complex width{0.0, 1.0};  // C; ground coherent state has C = i
  double phase = 0.0;       // action-like phase (tracked, modulus-irrelevant)
  double hbar = 1.0;
};

struct EigenBasis {
  std::vector<double> energies;
  std::vector<std::vector<double>> states;  // real eigenfunctions, L2-normalized
  Grid1D grid;
  double hbar = 1.0;
  CMat V_matrix;  // optional <psi_j|V|psi_k>; empty if not built
};

WavepacketGrid coherent_state(const Vec& alpha, double hbar, const Grid1D& grid);

/// Evaluate Gaussian parameters on a grid (L2-normalized; the stored
/// phase enters as a global factor).
WavepacketGrid gaussian_on_grid(const GaussianParams& par, const Grid1D& grid);

/// Strang-split spectral propagation of i hbar psi_t = (-hbar^2/2 psi_xx
/// + V(x,t) psi); V sampled at the step midpoint.
WavepacketGrid propagate_splitstep(const WavepacketGrid& psi,
                                   const std::function<double(double, double)>& V,
                                   double t_begin, double t_end, double dt);

/// Exact thawed-Gaussian update under the (quadratic-Hamiltonian)
/// metaplectic flow: center -> z_t, width C -> (c + dC)(a + bC)^{-1},
/// phase += delta_t.
GaussianParams propagate_quadratic_exact(const GaussianParams& par, const Mat& F,
                                         const Vec& z_t, double delta_t);

Complex overlap(const WavepacketGrid& a, const WavepacketGrid& b);

EigenBasis eigensolve(const std::function<double(double)>& V, const Grid1D& grid,
                      int k, double hbar);

/// Adds <psi_j|V_pert|psi_k> to a basis.
void build_v_matrix(EigenBasis& basis, const std::function<double(double)>& V_pert);

struct WignerMap {
  std::vector<double> q;       // N values
  std::vector<double> p;       // N values
  std::vector<std::vector<double>> W;  // W[iq][ip]
};

WignerMap wigner(const WavepacketGrid& psi);

/// |Omega(X)| by the phase-space trace integral
/// (2 pi hbar)^{-1} int dz <phi_z, T(-X) R(F) phi_z> for n = 1, with
/// R(F) realized by the exact Gaussian calculus (global metaplectic
/// phase drops out of the modulus).
double metaplectic_trace(const Mat& F, const Vec& X, double hbar,
                         double z_half_width = 8.0, int z_points = 160);

/// (2 pi hbar)^{-1} int dz |<phi_z, R(F) phi_z>|^2; equals
/// |det(1-F)|^{-1} (normalization calibrated on F = -1).
double overlap_sq_integral(const Mat& F, double hbar, double z_half_width = 8.0,
                           int z_points = 160);

/// Heisenberg-evolved perturbation matrix V(t)_{jk} =
/// e^{i(E_j - E_k)t/hbar} V_{jk}.
CMat heisenberg_matrix(const EigenBasis& basis, double t, double hbar);

/// Binary dump: 32-byte header (magic "SCQO", u32 version, u32 N,
/// f64 dx, f64 hbar, 8 pad bytes) then interleaved re/im float64.
void dump_wavepacket(const WavepacketGrid& psi, const std::string& path);
WavepacketGrid load_wavepacket(const std::string& path);
void dump_wavepacket_csv(const WavepacketGrid& psi, const std::string& path);

}  // namespace sce
