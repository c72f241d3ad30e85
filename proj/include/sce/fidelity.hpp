#pragma once

// Linear-response fidelity F^LR, its classical limit through the
// microcanonical autocorrelation C_{V,E}, the Mandelstam-Tamm bound,
// and Egorov / Schnirelman numerical diagnostics.

#include <cstdint>

#include "sce/classical_dynamics.hpp"
#include "sce/quantum_oracle.hpp"

namespace sce {

struct BasisTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GradientVanishes : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyWindow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Perturbation V: classical symbol on phase space plus the
/// multiplicative potential used for matrix elements.
struct PerturbationModel {
  std::function<double(const Vec&)> symbol;
  std::function<double(double)> quantized;
  double lambda = 0.0;
};

struct EnergyWindow {
  double E = 0.0;
  double alpha_h = 0.0;  // lower edge
  double beta_h = 0.0;   // upper edge
};

struct CorrelationSeries {
  std::vector<double> times;
  std::vector<double> C;        // C_{V,E}(t)
  std::vector<double> stderr_;  // Monte Carlo standard error per time
  double Vbar = 0.0;            // microcanonical mean of V
  int n_samples = 0;
};

struct MandelstamTammRow {
  double t = 0.0;
  double overlap_sq = 0.0;
  double bound = 0.0;
  bool valid = false;  // t <= pi hbar / (2 DeltaE)
};

using Propagator = std::function<WavepacketGrid(const WavepacketGrid&, double)>;

/// |<psi, U(t) psi>|^2 against cos^2(t DeltaE / hbar); rows with
/// t <= pi hbar / (2 DeltaE) are marked valid and the bound is
/// asserted there (tolerance 1e-8).
std::vector<MandelstamTammRow> mandelstam_tamm(
    const WavepacketGrid& psi,
    const std::function<WavepacketGrid(const WavepacketGrid&)>& apply_H,
    const Propagator& U, const std::vector<double>& t_grid);

/// H psi with the same three-point kinetic stencil the eigensolver
/// diagonalizes, so eigensolve() states have DeltaE = 0 exactly.
WavepacketGrid apply_hamiltonian_fd(const WavepacketGrid& psi,
                                    const std::function<double(double)>& V);

/// Propagator that projects on a finite eigenbasis and advances phases.
Propagator basis_propagator(const EigenBasis& basis);

/// F^LR_j(t) = 1 - (lambda/hbar)^2 ( sum_k |V_jk|^2 g(w_jk, t)
/// - (t V_jj)^2 ), g(w,t) = 2(1-cos wt)/w^2 (t^2 at w = 0).
/// V_pert may be null; when given, the truncation completeness
/// sum_k |V_jk|^2 / <psi_j|V^2|psi_j> >= 1 - 1e-4 is enforced.
std::vector<double> quantum_lr_fidelity(const EigenBasis& basis,
                                        const std::function<double(double)>& V_pert,
                                        int j, double lambda,
                                        const std::vector<double>& t_grid);

/// Microcanonical samples on the energy shell H0 = E.  For one degree
/// of freedom the orbit is sampled uniformly in time (the exact
/// microcanonical measure dt/T); for two, a Metropolis walk on the thin
/// shell |H0 - E| < 1e-3 E with weight 1/|grad H0|.
std::vector<Vec> microcanonical_sample(const HamiltonianModel& H0, double E,
                                       int n, std::uint64_t seed);

CorrelationSeries classical_autocorrelation(const HamiltonianModel& H0,
                                            const PerturbationModel& V, double E,
                                            const std::vector<double>& t_grid,
                                            int n_samples, std::uint64_t seed);

/// 1 - 2 (lambda/hbar)^2 int_0^t ds int_0^s C(s') ds' on C's own grid,
/// evaluated at t_grid by interpolation.
std::vector<double> lr_fidelity_classical(const CorrelationSeries& C, double lambda,
                                          double hbar,
                                          const std::vector<double>& t_grid);

/// Heuristic exponentiated form exp(-2 (lambda/hbar)^2 int int C).
std::vector<double> lr_fidelity_exponentiated(const CorrelationSeries& C,
                                              double lambda, double hbar,
                                              const std::vector<double>& t_grid);

struct LRHbarResult {
  double hbar = 0.0;
  int n_states = 0;
  EnergyWindow window;
  std::vector<double> F_quantum;    // window average of F^LR_j
  std::vector<double> F_classical;
  std::vector<double> F_heuristic;  // exponentiated diagnostic column
  double max_deviation = 0.0;
};

struct LRComparison {
  std::vector<double> t;
  std::vector<LRHbarResult> per_hbar;
  CorrelationSeries C;
};

struct LRCompareSpec {
  std::function<double(double)> potential;  // V0(x) of H0 = p^2/2 + V0
  HamiltonianModel classical;               // matching classical model
  Grid1D grid;
  int n_basis = 160;
  int n_samples = 2000;
  std::uint64_t seed = 1;
};

LRComparison lr_fidelity_compare(const LRCompareSpec& spec,
                                 const PerturbationModel& V, double E,
                                 double lambda,
                                 const std::vector<double>& hbar_list,
                                 const std::vector<double>& t_grid);

/// Egorov defect |<phi_z, V(s) phi_z> - V(Phi^s z)|.
double egorov_check(const HamiltonianModel& H0,
                    const std::function<double(double)>& potential,
                    const PerturbationModel& V, const Vec& z, double s,
                    double hbar, const Grid1D& grid, double dt = 1e-3);

struct SchnirelmanRow {
  int j = 0;
  double E = 0.0;
  double quantum = 0.0;    // <psi_j, A psi_j>
  double classical = 0.0;  // microcanonical average of A at E_j
  double deviation = 0.0;
};

/// Eigenstate expectations of a multiplicative symbol A(q) against the
/// microcanonical average on the shell at E_j.  Diagnostic only.
std::vector<SchnirelmanRow> schnirelman_diagnostic(
    const EigenBasis& basis, const EnergyWindow& window,
    const std::function<double(double)>& A, const HamiltonianModel& H0,
    std::uint64_t seed = 7, int n_samples = 2000);

}  // namespace sce
