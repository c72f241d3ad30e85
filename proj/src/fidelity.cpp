#include "sce/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>

#include "sce/metaplectic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sce {

namespace {

Complex inner(const std::vector<Complex>& a, const std::vector<Complex>& b,
              double dx) {
  Complex s(0, 0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * dx;
}

/// Cumulative integral on a uniform grid: composite Simpson on each
/// parity chain, seeded with the quadratic-fit rule for the first step.
std::vector<double> cumulative_integral(const std::vector<double>& t,
                                        const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> I(n, 0.0);
  if (n < 2) return I;
  const double h = t[1] - t[0];
  if (n >= 3)
    I[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
  else
    I[1] = 0.5 * h * (f[0] + f[1]);
  for (std::size_t i = 2; i < n; ++i)
    I[i] = I[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
  return I;
}

double interp_uniform(const std::vector<double>& t, const std::vector<double>& f,
                      double x) {
  if (t.size() < 2) return f.empty() ? 0.0 : f[0];
  const double h = t[1] - t[0];
  if (x <= t.front()) return f.front();
  if (x >= t.back()) return f.back();
  const auto i = static_cast<std::size_t>((x - t.front()) / h);
  const double w = (x - t[i]) / h;
  return (1.0 - w) * f[i] + w * f[i + 1];
}

std::vector<double> double_time_integral(const CorrelationSeries& C) {
  const std::vector<double> I1 = cumulative_integral(C.times, C.C);
  return cumulative_integral(C.times, I1);
}

}  // namespace

WavepacketGrid apply_hamiltonian_fd(const WavepacketGrid& psi,
                                    const std::function<double(double)>& V) {
  const auto n = psi.values.size();
  const double dx = psi.grid.dx();
  const double k = psi.hbar * psi.hbar / (2.0 * dx * dx);
  WavepacketGrid out = psi;
  for (std::size_t j = 0; j < n; ++j) {
    // Dirichlet boundaries: the wavefunction vanishes off the grid.
    const Complex left = j > 0 ? psi.values[j - 1] : Complex(0, 0);
    const Complex right = j + 1 < n ? psi.values[j + 1] : Complex(0, 0);
    out.values[j] = k * (2.0 * psi.values[j] - left - right) +
                    V(psi.grid.x(static_cast<int>(j))) * psi.values[j];
  }
  return out;
}

Propagator basis_propagator(const EigenBasis& basis) {
  return [basis](const WavepacketGrid& psi, double t) {
    const double dx = psi.grid.dx();
    WavepacketGrid out = psi;
    std::fill(out.values.begin(), out.values.end(), Complex(0, 0));
    for (std::size_t j = 0; j < basis.energies.size(); ++j) {
      Complex c(0, 0);
      for (std::size_t i = 0; i < psi.values.size(); ++i)
        c += basis.states[j][i] * psi.values[i];
      c *= dx * std::exp(Complex(0, -basis.energies[j] * t / basis.hbar));
      for (std::size_t i = 0; i < psi.values.size(); ++i)
        out.values[i] += c * basis.states[j][i];
    }
    return out;
  };
}

std::vector<MandelstamTammRow> mandelstam_tamm(
    const WavepacketGrid& psi,
    const std::function<WavepacketGrid(const WavepacketGrid&)>& apply_H,
    const Propagator& U, const std::vector<double>& t_grid) {
  const double dx = psi.grid.dx();
  const WavepacketGrid Hpsi = apply_H(psi);
  const double n2 = psi.norm();
  const double Ebar = inner(psi.values, Hpsi.values, dx).real() / n2;
  const double E2 = inner(Hpsi.values, Hpsi.values, dx).real() / n2;
  const double dE = std::sqrt(std::max(0.0, E2 - Ebar * Ebar));
  const double t_valid =
      dE > 0 ? M_PI * psi.hbar / (2.0 * dE) : std::numeric_limits<double>::infinity();

  std::vector<MandelstamTammRow> rows;
  rows.reserve(t_grid.size());
  for (const double t : t_grid) {
    MandelstamTammRow r;
    r.t = t;
    const WavepacketGrid psit = U(psi, t);
    r.overlap_sq = std::norm(inner(psi.values, psit.values, dx)) / (n2 * n2);
    const double c = std::cos(t * dE / psi.hbar);
    r.bound = c * c;
    r.valid = t <= t_valid;
    if (r.valid && r.overlap_sq < r.bound - 1e-8)
      throw InternalInvariantViolated("mandelstam_tamm: bound violated on a valid row");
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> quantum_lr_fidelity(const EigenBasis& basis,
                                        const std::function<double(double)>& V_pert,
                                        int j, double lambda,
                                        const std::vector<double>& t_grid) {
  const auto n = basis.energies.size();
  if (j < 0 || static_cast<std::size_t>(j) >= n)
    throw BasisTooSmall("quantum_lr_fidelity: state index out of range");
  if (basis.V_matrix.rows() != static_cast<Eigen::Index>(n))
    throw std::invalid_argument("quantum_lr_fidelity: V_matrix not built");
  const double hbar = basis.hbar;

  double sum_vjk2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum_vjk2 += std::norm(basis.V_matrix(j, k));
  if (V_pert && !basis.states.empty()) {
    // Truncation completeness: sum_k |V_jk|^2 must carry the full
    // second moment <psi_j|V^2|psi_j>.
    double v2 = 0.0;
    const double dx = basis.grid.dx();
    for (std::size_t i = 0; i < basis.states[j].size(); ++i) {
      const double v = V_pert(basis.grid.x(static_cast<int>(i)));
      v2 += v * v * basis.states[j][i] * basis.states[j][i];
    }
    v2 *= dx;
    if (v2 > 0 && sum_vjk2 / v2 < 1.0 - 1e-4)
      throw BasisTooSmall("quantum_lr_fidelity: truncated basis misses " +
                          std::to_string(1.0 - sum_vjk2 / v2) + " of <V^2>");
  }

  const double vjj = basis.V_matrix(j, j).real();
  std::vector<double> F(t_grid.size());
  for (std::size_t it = 0; it < t_grid.size(); ++it) {
    const double t = t_grid[it];
    double term = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = (basis.energies[j] - basis.energies[k]) / hbar;
      const double g = std::abs(w) < 1e-12
                           ? t * t
                           : 2.0 * (1.0 - std::cos(w * t)) / (w * w);
      term += std::norm(basis.V_matrix(j, k)) * g;
    }
    const double second = term - (t * vjj) * (t * vjj);
    if (second < -1e-10 * (1.0 + sum_vjk2 * t * t))
      throw InternalInvariantViolated("quantum_lr_fidelity: negative variance term");
    F[it] = 1.0 - lambda * lambda / (hbar * hbar) * second;
  }
  return F;
}

namespace {

/// Point on the shell H0 = E found by bisection along the first
/// momentum axis from the origin.
Vec shell_point(const HamiltonianModel& H0, double E) {
  const int d = 2 * H0.dof;
  Vec z = Vec::Zero(d);
  auto at_p = [&](double p) {
    Vec w = z;
    w[H0.dof] = p;
    return w;
  };
  if (H0.value(z, 0.0) >= E)
    throw std::invalid_argument("microcanonical_sample: E below H0 at the origin");
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (H0.value(at_p(hi), 0.0) < E) {
    hi *= 2.0;
    if (++guard > 60)
      throw std::invalid_argument("microcanonical_sample: shell not reached");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (H0.value(at_p(mid), 0.0) < E ? lo : hi) = mid;
  }
  const Vec z0 = at_p(0.5 * (lo + hi));
  if (H0.gradient(z0, 0.0).norm() < 1e-12)
    throw GradientVanishes("microcanonical_sample: grad H0 vanishes on the shell");
  return z0;
}

}  // namespace

std::vector<Vec> microcanonical_sample(const HamiltonianModel& H0, double E, int n,
                                       std::uint64_t seed) {
  if (H0.time_dependent)
    throw std::invalid_argument("microcanonical_sample: H0 must be autonomous");
  const Vec z0 = shell_point(H0, E);
  std::mt19937_64 rng(seed);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n));

  if (H0.dof == 1) {
    const auto T = find_period(H0, z0, 400.0, 1e-6, 1e-3);
    if (!T) throw std::invalid_argument("microcanonical_sample: orbit not periodic");
    const int steps = 1 << 14;
    const Trajectory traj = integrate_trajectory(H0, z0, *T, *T / steps);
    // Stratified times: equal spacing with one random phase.  Unbiased
    // on the invariant measure dt/T like independent draws, but the
    // orbit average becomes a periodic trapezoid rule (spectrally
    // accurate) instead of O(1/sqrt(n)) Monte Carlo.
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double offset = uni(rng);
    for (int i = 0; i < n; ++i) {
      const double frac = (i + offset) / n;
      const auto idx = std::min<std::size_t>(
          traj.size() - 1, static_cast<std::size_t>(frac * steps));
      out.push_back(traj.points[idx]);
    }
    return out;
  }

  // Metropolis walk on the thin shell with weight 1/|grad H0|.
  const double delta = 1e-3 * std::abs(E);
  const double sigma = 0.1 * z0.norm() + 0.05;
  std::normal_distribution<double> nrm(0.0, sigma);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vec z = z0;
  double w = 1.0 / H0.gradient(z, 0.0).norm();
  const int burn = 1000, thin = 10;
  for (int i = -burn; static_cast<int>(out.size()) < n; ++i) {
    Vec zp = z;
    for (int k = 0; k < z.size(); ++k) zp[k] += nrm(rng);
    const double grad = H0.gradient(zp, 0.0).norm();
    if (std::abs(H0.value(zp, 0.0) - E) < delta && grad > 1e-12) {
      const double wp = 1.0 / grad;
      if (uni(rng) <= wp / w) {
        z = zp;
        w = wp;
      }
    }
    if (i >= 0 && i % thin == 0) out.push_back(z);
  }
  return out;
}

CorrelationSeries classical_autocorrelation(const HamiltonianModel& H0,
                                            const PerturbationModel& V, double E,
                                            const std::vector<double>& t_grid,
                                            int n_samples, std::uint64_t seed) {
  if (t_grid.empty() || t_grid.front() != 0.0)
    throw std::invalid_argument("classical_autocorrelation: t_grid must start at 0");
  const std::vector<Vec> samples = microcanonical_sample(H0, E, n_samples, seed);
  const double t_max = t_grid.back();
  const double h = t_grid.size() > 1 ? t_grid[1] - t_grid[0] : 1.0;
  const double dt_int = std::min(1e-2, h > 0 ? h / 4.0 : 1e-2);
  const std::size_t m = t_grid.size();

  // Per-sample product rows, reduced serially in sample order so the
  // result is bitwise identical for any thread count.
  std::vector<std::vector<double>> rows(samples.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(samples.size()); ++si) {
    const Vec& z = samples[static_cast<std::size_t>(si)];
    const double v0 = V.symbol(z);
    std::vector<double> row(m);
    if (t_max == 0.0) {
      std::fill(row.begin(), row.end(), v0 * v0);
    } else {
      const Trajectory traj = integrate_trajectory(H0, z, t_max, dt_int);
      const double hs = traj.times[1] - traj.times[0];
      for (std::size_t it = 0; it < m; ++it) {
        const auto idx = std::min(
            traj.size() - 1, static_cast<std::size_t>(std::llround(t_grid[it] / hs)));
        row[it] = v0 * V.symbol(traj.points[idx]);
      }
    }
    rows[static_cast<std::size_t>(si)] = std::move(row);
  }

  CorrelationSeries cs;
  cs.times = t_grid;
  cs.n_samples = n_samples;
  double vbar = 0.0;
  for (const Vec& z : samples) vbar += V.symbol(z);
  cs.Vbar = vbar / static_cast<double>(n_samples);
  cs.C.assign(m, 0.0);
  cs.stderr_.assign(m, 0.0);
  for (std::size_t it = 0; it < m; ++it) {
    double mean = 0.0;
    for (const auto& row : rows) mean += row[it];
    mean /= static_cast<double>(n_samples);
    double var = 0.0;
    for (const auto& row : rows) var += (row[it] - mean) * (row[it] - mean);
    var /= std::max(1.0, static_cast<double>(n_samples - 1));
    cs.C[it] = mean - cs.Vbar * cs.Vbar;
    cs.stderr_[it] = std::sqrt(var / static_cast<double>(n_samples));
  }
  if (cs.C[0] < -cs.stderr_[0] - 1e-12)
    throw InternalInvariantViolated("classical_autocorrelation: C(0) < -stderr");
  return cs;
}

std::vector<double> lr_fidelity_classical(const CorrelationSeries& C, double lambda,
                                          double hbar,
                                          const std::vector<double>& t_grid) {
  const std::vector<double> I2 = double_time_integral(C);
  std::vector<double> F(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] > C.times.back() + 1e-12)
      throw std::invalid_argument("lr_fidelity_classical: t outside covered range");
    F[i] = 1.0 - 2.0 * lambda * lambda / (hbar * hbar) *
                     interp_uniform(C.times, I2, t_grid[i]);
  }
  return F;
}

std::vector<double> lr_fidelity_exponentiated(const CorrelationSeries& C,
                                              double lambda, double hbar,
                                              const std::vector<double>& t_grid) {
  const std::vector<double> I2 = double_time_integral(C);
  std::vector<double> F(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    F[i] = std::exp(-2.0 * lambda * lambda / (hbar * hbar) *
                    interp_uniform(C.times, I2, t_grid[i]));
  return F;
}

LRComparison lr_fidelity_compare(const LRCompareSpec& spec,
                                 const PerturbationModel& V, double E,
                                 double lambda,
                                 const std::vector<double>& hbar_list,
                                 const std::vector<double>& t_grid) {
  LRComparison rep;
  rep.t = t_grid;

  // Classical side once: C_{V,E} on a dense uniform grid covering t_grid.
  const double t_max = t_grid.back();
  const int nc = 1024;
  std::vector<double> ct(nc + 1);
  for (int i = 0; i <= nc; ++i) ct[i] = t_max * i / nc;
  rep.C = classical_autocorrelation(spec.classical, V, E, ct, spec.n_samples,
                                    spec.seed);

  for (const double hbar : hbar_list) {
    EigenBasis basis = eigensolve(spec.potential, spec.grid, spec.n_basis, hbar);
    build_v_matrix(basis, V.quantized);

    // Window beta - alpha = max(5 hbar w_local, 2 spacing); in 1D both
    // scale with the local level spacing, so half-width 2.5 spacings.
    std::size_t j_near = 0;
    for (std::size_t j = 1; j < basis.energies.size(); ++j)
      if (std::abs(basis.energies[j] - E) < std::abs(basis.energies[j_near] - E))
        j_near = j;
    const std::size_t jl = j_near > 0 ? j_near - 1 : 0;
    const std::size_t jr = std::min(basis.energies.size() - 1, j_near + 1);
    double spacing = jr > jl
                         ? (basis.energies[jr] - basis.energies[jl]) /
                               static_cast<double>(jr - jl)
                         : 1.0;
    double half = 2.5 * spacing;
    std::vector<int> window_states;
    for (int widen = 0; widen < 8 && window_states.empty(); ++widen, half *= 2.0) {
      for (std::size_t j = 0; j < basis.energies.size(); ++j)
        if (std::abs(basis.energies[j] - E) <= half)
          window_states.push_back(static_cast<int>(j));
    }
    if (window_states.empty())
      throw EmptyWindow("lr_fidelity_compare: no eigenvalue near E after widening");

    LRHbarResult res;
    res.hbar = hbar;
    res.n_states = static_cast<int>(window_states.size());
    res.window = EnergyWindow{E, E - half / 2.0, E + half / 2.0};
    res.F_quantum.assign(t_grid.size(), 0.0);
    for (const int j : window_states) {
      const std::vector<double> Fj =
          quantum_lr_fidelity(basis, V.quantized, j, lambda, t_grid);
      for (std::size_t i = 0; i < t_grid.size(); ++i) res.F_quantum[i] += Fj[i];
    }
    for (double& f : res.F_quantum) f /= static_cast<double>(res.n_states);
    res.F_classical = lr_fidelity_classical(rep.C, lambda, hbar, t_grid);
    res.F_heuristic = lr_fidelity_exponentiated(rep.C, lambda, hbar, t_grid);
    res.max_deviation = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      res.max_deviation = std::max(
          res.max_deviation, std::abs(res.F_quantum[i] - res.F_classical[i]));
    rep.per_hbar.push_back(std::move(res));
  }
  return rep;
}

double egorov_check(const HamiltonianModel& H0,
                    const std::function<double(double)>& potential,
                    const PerturbationModel& V, const Vec& z, double s,
                    double hbar, const Grid1D& grid, double dt) {
  const WavepacketGrid phi = coherent_state(z, hbar, grid);
  const WavepacketGrid psi =
      s == 0.0 ? phi
               : propagate_splitstep(
                     phi, [&](double x, double) { return potential(x); }, 0.0, s, dt);
  double expv = 0.0;
  for (std::size_t i = 0; i < psi.values.size(); ++i)
    expv += V.quantized(grid.x(static_cast<int>(i))) * std::norm(psi.values[i]);
  expv *= grid.dx();
  Vec zs = z;
  if (s != 0.0) {
    const Trajectory traj = integrate_trajectory(H0, z, s, dt);
    zs = traj.points.back();
  }
  return std::abs(expv - V.symbol(zs));
}

std::vector<SchnirelmanRow> schnirelman_diagnostic(
    const EigenBasis& basis, const EnergyWindow& window,
    const std::function<double(double)>& A, const HamiltonianModel& H0,
    std::uint64_t seed, int n_samples) {
  std::vector<SchnirelmanRow> rows;
  const double dx = basis.grid.dx();
  for (std::size_t j = 0; j < basis.energies.size(); ++j) {
    const double Ej = basis.energies[j];
    if (Ej < window.alpha_h || Ej > window.beta_h) continue;
    SchnirelmanRow r;
    r.j = static_cast<int>(j);
    r.E = Ej;
    double q = 0.0;
    for (std::size_t i = 0; i < basis.states[j].size(); ++i)
      q += A(basis.grid.x(static_cast<int>(i))) * basis.states[j][i] *
           basis.states[j][i];
    r.quantum = q * dx;
    const std::vector<Vec> samples = microcanonical_sample(H0, Ej, n_samples, seed);
    double c = 0.0;
    for (const Vec& zz : samples) c += A(zz[0]);
    r.classical = c / static_cast<double>(samples.size());
    r.deviation = std::abs(r.quantum - r.classical);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace sce
