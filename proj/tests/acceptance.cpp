// End-to-end acceptance checks for the semiclassical library: each
// criterion prints one PASS/FAIL line; the exit status is the number of
// failures.  Tolerances follow the verification plan in the README.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sce/fidelity.hpp"
#include "sce/metaplectic.hpp"
#include "sce/quantum_oracle.hpp"
#include "sce/revivals.hpp"

using namespace sce;

namespace {

int failures = 0;

void report(int num, const char* what, bool ok) {
  std::printf("criterion %2d (%s): %s\n", num, what, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  if (!ok) ++failures;
}

Vec point(double q, double p) {
  Vec z(2);
  z << q, p;
  return z;
}

Mat rotation(double th) {
  Mat R(2, 2);
  R << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
  return R;
}

Mat random_nonunit(int n, std::uint64_t seed, double min_dev) {
  for (;; seed += 7919) {
    const Mat F = random_symplectic(n, seed, 0.5);
    const Mat I = Mat::Identity(2 * n, 2 * n);
    if ((F.transpose() * F - I).cwiseAbs().maxCoeff() > min_dev) return F;
  }
}

// ---------------------------------------------------------------- 1

void criterion_1() {
  bool ok = true;
  int used = 0;
  for (std::uint64_t seed = 100; used < 10; ++seed) {
    const Mat F = random_symplectic(1, seed, 0.4);
    const double d = std::abs((Mat::Identity(2, 2) - F).determinant());
    if (d <= 0.1) continue;
    ++used;
    const double formula = mw_symbol(F, 1.0).prefactor_modulus;
    const double trace = metaplectic_trace(F, Vec(Vec::Zero(2)), 1.0);
    ok = ok && std::abs(trace - formula) / formula < 1e-2;
    const double integral = overlap_sq_integral(F, 1.0);
    ok = ok && std::abs(integral - 1.0 / d) * d < 1e-2;
  }
  report(1, "symbol modulus by trace and overlap integral", ok);
}

// ---------------------------------------------------------------- 2

void criterion_2() {
  bool ok = true;
  for (int i = 0; i < 10000 && ok; ++i) {
    const int n = 1 + i % 2;
    const Mat F = random_symplectic(n, 5000 + static_cast<std::uint64_t>(i), 0.8);
    const MWMatrices mw = mw_matrices(F);
    ok = ok && std::abs(mw.N.determinant()) >= 1.0 - 1e-10;
  }
  for (int i = 0; i < 1000 && ok; ++i) {
    const Mat F = random_symplectic(1, 90000 + static_cast<std::uint64_t>(i), 0.8);
    const MWMatrices mw = mw_matrices(F);
    const Vec z = point(std::cos(0.7 * i), std::sin(1.3 * i) - 0.2);
    const CVec zc = z.cast<Complex>();
    ok = ok && (zc.dot(mw.K * zc)).real() <= z.squaredNorm() + 1e-9;
  }
  report(2, "|det N| >= 1 and Re z.Kz <= |z|^2", ok);
}

// ---------------------------------------------------------------- 3

void criterion_3() {
  bool ok = true;
  for (int i = 0; i < 1000 && ok; ++i) {
    const double ct = mw_matrices(rotation(6.28 * i / 1000.0)).ct;
    ok = ok && std::abs(ct - 1.0) <= 1e-10;
  }
  for (int i = 0; i < 1000 && ok; ++i) {
    const Mat F = random_nonunit(1, 200000 + static_cast<std::uint64_t>(i), 1e-2);
    ok = ok && mw_matrices(F).ct < 1.0 - 1e-6;
  }
  // equivalence both ways on a mixed bag
  for (int i = 0; i < 300 && ok; ++i) {
    const Mat F = i % 3 == 0 ? rotation(0.02 * i)
                             : random_symplectic(1, 300000 + static_cast<std::uint64_t>(i), 0.5);
    const double ct = mw_matrices(F).ct;
    if (is_unitary_symplectic(F)) ok = ok && std::abs(ct - 1.0) <= 1e-10;
    if (ct > 1.0 - 1e-8) ok = ok && is_unitary_symplectic(F, 1e-4);
  }
  report(3, "prefactor equals 1 exactly on unitaries", ok);
}

// ---------------------------------------------------------------- 4

void criterion_4() {
  bool ok = true;
  const double hbar = 1.0;
  // (a) closed rotations and the split-step oracle
  const Vec a0 = point(0.9, -0.4);
  for (int k = 0; k <= 4 && ok; ++k) {
    const Complex v = rotation_overlap_exact(2 * M_PI * k, a0, hbar);
    ok = ok && std::abs(v - Complex(k % 2 ? -1.0 : 1.0, 0)) < 1e-12;
  }
  const Grid1D grid = Grid1D::full(12.0, 2048);
  const double Gs[5] = {0.6, 1.3, 2.2, 3.8, 5.1};
  const Vec als[5] = {point(1, 0), point(0.4, 0.8), point(-1.1, 0.2),
                      point(0, 1.3), point(0.7, -0.7)};
  for (int i = 0; i < 5 && ok; ++i) {
    const WavepacketGrid psi0 = coherent_state(als[i], hbar, grid);
    const WavepacketGrid psit = propagate_splitstep(
        psi0, [](double x, double) { return 0.5 * x * x; }, 0.0, Gs[i], 1e-4);
    ok = ok && std::abs(overlap(psi0, psit) -
                        rotation_overlap_exact(Gs[i], als[i], hbar)) < 1e-6;
  }
  report(4, "rotation overlaps: closed form vs grid oracle", ok);

  // (b) mean-zero dilation drive returns exactly after one period
  bool okb = true;
  FourierSeries g;
  g.cosc = {0.5};
  g.sinc = {0.2};
  g.omega = 2.0;
  const double T = M_PI;
  const HamiltonianModel dil = HamiltonianModel::dilation(g);
  for (int i = 0; i < 5 && okb; ++i) {
    const Vec al = point(1.2 * std::cos(2.1 * i + 0.3), std::sin(1.1 * i));
    const Trajectory tr = integrate_full(dil, al, T, 1e-5);
    okb = okb && (tr.stability.back() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8;
    okb = okb && std::abs(quadratic_return_exact(tr.stability.back(), al, hbar) - 1.0) < 1e-7;
  }
  report(4, "dilation revival at the drive period", okb);

  // (c) the c_t (1+K) quadratic form equals the exact B-route
  bool okc = true;
  int used = 0;
  for (std::uint64_t seed = 400000; used < 100; ++seed) {
    const Mat F = random_symplectic(1, seed, 0.8);
    if (std::abs((Mat::Identity(2, 2) - F).determinant()) < 0.05) continue;
    ++used;
    const Vec al = point(std::sin(0.9 * static_cast<double>(seed % 97)),
                         std::cos(1.7 * static_cast<double>(seed % 89)));
    ThawedGaussian tg;
    tg.center = F * al;
    tg.stability = F;
    tg.hbar = 0.6;
    tg.origin = al;
    okc = okc &&
          std::abs(return_probability_from(tg).R - quadratic_return_exact(F, al, 0.6)) < 1e-10;
  }
  report(4, "stability-matrix route equals exact quadratic route", okc);
}

// ---------------------------------------------------------------- 5

void criterion_5() {
  const double sets[3][2] = {{0.1, 0.55}, {0.2, 1.4}, {0.3, 0.8}};
  const double omega = 2.0, T = M_PI;
  bool ok_lattice = true, ok_grid = true;
  for (const auto& s : sets) {
    const double la = s[0], mu = s[1];
    const auto f = [la, mu](double t) { return la * std::cos(2 * t) + mu; };
    const FloquetData fd = floquet_analyze(f, omega);
    ok_lattice = ok_lattice && fd.stable;
    for (int k = 1; k <= 10; ++k)
      ok_lattice =
          ok_lattice && std::abs(std::abs(mathieu_overlap(fd, k * T)) - 1.0) <= 1e-6;

    // Prop. 4.1 modulus against grid propagation of the reference state
    const double hbar = 1.0;
    const MathieuReference ref = mathieu_reference_state(fd, hbar);
    const Grid1D grid = Grid1D::full(10.0, 2048);
    WavepacketGrid psi0;
    psi0.grid = grid;
    psi0.hbar = hbar;
    psi0.values.resize(static_cast<std::size_t>(grid.N));
    const double norm = std::pow(ref.a / (M_PI * hbar), 0.25);
    for (int j = 0; j < grid.N; ++j) {
      const double x = grid.x(j);
      psi0.values[static_cast<std::size_t>(j)] =
          norm * std::exp(-ref.a * x * x / (2 * hbar));
    }
    WavepacketGrid psi = psi0;
    double t_prev = 0.0;
    for (int i = 1; i <= 8; ++i) {
      const double t = T * i / 8.0;
      psi = propagate_splitstep(
          psi, [&f](double x, double tt) { return 0.5 * f(tt) * x * x; }, t_prev, t,
          5e-5);
      t_prev = t;
      ok_grid = ok_grid && std::abs(std::abs(overlap(psi0, psi)) -
                                    std::abs(mathieu_overlap(fd, t))) < 1e-4;
    }
  }
  report(5, "Floquet overlap lattice on stable Mathieu zones", ok_lattice);
  report(5, "Floquet overlap formula vs grid propagation", ok_grid);
  const double boundary = mathieu_zone_boundary(-0.4, omega, -0.2, 0.3);
  report(5, "lowest Mathieu zone boundary near -q^2/2",
         std::abs(boundary - (-0.02)) < 5e-3);
}

// ---------------------------------------------------------------- 6

void criterion_6() {
  const Grid1D half = Grid1D::half(14.0, 16384);
  const EigenBasis basis = eigensolve(
      [](double x) { return 0.5 * x * x + 1.0 / (x * x); }, half, 6, 1.0);
  bool ok_spec = true;
  for (int n = 0; n <= 5; ++n)
    ok_spec = ok_spec &&
              std::abs(basis.energies[static_cast<std::size_t>(n)] - (2.0 * n + 2.5)) < 1e-4;
  report(6, "singular oscillator spectrum E_n = 2n + a + 1", ok_spec);

  // time-dependent eigenstates in a stable zone
  const auto f = [](double t) { return 0.2 * std::cos(2 * t) + 1.4; };
  const FloquetData fd = floquet_analyze(f, 2.0);
  const double alpha = periodic_alpha(fd);
  const HillComplexSolution hcs = hill_complex_solution(f, alpha, M_PI, 1e-4, M_PI);
  std::vector<double> x(8192);
  const double dx = 16.0 / 8192;
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = (static_cast<double>(j) + 1) * dx;
  bool ok_state = hcs.u_periodic;
  for (const int n : {0, 1, 2}) {
    const auto a = singular_time_state(n, 1.0, hcs, 0, x);
    const auto b = singular_time_state(n, 1.0, hcs, hcs.times.size() - 1, x);
    double na = 0.0, nb = 0.0;
    Complex ov{0, 0};
    for (std::size_t j = 0; j < x.size(); ++j) {
      na += std::norm(a[j]);
      nb += std::norm(b[j]);
      ov += std::conj(a[j]) * b[j];
    }
    ok_state = ok_state && std::abs(std::sqrt(na * dx) - 1.0) < 1e-8;
    ok_state = ok_state && std::abs(std::sqrt(nb * dx) - 1.0) < 1e-8;
    ok_state = ok_state && std::abs(std::abs(ov) * dx - 1.0) < 1e-6;
  }
  report(6, "driven singular states keep norm and revive", ok_state);

  // angle equation residual theta_dot = exp(-2u)
  double max_res = 0.0;
  for (std::size_t i = 1; i + 1 < hcs.times.size(); ++i) {
    const double dt = hcs.times[i + 1] - hcs.times[i - 1];
    const double td = (hcs.theta[i + 1] - hcs.theta[i - 1]) / dt;
    max_res = std::max(max_res, std::abs(td - std::exp(-2 * hcs.u[i])));
  }
  report(6, "hill phase equation residual", max_res < 1e-6);
}

// ---------------------------------------------------------------- 7

void criterion_7() {
  const HamiltonianModel pend = HamiltonianModel::pendulum();
  const Vec alpha = point(1.5, 0.0);
  const double T = find_period(pend, alpha, 12.0, 1e-8).value();
  const Trajectory tr = integrate_full(pend, alpha, T, 1e-5);
  const Mat F = tr.stability.back();
  const Vec z = alpha - tr.points.back();
  const MWMatrices mw = mw_matrices(F);

  const Grid1D grid = Grid1D::full(7.0, 8192);
  std::vector<double> diff;
  for (const double hbar : {0.1, 0.05, 0.025, 0.0125}) {
    const CVec zc = z.cast<Complex>();
    const Complex quad = zc.dot((CMat::Identity(2, 2) + mw.K) * zc);
    const double r_semi = mw.ct * std::exp(-quad.real() / (4 * hbar));
    const WavepacketGrid psi0 = coherent_state(alpha, hbar, grid);
    const WavepacketGrid psiT = propagate_splitstep(
        psi0, [](double x, double) { return -std::cos(x); }, 0.0, T, 1e-4);
    const double r_oracle = std::abs(overlap(psi0, psiT));
    diff.push_back(std::abs(r_semi - r_oracle));
  }
  bool ok = true;
  for (std::size_t i = 1; i < diff.size(); ++i) ok = ok && diff[i] < diff[i - 1];
  report(7, "pendulum revival error decreases with hbar", ok);
}

// ---------------------------------------------------------------- 8

namespace mt {

EigenBasis two_level(double E0, double E1) {
  EigenBasis b;
  b.energies = {E0, E1};
  b.grid = Grid1D{0.0, 2.0, 2, false};
  const double inv = 1.0 / std::sqrt(b.grid.dx());
  b.states = {{inv, 0.0}, {0.0, inv}};
  return b;
}

}  // namespace mt

void criterion_8() {
  bool ok = true;
  const Grid1D grid = Grid1D::full(16.0, 8192);
  const std::function<double(double)> pots[2] = {
      [](double x) { return 0.5 * x * x; }, [](double x) { return 0.25 * x * x * x * x; }};
  std::vector<double> tg;
  for (int i = 1; i <= 24; ++i) tg.push_back(0.1 * i);
  for (const auto& V : pots) {
    const EigenBasis basis = eigensolve(V, grid, 40, 1.0);
    const Propagator U = basis_propagator(basis);
    const auto apply_H = [&V](const WavepacketGrid& p) {
      return apply_hamiltonian_fd(p, V);
    };
    std::vector<WavepacketGrid> states;
    WavepacketGrid eig;
    eig.grid = grid;
    eig.hbar = 1.0;
    eig.values.assign(basis.states[2].begin(), basis.states[2].end());
    states.push_back(eig);
    WavepacketGrid sup = eig;
    for (std::size_t j = 0; j < sup.values.size(); ++j)
      sup.values[j] = (basis.states[0][j] + basis.states[3][j]) / std::sqrt(2.0);
    states.push_back(sup);
    states.push_back(coherent_state(point(0.8, 0.0), 1.0, grid));
    for (const auto& psi : states) {
      bool any_valid = false;
      for (const auto& r : mandelstam_tamm(psi, apply_H, U, tg))
        if (r.valid) {
          any_valid = true;
          ok = ok && r.overlap_sq >= r.bound - 1e-8;
        }
      ok = ok && any_valid;
    }
  }
  report(8, "survival bound on 3 states x 2 potentials", ok);

  // exact saturation on a two-level superposition
  EigenBasis basis = mt::two_level(0.4, 1.1);
  WavepacketGrid psi;
  psi.grid = basis.grid;
  psi.hbar = 1.0;
  const double inv = 1.0 / std::sqrt(2.0 * basis.grid.dx());
  psi.values = {Complex(inv, 0), Complex(inv, 0)};
  const auto apply_H = [&basis](const WavepacketGrid& p) {
    WavepacketGrid out = p;
    out.values[0] *= basis.energies[0];
    out.values[1] *= basis.energies[1];
    return out;
  };
  bool ok_sat = true;
  for (const auto& r : mandelstam_tamm(psi, apply_H, basis_propagator(basis), tg))
    if (r.valid) ok_sat = ok_sat && std::abs(r.overlap_sq - r.bound) < 1e-10;
  report(8, "two-level state saturates the bound", ok_sat);
}

// ---------------------------------------------------------------- 9

void criterion_9() {
  std::vector<double> tg;
  for (int i = 0; i <= 16; ++i) tg.push_back(0.25 * i);

  // harmonic H0 with V = q at hbar = 0.02: closed-form check
  {
    LRCompareSpec spec;
    spec.potential = [](double x) { return 0.5 * x * x; };
    spec.classical = HamiltonianModel::harmonic();
    spec.grid = Grid1D::full(5.0, 16384);
    spec.n_basis = 170;
    spec.n_samples = 1500;
    spec.seed = 3;
    PerturbationModel V;
    V.symbol = [](const Vec& z) { return z(0); };
    V.quantized = [](double x) { return x; };
    const double E = 1.0, hbar = 0.02, lambda = 0.004;
    const LRComparison cmp = lr_fidelity_compare(spec, V, E, lambda, {hbar}, tg);
    const auto& F = cmp.per_hbar[0].F_quantum;
    const double scale = 4.0 * lambda * lambda * E / (hbar * hbar);  // max deficit
    bool ok = scale <= 0.2;
    for (std::size_t i = 0; i < tg.size(); ++i) {
      const double expect =
          1.0 - 2.0 * lambda * lambda * E * (1.0 - std::cos(tg[i])) / (hbar * hbar);
      ok = ok && std::abs(F[i] - expect) <= 0.03 * scale;
    }
    report(9, "harmonic linear-response echo closed form", ok);
  }

  // quartic H0 with V = q^2: quantum-classical deviation shrinks with hbar
  {
    LRCompareSpec spec;
    spec.potential = [](double x) { return 0.25 * x * x * x * x; };
    spec.classical = HamiltonianModel::quartic();
    spec.grid = Grid1D::full(6.0, 16384);
    spec.n_basis = 80;
    spec.n_samples = 3000;
    spec.seed = 5;
    PerturbationModel V;
    V.symbol = [](const Vec& z) { return z(0) * z(0); };
    V.quantized = [](double x) { return x * x; };
    const double E = 1.0, c = 0.25;
    std::vector<double> dev;
    for (const double hbar : {0.08, 0.04, 0.02}) {
      const LRComparison cmp =
          lr_fidelity_compare(spec, V, E, c * hbar, {hbar}, tg);
      dev.push_back(cmp.per_hbar[0].max_deviation);
    }
    report(9, "quartic deviation decreases across hbar",
           dev[1] < dev[0] && dev[2] < dev[1]);
  }
}

// ---------------------------------------------------------------- 10

void criterion_10() {
  const char* bin = std::getenv("SCE_BIN");
  if (bin == nullptr) {
    report(10, "byte-identical reruns across thread counts", false);
    return;
  }
  const std::string tmp = "/tmp/sce_acceptance";
  std::filesystem::create_directories(tmp);
  {
    std::ofstream f(tmp + "/scan.ini");
    f << "[hamiltonian]\nkind = pendulum\n[state]\nalpha = 1.4, 0.0\nhbar = 0.25\n"
         "[run]\nt_max = 15.0\nn_t = 300\nseed = 12\n";
  }
  auto run = [&](const std::string& args) {
    return WEXITSTATUS(
        std::system((std::string(bin) + " " + args + " > /dev/null 2>&1").c_str()));
  };
  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  bool ok = true;
  ok = ok && run("revival-scan --config " + tmp + "/scan.ini --out " + tmp +
                 "/a --threads 1") == 0;
  ok = ok && run("revival-scan --config " + tmp + "/scan.ini --out " + tmp +
                 "/b --threads 4") == 0;
  ok = ok && run("revival-scan --config " + tmp + "/scan.ini --out " + tmp +
                 "/c --threads 3") == 0;
  const std::string a = slurp(tmp + "/a/revival_scan.csv");
  ok = ok && !a.empty() && a == slurp(tmp + "/b/revival_scan.csv") &&
       a == slurp(tmp + "/c/revival_scan.csv");
  report(10, "byte-identical reruns across thread counts", ok);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%s (%d failure%s)\n", failures == 0 ? "ALL PASS" : "FAILURES",
              failures, failures == 1 ? "" : "s");
  return failures;
}
