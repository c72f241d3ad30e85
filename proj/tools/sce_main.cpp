// Batch front door: sce <subcommand> --config <file> [--out <dir>]
// [--threads N] [--seed S].  One scenario per invocation; every CSV
// starts with the resolved config as '#' comments; all floats are
// printed with 17 significant digits so reruns are byte-identical.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sce/fidelity.hpp"
#include "sce/metaplectic.hpp"
#include "sce/quantum_oracle.hpp"
#include "sce/revivals.hpp"
#include "sce/scenario.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace sce;
using nlohmann::json;

constexpr const char* kVersion = "sce 1.0.0";

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Scenario& sc,
            const std::string& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
    out_ << "# " << kVersion << "\n";
    std::istringstream cfg(sc.resolved());
    std::string line;
    while (std::getline(cfg, line)) out_ << "# " << line << "\n";
    out_ << columns << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

std::vector<double> time_grid(const Scenario& sc, double def_tmax, long def_nt) {
  const double t_max = sc.get_num("run", "t_max", def_tmax);
  const long n_t = sc.get_int("run", "n_t", def_nt);
  if (!(t_max > 0) || n_t < 1) throw ConfigError("need t_max > 0 and n_t >= 1");
  std::vector<double> t(static_cast<std::size_t>(n_t));
  for (long i = 0; i < n_t; ++i)
    t[static_cast<std::size_t>(i)] = t_max * (i + 1) / static_cast<double>(n_t);
  return t;
}

Vec state_alpha(const Scenario& sc) {
  const std::vector<double> a = sc.get_list("state", "alpha");
  if (a.size() != 2) throw ConfigError("state.alpha must have two entries (q p)");
  Vec v(2);
  v << a[0], a[1];
  return v;
}

double state_hbar(const Scenario& sc) {
  const double hbar = sc.get_num("state", "hbar", 1.0);
  if (!(hbar > 0)) throw ConfigError("state.hbar must be > 0");
  return hbar;
}

// ---------------------------------------------------------------- mw-verify

int cmd_mw_verify(const Scenario& sc, const std::filesystem::path& out) {
  const double hbar = sc.get_num("run", "hbar", 1.0);
  const long n_random = sc.get_int("run", "n_random", 4);
  const auto seed = static_cast<std::uint64_t>(sc.get_int("run", "seed", 1));
  const double spread = sc.get_num("run", "spread", 0.4);
  const double zhw = sc.get_num("run", "z_half_width", 8.0);
  const long zp = sc.get_int("run", "z_points", 160);

  std::vector<std::pair<std::string, Mat>> cases;
  cases.emplace_back("minus_identity", -Mat::Identity(2, 2));
  cases.emplace_back("quarter_rotation", rotation_matrix(M_PI / 2.0));
  for (long k = 0; k < n_random; ++k) {
    Mat F;
    std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    do {
      F = random_symplectic(1, s, spread);
      s += 1000;
    } while (std::abs((Mat::Identity(2, 2) - F).determinant()) <= 0.1);
    cases.emplace_back("random_" + std::to_string(k), F);
  }

  CsvWriter csv(out / "mw_verify.csv", sc,
                "id,det_one_minus_F,omega_formula,omega_trace,"
                "integral_target,integral_check,rel_err");
  bool pass = true;
  for (const auto& [id, F] : cases) {
    const double d = std::abs((Mat::Identity(2, 2) - F).determinant());
    const double formula = mw_symbol(F, hbar).prefactor_modulus;
    const double trace = metaplectic_trace(F, Vec::Zero(2), hbar, zhw,
                                           static_cast<int>(zp));
    const double target = 1.0 / d;
    const double integral = overlap_sq_integral(F, hbar, zhw, static_cast<int>(zp));
    const double rel = std::max(std::abs(trace - formula) / formula,
                                std::abs(integral - target) / target);
    pass = pass && rel < 1e-2;
    csv.row({id, fmt17(d), fmt17(formula), fmt17(trace), fmt17(target),
             fmt17(integral), fmt17(rel)});
  }
  return pass ? 0 : 4;
}

// -------------------------------------------------------------- revival-scan

int cmd_revival_scan(const Scenario& sc, const std::filesystem::path& out) {
  const HamiltonianModel H = sc.hamiltonian();
  const Vec alpha = state_alpha(sc);
  const double hbar = state_hbar(sc);
  const std::vector<double> t_grid = time_grid(sc, 2.0 * M_PI, 256);

  RevivalScanOptions opt;
  opt.dt = sc.get_num("run", "dt", 1e-3);
  opt.epsilon = sc.get_num("run", "epsilon", 0.01);
  const bool want_exact = sc.get_bool("run", "quadratic_exact", false);
  const bool want_oracle = sc.get_bool("run", "oracle", false);

  const RevivalReport semi = revival_scan(H, alpha, hbar, t_grid, opt);
  RevivalReport exact;
  if (want_exact) {
    RevivalScanOptions o2 = opt;
    o2.quadratic_exact = true;
    exact = revival_scan(H, alpha, hbar, t_grid, o2);
  }

  std::vector<double> oracle;
  if (want_oracle) {
    if (!sc.potential_form())
      throw GridError("oracle propagation needs a kinetic + potential Hamiltonian");
    const double hw = sc.get_num("run", "grid_half_width", 16.0);
    const long np = sc.get_int("run", "grid_points", 2048);
    const double odt = sc.get_num("run", "oracle_dt", 2e-4);
    const Grid1D grid = sc.get_str("hamiltonian", "kind") == "singular"
                            ? Grid1D::half(hw, static_cast<int>(np))
                            : Grid1D::full(hw, static_cast<int>(np));
    const auto V = sc.potential();
    const WavepacketGrid psi0 = coherent_state(alpha, hbar, grid);
    WavepacketGrid psi = psi0;
    double t_prev = 0.0;
    oracle.reserve(t_grid.size());
    for (const double t : t_grid) {
      psi = propagate_splitstep(psi, V, t_prev, t, odt);
      t_prev = t;
      oracle.push_back(std::abs(overlap(psi0, psi)));
    }
  }

  std::string cols = "t,R_semiclassical";
  if (want_exact) cols += ",R_exact_quadratic";
  if (want_oracle) cols += ",R_oracle";
  cols += ",ct,theta";
  CsvWriter csv(out / "revival_scan.csv", sc, cols);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    std::vector<std::string> cells{fmt17(t_grid[i]), fmt17(semi.R[i])};
    if (want_exact) cells.push_back(fmt17(exact.R[i]));
    if (want_oracle) cells.push_back(fmt17(oracle[i]));
    cells.push_back(fmt17(semi.ct[i]));
    cells.push_back(fmt17(semi.rotation_angle[i]));
    csv.row(cells);
  }

  const RevivalReport& best = want_exact ? exact : semi;
  json j;
  j["version"] = kVersion;
  j["epsilon"] = opt.epsilon;
  j["revival_times"] = best.revival_times;
  std::ofstream(out / "revival_scan.json") << j.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------------ floquet

int cmd_floquet(const Scenario& sc, const std::filesystem::path& out) {
  const double omega = sc.get_num("run", "omega", 2.0);
  const double dt = sc.get_num("run", "dt", 1e-4);
  const long nf = sc.get_int("run", "n_fourier", 32);
  auto axis = [&](const char* name, double def_lo, double def_hi, long def_n) {
    const double lo = sc.get_num("run", std::string(name) + "_min", def_lo);
    const double hi = sc.get_num("run", std::string(name) + "_max", def_hi);
    const long n = sc.get_int("run", std::string(name) + "_n", def_n);
    std::vector<double> v;
    for (long i = 0; i < n; ++i)
      v.push_back(n > 1 ? lo + (hi - lo) * i / static_cast<double>(n - 1) : lo);
    return v;
  };
  const std::vector<double> lambdas = axis("lambda", 0.0, 0.5, 6);
  const std::vector<double> mus = axis("mu", 0.1, 2.0, 20);

  CsvWriter csv(out / "floquet.csv", sc, "lambda,mu,trace,stable,rho");
  for (const double la : lambdas)
    for (const double mu : mus) {
      const auto f = [la, mu, omega](double t) {
        return la * std::cos(omega * t) + mu;
      };
      const FloquetData fd =
          floquet_analyze(f, omega, dt, static_cast<int>(nf));
      csv.row({fmt17(la), fmt17(mu), fmt17(fd.monodromy.trace()),
               fd.stable ? "1" : "0", fmt17(fd.rho)});
    }

  if (sc.get_bool("run", "boundary", false)) {
    const double mu_lo = sc.get_num("run", "boundary_mu_lo");
    const double mu_hi = sc.get_num("run", "boundary_mu_hi");
    CsvWriter bcsv(out / "floquet_boundary.csv", sc, "lambda,mu_boundary");
    for (const double la : lambdas)
      bcsv.row({fmt17(la), fmt17(mathieu_zone_boundary(la, omega, mu_lo, mu_hi, dt))});
  }
  return 0;
}

// -------------------------------------------------------------- fidelity-lr

PerturbationModel perturbation_from(const Scenario& sc) {
  const std::string kind = sc.get_str("perturbation", "kind");
  PerturbationModel V;
  V.lambda = sc.get_num("perturbation", "lambda");
  if (kind == "q") {
    V.symbol = [](const Vec& z) { return z(0); };
    V.quantized = [](double x) { return x; };
  } else if (kind == "q_squared") {
    V.symbol = [](const Vec& z) { return z(0) * z(0); };
    V.quantized = [](double x) { return x * x; };
  } else {
    throw ConfigError("unknown perturbation kind: " + kind);
  }
  return V;
}

int cmd_fidelity_lr(const Scenario& sc, const std::filesystem::path& out) {
  const PerturbationModel V = perturbation_from(sc);
  std::vector<double> hbars;
  if (sc.has("state", "hbar_list"))
    hbars = sc.get_list("state", "hbar_list");
  else
    hbars = {state_hbar(sc)};
  for (const double h : hbars)
    if (!(h > 0)) throw ConfigError("hbar values must be > 0");

  LRCompareSpec spec;
  const auto pot = sc.potential();
  spec.potential = [pot](double x) { return pot(x, 0.0); };
  spec.classical = sc.hamiltonian();
  if (spec.classical.time_dependent)
    throw ConfigError("fidelity-lr needs an autonomous Hamiltonian");
  spec.grid = Grid1D::full(sc.get_num("run", "grid_half_width", 12.0),
                           static_cast<int>(sc.get_int("run", "grid_points", 2048)));
  spec.n_basis = static_cast<int>(sc.get_int("run", "n_basis", 160));
  spec.n_samples = static_cast<int>(sc.get_int("run", "n_samples", 2000));
  spec.seed = static_cast<std::uint64_t>(sc.get_int("run", "seed", 1));
  const double E = sc.get_num("run", "E");

  std::vector<double> t_grid = time_grid(sc, 2.0 * M_PI, 64);
  t_grid.insert(t_grid.begin(), 0.0);

  const LRComparison rep =
      lr_fidelity_compare(spec, V, E, V.lambda, hbars, t_grid);

  CsvWriter csv(out / "fidelity_lr.csv", sc,
                "t,F_quantum_avg,F_classical,F_heuristic,deviation,n_states,hbar");
  json summary;
  summary["version"] = kVersion;
  summary["seed"] = spec.seed;
  summary["n_samples"] = spec.n_samples;
  summary["heuristic_column"] =
      "exponentiated double integral of C; diagnostic only";
  summary["window_note"] =
      "all window states used; no density-one subsequence selection";
  for (const LRHbarResult& r : rep.per_hbar) {
    for (std::size_t i = 0; i < rep.t.size(); ++i)
      csv.row({fmt17(rep.t[i]), fmt17(r.F_quantum[i]), fmt17(r.F_classical[i]),
               fmt17(r.F_heuristic[i]),
               fmt17(std::abs(r.F_quantum[i] - r.F_classical[i])),
               std::to_string(r.n_states), fmt17(r.hbar)});
    summary["max_deviation"][fmt17(r.hbar)] = r.max_deviation;
  }
  std::ofstream(out / "fidelity_lr.json") << summary.dump(2) << "\n";

  if (sc.has("mt", "state")) {
    const double hbar = hbars.front();
    EigenBasis basis = eigensolve(spec.potential, spec.grid,
                                  spec.n_basis, hbar);
    const std::string st = sc.get_str("mt", "state");
    WavepacketGrid psi;
    psi.grid = spec.grid;
    psi.hbar = hbar;
    psi.values.assign(static_cast<std::size_t>(spec.grid.N), Complex(0, 0));
    const double dx = spec.grid.dx();
    auto add_state = [&](long j, double w) {
      if (j < 0 || static_cast<std::size_t>(j) >= basis.states.size())
        throw ConfigError("mt state index out of range");
      for (std::size_t i = 0; i < psi.values.size(); ++i)
        psi.values[i] += w * basis.states[static_cast<std::size_t>(j)][i];
    };
    if (st == "eigen") {
      add_state(sc.get_int("mt", "j", 0), 1.0);
    } else if (st == "super") {
      add_state(sc.get_int("mt", "j", 0), std::sqrt(0.5));
      add_state(sc.get_int("mt", "k", 1), std::sqrt(0.5));
    } else if (st == "coherent") {
      const WavepacketGrid phi = coherent_state(state_alpha(sc), hbar, spec.grid);
      // Projected onto the truncated basis so the exact basis
      // propagator applies.
      for (const auto& s : basis.states) {
        Complex c(0, 0);
        for (std::size_t i = 0; i < phi.values.size(); ++i)
          c += s[i] * phi.values[i];
        c *= dx;
        for (std::size_t i = 0; i < psi.values.size(); ++i)
          psi.values[i] += c * s[i];
      }
    } else {
      throw ConfigError("mt.state must be eigen, super or coherent");
    }
    const auto applyH = [&](const WavepacketGrid& w) {
      return apply_hamiltonian_fd(w, spec.potential);
    };
    const auto rows =
        mandelstam_tamm(psi, applyH, basis_propagator(basis), t_grid);
    CsvWriter mt(out / "mandelstam_tamm.csv", sc, "t,overlap_sq,bound,valid");
    for (const auto& r : rows)
      mt.row({fmt17(r.t), fmt17(r.overlap_sq), fmt17(r.bound),
              r.valid ? "1" : "0"});
  }
  return 0;
}

// ----------------------------------------------------------------- singular

int cmd_singular(const Scenario& sc, const std::filesystem::path& out) {
  if (sc.get_str("hamiltonian", "kind") != "singular")
    throw ConfigError("singular subcommand needs hamiltonian kind = singular");
  const FourierSeries f = sc.get_fourier("hamiltonian", "f");
  const double g = sc.get_num("hamiltonian", "g");
  const long n = sc.get_int("run", "n", 0);
  const double dt = sc.get_num("run", "dt", 1e-4);
  const double T = f.period();
  const long n_periods = sc.get_int("run", "n_periods", 1);
  const long n_t = sc.get_int("run", "n_t", 64);
  const double x_max = sc.get_num("run", "x_max", 16.0);
  const long np = sc.get_int("run", "grid_points", 1024);

  const auto fdrive = [f](double t) { return f(t); };
  double alpha;
  if (sc.has("run", "alpha")) {
    alpha = sc.get_num("run", "alpha");
  } else {
    // Default: the initial modulus whose u(t) is drive-periodic.
    const FloquetData fd = floquet_analyze(fdrive, f.omega, dt);
    alpha = periodic_alpha(fd);
  }

  const double t_max = T * static_cast<double>(n_periods);
  const HillComplexSolution hcs =
      hill_complex_solution(fdrive, alpha, t_max, dt, T);

  const Grid1D grid = Grid1D::half(x_max, static_cast<int>(np));
  std::vector<double> xs(static_cast<std::size_t>(grid.N));
  for (int i = 0; i < grid.N; ++i) xs[static_cast<std::size_t>(i)] = grid.x(i);

  const std::vector<Complex> psi0_v =
      singular_time_state(static_cast<int>(n), g, hcs, 0, xs);
  WavepacketGrid psi0;
  psi0.grid = grid;
  psi0.hbar = 1.0;
  psi0.values = psi0_v;
  const double g2 = g * g;
  const auto V = [f, g2](double x, double t) {
    return 0.5 * f(t) * x * x + g2 / (x * x);
  };

  const std::size_t last = hcs.times.size() - 1;
  CsvWriter csv(out / "singular.csv", sc,
                "t,overlap_formula,overlap_oracle,u,udot,theta,eq_residual");
  WavepacketGrid psi = psi0;
  double t_prev = 0.0;
  const double hstep = hcs.times[1] - hcs.times[0];
  for (long k = 1; k <= n_t; ++k) {
    const double t = t_max * static_cast<double>(k) / static_cast<double>(n_t);
    const auto idx = std::min(last, static_cast<std::size_t>(std::llround(t / hstep)));
    const double ts = hcs.times[idx];

    WavepacketGrid ft = psi0;
    ft.values = singular_time_state(static_cast<int>(n), g, hcs, idx, xs);
    const double formula = std::abs(overlap(psi0, ft));

    psi = propagate_splitstep(psi, V, t_prev, ts, dt);
    t_prev = ts;
    const double oracle = std::abs(overlap(psi0, psi));

    // Wronskian identity theta' = exp(-2u), theta' by central difference.
    double res = 0.0;
    if (idx > 0 && idx < last) {
      const double thdot =
          (hcs.theta[idx + 1] - hcs.theta[idx - 1]) / (2.0 * hstep);
      res = std::abs(thdot - std::exp(-2.0 * hcs.u[idx]));
    }
    csv.row({fmt17(ts), fmt17(formula), fmt17(oracle), fmt17(hcs.u[idx]),
             fmt17(hcs.udot[idx]), fmt17(hcs.theta[idx]), fmt17(res)});
  }
  return 0;
}

int dispatch(const std::string& cmd, const std::string& config,
             const std::string& out_dir, long threads, long seed) {
  if (threads <= 0) {
    if (const char* env = std::getenv("SCE_THREADS")) threads = std::atol(env);
  }
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
#endif
  Scenario sc = Scenario::load(config);
  if (seed >= 0) sc.set("run", "seed", std::to_string(seed));
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  if (cmd == "mw-verify") return cmd_mw_verify(sc, out);
  if (cmd == "revival-scan") return cmd_revival_scan(sc, out);
  if (cmd == "floquet") return cmd_floquet(sc, out);
  if (cmd == "fidelity-lr") return cmd_fidelity_lr(sc, out);
  if (cmd == "singular") return cmd_singular(sc, out);
  throw ConfigError("unknown subcommand: " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical dynamics toolbox"};
  app.require_subcommand(1);
  std::string config, out_dir = ".";
  long threads = 0, seed = -1;
  for (const char* name :
       {"mw-verify", "revival-scan", "floquet", "fidelity-lr", "singular"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "scenario file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (or SCE_THREADS)");
    sub->add_option("--seed", seed, "override the scenario seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return dispatch(cmd, config, out_dir, threads, seed);
  } catch (const sce::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sce::GridError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return 4;
  } catch (const sce::NormLost& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return 4;
  } catch (const sce::NotConfining& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
