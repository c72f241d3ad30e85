#include "sce/quantum_oracle.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>

#include "sce/metaplectic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sce {

namespace {

std::mutex fftw_plan_mutex;  // FFTW plan creation is not thread-safe

struct FftBuffer {
  int n = 0;
  fftw_complex* data = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit FftBuffer(int n_) : n(n_) {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    data = fftw_alloc_complex(static_cast<std::size_t>(n));
    fwd = fftw_plan_dft_1d(n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftBuffer() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(data);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
};

struct DstBuffer {
  int n = 0;
  double* data = nullptr;
  fftw_plan plan = nullptr;  // RODFT00 is its own inverse up to 2(n+1)

  explicit DstBuffer(int n_) : n(n_) {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    data = fftw_alloc_real(static_cast<std::size_t>(n));
    plan = fftw_plan_r2r_1d(n, data, data, FFTW_RODFT00, FFTW_ESTIMATE);
  }
  ~DstBuffer() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(plan);
    fftw_free(data);
  }
  DstBuffer(const DstBuffer&) = delete;
  DstBuffer& operator=(const DstBuffer&) = delete;
};

/// int exp(-A x^2 + B x + C) dx = sqrt(pi/A) exp(B^2/4A + C), Re A > 0.
Complex gauss_int(Complex A, Complex B, Complex C) {
  return std::sqrt(M_PI / A) * std::exp(B * B / (4.0 * A) + C);
}

/// <phi_z, T(w) g> for coherent phi_z and centered Gaussian
/// g(y) = (Im Cw/(pi hbar))^{1/4} exp(i Cw y^2/2hbar), n = 1.
Complex coherent_vs_displaced_gaussian(const Vec& z, const Vec& w, Complex Cw,
                                       double hbar) {
  const double qz = z(0), pz = z(1), qw = w(0), pw = w(1);
  const Complex i(0, 1);
  // conj(phi_z)(x) * e^{i pw (x - qw/2)/hbar} * g(x - qw)
  const Complex A = (1.0 - i * Cw) / (2.0 * hbar);
  const Complex B = (qz - i * (pz - pw)) / hbar - i * Cw * qw / hbar;
  const Complex C = (-qz * qz + i * (pz * qz - pw * qw)) / (2.0 * hbar) +
                    i * Cw * qw * qw / (2.0 * hbar);
  const double amp = std::pow(M_PI * hbar, -0.25) * std::pow(Cw.imag() / (M_PI * hbar), 0.25);
  return amp * gauss_int(A, B, C);
}

/// Width parameter of R(F) phi_0 for n = 1: C = (c + d i)/(a + b i).
Complex metaplectic_ground_width(const Mat& F) {
  const Complex i(0, 1);
  const Complex den = F(0, 0) + F(0, 1) * i;
  if (std::abs(den) < 1e-14)
    throw InternalInvariantViolated("metaplectic width: a + bC vanished");
  return (F(1, 0) + F(1, 1) * i) / den;
}

}  // namespace

double WavepacketGrid::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * grid.dx());
}

WavepacketGrid coherent_state(const Vec& alpha, double hbar, const Grid1D& grid) {
  if (alpha.size() != 2)
    throw DimensionError("coherent_state: grid oracle is 1D (alpha must be (q,p))");
  const double q = alpha(0), p = alpha(1);
  WavepacketGrid psi;
  psi.grid = grid;
  psi.hbar = hbar;
  psi.values.resize(static_cast<std::size_t>(grid.N));
  const double norm0 = std::pow(M_PI * hbar, -0.25);
  for (int j = 0; j < grid.N; ++j) {
    const double x = grid.x(j);
    psi.values[static_cast<std::size_t>(j)] =
        norm0 * std::exp(Complex(0, p * (x - 0.5 * q) / hbar)) *
        std::exp(-(x - q) * (x - q) / (2.0 * hbar));
  }
  const double tail = std::max(std::abs(psi.values.front()), std::abs(psi.values.back()));
  if (tail > 1e-12)
    throw GridError("coherent_state: Gaussian tail clipped at grid boundary");
  return psi;
}

WavepacketGrid gaussian_on_grid(const GaussianParams& par, const Grid1D& grid) {
  if (!(par.width.imag() > 0))
    throw std::invalid_argument("gaussian_on_grid: Im(width) must be > 0");
  WavepacketGrid psi;
  psi.grid = grid;
  psi.hbar = par.hbar;
  psi.values.resize(static_cast<std::size_t>(grid.N));
  const Complex i(0, 1);
  const double amp = std::pow(par.width.imag() / (M_PI * par.hbar), 0.25);
  const Complex global = std::exp(Complex(0, par.phase / par.hbar));
  for (int j = 0; j < grid.N; ++j) {
    const double x = grid.x(j) - par.q;
    psi.values[static_cast<std::size_t>(j)] =
        amp * global *
        std::exp(i * par.width * x * x / (2.0 * par.hbar) + i * par.p * x / par.hbar);
  }
  return psi;
}

WavepacketGrid propagate_splitstep(const WavepacketGrid& psi_in,
                                   const std::function<double(double, double)>& V,
                                   double t_begin, double t_end, double dt) {
  WavepacketGrid psi = psi_in;
  const int N = psi.grid.N;
  const double dx = psi.grid.dx();
  const double hbar = psi.hbar;
  const double norm_in = psi.norm();
  const int steps = std::max(1, static_cast<int>(std::llround((t_end - t_begin) / dt)));
  const double h = (t_end - t_begin) / steps;

  auto v_half = [&](double t_mid) {
    for (int j = 0; j < N; ++j)
      psi.values[static_cast<std::size_t>(j)] *=
          std::exp(Complex(0, -V(psi.grid.x(j), t_mid) * h / (2.0 * hbar)));
  };

  if (!psi.grid.half_line) {
    FftBuffer buf(N);
    std::vector<double> kin_phase(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
      const int m = j <= N / 2 ? j : j - N;
      const double k = 2.0 * M_PI * m / (N * dx);
      kin_phase[static_cast<std::size_t>(j)] = -hbar * k * k * h / 2.0;
    }
    for (int s = 0; s < steps; ++s) {
      const double t_mid = t_begin + (s + 0.5) * h;
      v_half(t_mid);
      std::memcpy(buf.data, psi.values.data(), sizeof(fftw_complex) * static_cast<std::size_t>(N));
      fftw_execute(buf.fwd);
      for (int j = 0; j < N; ++j) {
        const Complex ph = std::exp(Complex(0, kin_phase[static_cast<std::size_t>(j)]));
        const Complex v = Complex(buf.data[j][0], buf.data[j][1]) * ph / static_cast<double>(N);
        buf.data[j][0] = v.real();
        buf.data[j][1] = v.imag();
      }
      fftw_execute(buf.bwd);
      std::memcpy(psi.values.data(), buf.data, sizeof(fftw_complex) * static_cast<std::size_t>(N));
      v_half(t_mid);
    }
  } else {
    // Dirichlet half line: sine-basis kinetic step; k_m = pi m / L with
    // L = (N+1) dx, m = 1..N.
    DstBuffer re(N), im(N);
    const double L = (N + 1) * dx;
    std::vector<double> kin_phase(static_cast<std::size_t>(N));
    for (int m = 1; m <= N; ++m) {
      const double k = M_PI * m / L;
      kin_phase[static_cast<std::size_t>(m - 1)] = -hbar * k * k * h / 2.0;
    }
    const double scale = 1.0 / (2.0 * (N + 1));
    for (int s = 0; s < steps; ++s) {
      const double t_mid = t_begin + (s + 0.5) * h;
      v_half(t_mid);
      for (int j = 0; j < N; ++j) {
        re.data[j] = psi.values[static_cast<std::size_t>(j)].real();
        im.data[j] = psi.values[static_cast<std::size_t>(j)].imag();
      }
      fftw_execute(re.plan);
      fftw_execute(im.plan);
      for (int j = 0; j < N; ++j) {
        const Complex ph = std::exp(Complex(0, kin_phase[static_cast<std::size_t>(j)]));
        const Complex v = Complex(re.data[j], im.data[j]) * ph * scale;
        re.data[j] = v.real();
        im.data[j] = v.imag();
      }
      fftw_execute(re.plan);
      fftw_execute(im.plan);
      for (int j = 0; j < N; ++j)
        psi.values[static_cast<std::size_t>(j)] = Complex(re.data[j], im.data[j]);
      v_half(t_mid);
    }
  }

  if (std::abs(psi.norm() - norm_in) > 1e-6)
    throw NormLost("propagate_splitstep: norm drift exceeded 1e-6");
  return psi;
}

GaussianParams propagate_quadratic_exact(const GaussianParams& par, const Mat& F,
                                         const Vec& z_t, double delta_t) {
  if (F.rows() != 2) throw DimensionError("propagate_quadratic_exact: n = 1 only");
  GaussianParams out = par;
  const Complex den = F(0, 0) + F(0, 1) * par.width;
  if (std::abs(den) < 1e-14)
    throw InternalInvariantViolated("propagate_quadratic_exact: a + b C vanished");
  out.width = (F(1, 0) + F(1, 1) * par.width) / den;
  if (!(out.width.imag() > 0))
    throw InternalInvariantViolated("propagate_quadratic_exact: lost normalizability");
  out.q = z_t(0);
  out.p = z_t(1);
  out.phase = par.phase + delta_t;
  return out;
}

Complex overlap(const WavepacketGrid& a, const WavepacketGrid& b) {
  if (a.grid.N != b.grid.N || a.grid.half_line != b.grid.half_line ||
      std::abs(a.grid.dx() - b.grid.dx()) > 1e-14)
    throw GridError("overlap: grid mismatch");
  Complex s(0, 0);
  for (std::size_t j = 0; j < a.values.size(); ++j)
    s += std::conj(a.values[j]) * b.values[j];
  return s * a.grid.dx();
}

EigenBasis eigensolve(const std::function<double(double)>& V, const Grid1D& grid,
                      int k, double hbar) {
  const int N = grid.N;
  if (k < 1 || k > N) throw std::invalid_argument("eigensolve: bad k");
  const double dx = grid.dx();
  std::vector<double> diag(static_cast<std::size_t>(N));
  std::vector<double> off(static_cast<std::size_t>(N - 1),
                          -hbar * hbar / (2.0 * dx * dx));
  for (int j = 0; j < N; ++j)
    diag[static_cast<std::size_t>(j)] = hbar * hbar / (dx * dx) + V(grid.x(j));

  std::vector<double> w(static_cast<std::size_t>(N));
  std::vector<double> zmat(static_cast<std::size_t>(N) * static_cast<std::size_t>(k));
  std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * k));
  lapack_int m = 0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'I', N, diag.data(), off.data(), 0.0, 0.0, 1, k,
      0.0, &m, w.data(), zmat.data(), N, isuppz.data());
  if (info != 0 || m < k) throw std::runtime_error("eigensolve: LAPACK dstevr failed");

  EigenBasis basis;
  basis.grid = grid;
  basis.hbar = hbar;
  basis.energies.assign(w.begin(), w.begin() + k);
  basis.states.resize(static_cast<std::size_t>(k));
  const double inv_sqrt_dx = 1.0 / std::sqrt(dx);
  for (int j = 0; j < k; ++j) {
    auto& st = basis.states[static_cast<std::size_t>(j)];
    st.resize(static_cast<std::size_t>(N));
    for (int x = 0; x < N; ++x)
      st[static_cast<std::size_t>(x)] =
          zmat[static_cast<std::size_t>(j) * N + x] * inv_sqrt_dx;
    // sign convention: first significant sample positive
    for (int x = 0; x < N; ++x)
      if (std::abs(st[static_cast<std::size_t>(x)]) > 1e-8) {
        if (st[static_cast<std::size_t>(x)] < 0)
          for (auto& v : st) v = -v;
        break;
      }
    // On the half line the x -> 0 end is a hard Dirichlet wall; amplitude
    // approaching it (e.g. x^{a+1/2} falloff of a 1/x^2 potential) is
    // expected, so only the outer edge indicates a confinement failure.
    const double tail =
        (grid.half_line ? std::abs(st.back())
                        : std::max(std::abs(st.front()), std::abs(st.back()))) *
        std::sqrt(dx);
    if (tail > 1e-8)
      throw NotConfining("eigensolve: state " + std::to_string(j) +
                         " touches the grid boundary");
  }
  return basis;
}

void build_v_matrix(EigenBasis& basis, const std::function<double(double)>& V_pert) {
  const int k = static_cast<int>(basis.states.size());
  const int N = basis.grid.N;
  std::vector<double> vx(static_cast<std::size_t>(N));
  for (int x = 0; x < N; ++x) vx[static_cast<std::size_t>(x)] = V_pert(basis.grid.x(x));
  basis.V_matrix = CMat::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      double s = 0.0;
      const auto& sa = basis.states[static_cast<std::size_t>(a)];
      const auto& sb = basis.states[static_cast<std::size_t>(b)];
      for (int x = 0; x < N; ++x)
        s += sa[static_cast<std::size_t>(x)] * vx[static_cast<std::size_t>(x)] *
             sb[static_cast<std::size_t>(x)];
      basis.V_matrix(a, b) = basis.V_matrix(b, a) = s * basis.grid.dx();
    }
}

WignerMap wigner(const WavepacketGrid& psi) {
  const int N = psi.grid.N;
  const double dx = psi.grid.dx();
  const double hbar = psi.hbar;
  WignerMap map;
  map.q.resize(static_cast<std::size_t>(N));
  map.p.resize(static_cast<std::size_t>(N));
  map.W.assign(static_cast<std::size_t>(N), std::vector<double>(static_cast<std::size_t>(N)));
  for (int j = 0; j < N; ++j) {
    map.q[static_cast<std::size_t>(j)] = psi.grid.x(j);
    map.p[static_cast<std::size_t>(j)] = M_PI * hbar * (j - N / 2) / (N * dx);
  }

  FftBuffer buf(N);
  auto at = [&](int idx) -> Complex {
    return idx >= 0 && idx < N ? psi.values[static_cast<std::size_t>(idx)] : Complex(0, 0);
  };
  for (int j = 0; j < N; ++j) {
    // f(m) = conj(psi(q + m dx)) psi(q - m dx), y = 2 m dx
    for (int m = 0; m < N; ++m) {
      const int ms = m < N / 2 ? m : m - N;  // FFT index convention
      const Complex f = std::conj(at(j + ms)) * at(j - ms);
      buf.data[m][0] = f.real();
      buf.data[m][1] = f.imag();
    }
    fftw_execute(buf.bwd);  // sum_m f(m) e^{+2 pi i k m/N}
    for (int kk = 0; kk < N; ++kk) {
      const int ks = (kk + N / 2) % N;  // center p = 0
      const Complex w = Complex(buf.data[ks][0], buf.data[ks][1]);
      // e^{i p y/hbar} with p_k = pi hbar (k - N/2)/(N dx), y = 2 m dx
      map.W[static_cast<std::size_t>(j)][static_cast<std::size_t>(
          (kk))] = w.real() * (2.0 * dx) / (2.0 * M_PI * hbar);
    }
  }
  return map;
}

double metaplectic_trace(const Mat& F, const Vec& X, double hbar,
                         double z_half_width, int z_points) {
  if (F.rows() != 2) throw DimensionError("metaplectic_trace: n = 1 only");
  const Mat I = Mat::Identity(2, 2);
  const Complex Cw = metaplectic_ground_width(F);
  const Complex i(0, 1);

  // Integrand decays like exp(-|(F-1)z - X|^2 / c hbar); center the grid
  // on the stationary point and scale by the smallest singular value.
  const Mat FmI = F - I;
  Eigen::JacobiSVD<Mat> svd(FmI);
  const double smin = svd.singularValues().minCoeff();
  if (smin < 1e-8)
    throw EigenvalueOneError("metaplectic_trace: F has 1 as eigenvalue");
  const Vec z_center = FmI.inverse() * X;
  const double half = z_half_width * std::sqrt(hbar) / std::min(1.0, smin);
  const double dz = 2.0 * half / z_points;

  Complex total(0, 0);
  double boundary_mag = 0.0, interior_mag = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : boundary_mag, interior_mag)
#endif
  for (int a = 0; a < z_points; ++a) {
    Complex row_sum(0, 0);
    for (int b = 0; b < z_points; ++b) {
      Vec z(2);
      z(0) = z_center(0) - half + (a + 0.5) * dz;
      z(1) = z_center(1) - half + (b + 0.5) * dz;
      const Vec Fz = F * z;
      const Vec w = Fz - X;
      const double phase = symplectic_form(X, Fz) / (2.0 * hbar);
      const Complex val =
          std::exp(i * phase) * coherent_vs_displaced_gaussian(z, w, Cw, hbar);
      row_sum += val;
      if (a == 0 || b == 0 || a == z_points - 1 || b == z_points - 1)
        boundary_mag += std::abs(val);
      else
        interior_mag += std::abs(val);
    }
#ifdef _OPENMP
#pragma omp critical(sce_mw_trace)
#endif
    total += row_sum;
  }
  if (boundary_mag > 1e-4 * (interior_mag + 1e-300))
    throw GridError("metaplectic_trace: truncation tail too large, widen z grid");
  return std::abs(total) * dz * dz / (2.0 * M_PI * hbar);
}

double overlap_sq_integral(const Mat& F, double hbar, double z_half_width,
                           int z_points) {
  if (F.rows() != 2) throw DimensionError("overlap_sq_integral: n = 1 only");
  const Mat I = Mat::Identity(2, 2);
  const Complex Cw = metaplectic_ground_width(F);
  const Mat FmI = F - I;
  Eigen::JacobiSVD<Mat> svd(FmI);
  const double smin = svd.singularValues().minCoeff();
  if (smin < 1e-8)
    throw EigenvalueOneError("overlap_sq_integral: F has 1 as eigenvalue");
  const double half = z_half_width * std::sqrt(hbar) / std::min(1.0, smin);
  const double dz = 2.0 * half / z_points;

  double total = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : total)
#endif
  for (int a = 0; a < z_points; ++a) {
    double row = 0.0;
    for (int b = 0; b < z_points; ++b) {
      Vec z(2);
      z(0) = -half + (a + 0.5) * dz;
      z(1) = -half + (b + 0.5) * dz;
      row += std::norm(coherent_vs_displaced_gaussian(z, Vec(F * z), Cw, hbar));
    }
    total += row;
  }
  return total * dz * dz / (2.0 * M_PI * hbar);
}

CMat heisenberg_matrix(const EigenBasis& basis, double t, double hbar) {
  if (basis.V_matrix.size() == 0)
    throw std::runtime_error("heisenberg_matrix: V_matrix not built");
  const int k = static_cast<int>(basis.energies.size());
  CMat out(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      out(a, b) = std::exp(Complex(0, (basis.energies[static_cast<std::size_t>(a)] -
                                       basis.energies[static_cast<std::size_t>(b)]) *
                                          t / hbar)) *
                  basis.V_matrix(a, b);
  return out;
}

void dump_wavepacket(const WavepacketGrid& psi, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("dump_wavepacket: cannot open " + path);
  char header[32] = {};
  std::memcpy(header, "SCQO", 4);
  const std::uint32_t version = 1;
  const std::uint32_t n = static_cast<std::uint32_t>(psi.grid.N);
  const double dx = psi.grid.dx();
  std::memcpy(header + 4, &version, 4);
  std::memcpy(header + 8, &n, 4);
  std::memcpy(header + 16, &dx, 8);
  std::memcpy(header + 24, &psi.hbar, 8);
  std::fwrite(header, 1, 32, f);
  for (const auto& v : psi.values) {
    const double re = v.real(), im = v.imag();
    std::fwrite(&re, 8, 1, f);
    std::fwrite(&im, 8, 1, f);
  }
  std::fclose(f);
}

WavepacketGrid load_wavepacket(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("load_wavepacket: cannot open " + path);
  char header[32];
  if (std::fread(header, 1, 32, f) != 32 || std::memcmp(header, "SCQO", 4) != 0) {
    std::fclose(f);
    throw std::runtime_error("load_wavepacket: bad header");
  }
  std::uint32_t n = 0;
  double dx = 0, hbar = 0;
  std::memcpy(&n, header + 8, 4);
  std::memcpy(&dx, header + 16, 8);
  std::memcpy(&hbar, header + 24, 8);
  WavepacketGrid psi;
  psi.grid.N = static_cast<int>(n);
  psi.grid.x_min = -0.5 * dx * n;
  psi.grid.x_max = 0.5 * dx * n;
  psi.hbar = hbar;
  psi.values.resize(n);
  for (auto& v : psi.values) {
    double re = 0, im = 0;
    if (std::fread(&re, 8, 1, f) != 1 || std::fread(&im, 8, 1, f) != 1) {
      std::fclose(f);
      throw std::runtime_error("load_wavepacket: truncated file");
    }
    v = Complex(re, im);
  }
  std::fclose(f);
  return psi;
}

void dump_wavepacket_csv(const WavepacketGrid& psi, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("dump_wavepacket_csv: cannot open " + path);
  std::fprintf(f, "# N=%d dx=%.17g hbar=%.17g\nx,re,im\n", psi.grid.N,
               psi.grid.dx(), psi.hbar);
  for (int j = 0; j < psi.grid.N; ++j)
    std::fprintf(f, "%.17g,%.17g,%.17g\n", psi.grid.x(j),
                 psi.values[static_cast<std::size_t>(j)].real(),
                 psi.values[static_cast<std::size_t>(j)].imag());
  std::fclose(f);
}

}  // namespace sce
