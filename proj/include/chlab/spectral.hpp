#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "chlab/grid.hpp"

namespace chlab {

namespace detail {

// FFTW planner calls are not thread-safe; executions on private buffers are.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class SpectralEngine {
 public:
  explicit SpectralEngine(int n)
      : n_(n),
        real_(fftw_alloc_real(static_cast<std::size_t>(n))),
        cplx_(fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1))) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, cplx_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(n, cplx_, real_, FFTW_ESTIMATE);
  }

  ~SpectralEngine() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  SpectralEngine(const SpectralEngine&) = delete;
  SpectralEngine& operator=(const SpectralEngine&) = delete;

  std::vector<std::complex<double>> forward(std::span<const double> in) {
    for (int j = 0; j < n_; ++j) real_[j] = in[static_cast<std::size_t>(j)];
    fftw_execute(fwd_);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n_ / 2 + 1));
    for (int j = 0; j <= n_ / 2; ++j)
      out[static_cast<std::size_t>(j)] = std::complex<double>(cplx_[j][0], cplx_[j][1]);
    return out;
  }

  // Normalized inverse: forward followed by backward is the identity.
  std::vector<double> backward(std::span<const std::complex<double>> in) {
    for (int j = 0; j <= n_ / 2; ++j) {
      cplx_[j][0] = in[static_cast<std::size_t>(j)].real();
      cplx_[j][1] = in[static_cast<std::size_t>(j)].imag();
    }
    fftw_execute(bwd_);
    std::vector<double> out(static_cast<std::size_t>(n_));
    const double scale = 1.0 / n_;
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(j)] = real_[j] * scale;
    return out;
  }

  // One engine per (thread, size): buffers stay confined to the worker.
  static SpectralEngine& for_size(int n) {
    thread_local std::map<int, std::unique_ptr<SpectralEngine>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<SpectralEngine>(n)).first;
    return *it->second;
  }

 private:
  int n_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace detail

inline std::vector<std::complex<double>> fourier_coeffs(const FieldState& f) {
  return detail::SpectralEngine::for_size(f.grid.n).forward(f.values);
}

inline FieldState from_fourier_coeffs(const Grid1D& g,
                                      std::span<const std::complex<double>> c, double t) {
  FieldState out;
  out.grid = g;
  out.time = t;
  out.values = detail::SpectralEngine::for_size(g.n).backward(c);
  return out;
}

/// Spectral derivative of the given order (1..4). The Nyquist mode of odd
/// derivatives is zeroed so the result stays real and skew-symmetric.
inline FieldState deriv(const FieldState& f, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("deriv: order must be in 1..4");
  require_finite(f, "deriv");
  auto c = fourier_coeffs(f);
  const int half = f.grid.n / 2;
  for (int j = 0; j <= half; ++j) {
    const std::complex<double> ik(0.0, f.grid.wavenumber(j));
    std::complex<double> mult = 1.0;
    for (int o = 0; o < order; ++o) mult *= ik;
    c[static_cast<std::size_t>(j)] *= mult;
  }
  if (order % 2 == 1) c[static_cast<std::size_t>(half)] = 0.0;
  return from_fourier_coeffs(f.grid, c, f.time);
}

/// m = u - u_xx, applied as the Fourier multiplier (1 + k^2).
inline FieldState helmholtz_map(const FieldState& u) {
  require_finite(u, "helmholtz_map");
  auto c = fourier_coeffs(u);
  for (int j = 0; j <= u.grid.n / 2; ++j) {
    const double k = u.grid.wavenumber(j);
    c[static_cast<std::size_t>(j)] *= 1.0 + k * k;
  }
  return from_fourier_coeffs(u.grid, c, u.time);
}

/// Inverse of (1 - d_xx), the Fourier multiplier 1 / (1 + k^2).
inline FieldState helmholtz_invert(const FieldState& m) {
  require_finite(m, "helmholtz_invert");
  auto c = fourier_coeffs(m);
  for (int j = 0; j <= m.grid.n / 2; ++j) {
    const double k = m.grid.wavenumber(j);
    c[static_cast<std::size_t>(j)] /= 1.0 + k * k;
  }
  return from_fourier_coeffs(m.grid, c, m.time);
}

/// Trapezoidal sum dx * sum(values); spectrally exact for resolved periodic
/// trigonometric polynomials.
inline double integrate(const FieldState& f) {
  require_finite(f, "integrate");
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.dx;
}

/// Zero all modes with |j| > fraction * (n/2). fraction = 2/3 is the usual
/// dealiasing rule for quadratic products.
inline FieldState low_pass(const FieldState& f, double fraction = 2.0 / 3.0) {
  auto c = fourier_coeffs(f);
  const int half = f.grid.n / 2;
  const int keep = static_cast<int>(fraction * half);
  for (int j = keep + 1; j <= half; ++j) c[static_cast<std::size_t>(j)] = 0.0;
  return from_fourier_coeffs(f.grid, c, f.time);
}

/// Convolution with a periodic Gaussian of standard deviation sigma,
/// realized as the multiplier exp(-k^2 sigma^2 / 2).
inline FieldState mollify_gaussian(const FieldState& f, double sigma) {
  auto c = fourier_coeffs(f);
  for (int j = 0; j <= f.grid.n / 2; ++j) {
    const double k = f.grid.wavenumber(j);
    c[static_cast<std::size_t>(j)] *= std::exp(-0.5 * k * k * sigma * sigma);
  }
  return from_fourier_coeffs(f.grid, c, f.time);
}

}  // namespace chlab
