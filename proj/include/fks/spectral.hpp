#pragma once

// Periodic grid on [-pi, pi), real-to-complex transforms and the Fourier
// multipliers used by the model: Hilbert transform, fractional Laplacian,
// derivative, Poisson inversion for the chemical gradient, heat-kernel
// mollification and 2/3-rule dealiasing.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fks/error.hpp"

namespace fks {

using cplx = std::complex<double>;

/// Uniform periodic grid x_j = -pi + j*dx, dx = 2*pi/n.
class Grid {
 public:
  Grid() = default;
  explicit Grid(int n) : n_(n) {
    if (n < 8 || (n & (n - 1)) != 0) {
      throw DomainError("grid size must be a power of two >= 8, got " + std::to_string(n));
    }
  }

  int n() const noexcept { return n_; }
  int nyquist() const noexcept { return n_ / 2; }
  /// Number of stored (non-negative) wavenumbers, 0..n/2.
  std::size_t half_size() const noexcept { return static_cast<std::size_t>(n_ / 2 + 1); }
  double dx() const noexcept { return 2.0 * std::numbers::pi / n_; }
  double x(int j) const noexcept { return -std::numbers::pi + j * dx(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_ = 8;
};

/// Samples of a real periodic function on a Grid.
struct RealField {
  Grid grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(Grid g) : grid(g), values(static_cast<std::size_t>(g.n()), 0.0) {}
  RealField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(grid.n())) {
      throw DomainError("field length does not match grid size");
    }
  }

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t j) { return values[j]; }
  double operator[](std::size_t j) const { return values[j]; }
};

/// Spectrum of a real field. Only k = 0..n/2 is stored; negative wavenumbers
/// follow from Hermitian symmetry coeff(-k) = conj(coeff(k)).
/// Convention: coeff(k) = (1/n) sum_j u_j exp(-i k x_j).
struct Spectrum {
  Grid grid;
  std::vector<cplx> half;

  Spectrum() = default;
  explicit Spectrum(Grid g) : grid(g), half(g.half_size(), cplx{0.0, 0.0}) {}

  /// Coefficient at wavenumber k in (-n/2, n/2].
  cplx at(int k) const {
    const int n = grid.n();
    if (k <= -n / 2 || k > n / 2) throw DomainError("wavenumber out of range");
    return k >= 0 ? half[static_cast<std::size_t>(k)] : std::conj(half[static_cast<std::size_t>(-k)]);
  }
  cplx& operator[](std::size_t k) { return half[k]; }
  const cplx& operator[](std::size_t k) const { return half[k]; }
};

template <class F>
RealField sample(Grid grid, F&& f) {
  RealField out(grid);
  for (int j = 0; j < grid.n(); ++j) out.values[static_cast<std::size_t>(j)] = f(grid.x(j));
  return out;
}

namespace spectral {

namespace detail {

struct Plan {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution through the new-array
// interface is. Plans live for the process lifetime.
inline const Plan& plan_for(int n) {
  static std::mutex mutex;
  static std::map<int, Plan> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  auto* real = static_cast<double*>(fftw_malloc(sizeof(double) * static_cast<std::size_t>(n)));
  auto* cpx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n / 2 + 1)));
  Plan p;
  p.r2c = fftw_plan_dft_r2c_1d(n, real, cpx, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.c2r = fftw_plan_dft_c2r_1d(n, cpx, real, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(real);
  fftw_free(cpx);
  return plans.emplace(n, p).first->second;
}

inline double parity(std::size_t k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace detail

inline void require_finite(std::span<const double> v, const char* what) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v[j])) {
      throw NonFiniteError(std::string(what) + ": non-finite value at index " + std::to_string(j));
    }
  }
}

inline Spectrum forward(const RealField& f) {
  require_finite(f.values, "forward transform");
  const Grid g = f.grid;
  Spectrum s(g);
  std::vector<double> in(f.values);
  fftw_execute_dft_r2c(detail::plan_for(g.n()).r2c, in.data(),
                       reinterpret_cast<fftw_complex*>(s.half.data()));
  // x_0 = -pi contributes the phase exp(i k pi) = (-1)^k.
  const double scale = 1.0 / g.n();
  for (std::size_t k = 0; k < s.half.size(); ++k) s.half[k] *= scale * detail::parity(k);
  return s;
}

inline RealField inverse(const Spectrum& s) {
  const Grid g = s.grid;
  std::vector<cplx> in(s.half.size());
  for (std::size_t k = 0; k < in.size(); ++k) in[k] = s.half[k] * detail::parity(k);
  // The imaginary parts of the k=0 and Nyquist coefficients carry no real signal.
  in.front().imag(0.0);
  in.back().imag(0.0);
  RealField out(g);
  fftw_execute_dft_c2r(detail::plan_for(g.n()).c2r, reinterpret_cast<fftw_complex*>(in.data()),
                       out.values.data());
  return out;
}

// Multipliers on a spectrum, in place.

inline void apply_hilbert(Spectrum& s) {
  const std::size_t nyq = s.half.size() - 1;
  s.half[0] = 0.0;
  for (std::size_t k = 1; k < nyq; ++k) s.half[k] *= cplx{0.0, -1.0};
  s.half[nyq] = 0.0;
}

inline void apply_derivative(Spectrum& s) {
  const std::size_t nyq = s.half.size() - 1;
  s.half[0] = 0.0;
  for (std::size_t k = 1; k < nyq; ++k) s.half[k] *= cplx{0.0, static_cast<double>(k)};
  s.half[nyq] = 0.0;
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("fractional order must lie in (0, 2], got " + std::to_string(alpha));
  }
}

inline void apply_frac_laplacian(Spectrum& s, double alpha) {
  check_alpha(alpha);
  s.half[0] = 0.0;
  for (std::size_t k = 1; k < s.half.size(); ++k) s.half[k] *= std::pow(static_cast<double>(k), alpha);
}

/// (d/dx v)^(k) = -i u^(k)/k where v'' = u - <u>.
inline void apply_chemo_gradient(Spectrum& s) {
  const std::size_t nyq = s.half.size() - 1;
  s.half[0] = 0.0;
  for (std::size_t k = 1; k < nyq; ++k) s.half[k] *= cplx{0.0, -1.0 / static_cast<double>(k)};
  s.half[nyq] = 0.0;
}

/// Highest wavenumber kept by the 2/3 rule.
inline int dealias_cutoff(int n) { return n / 3; }

inline Spectrum dealias(Spectrum s) {
  const auto cut = static_cast<std::size_t>(dealias_cutoff(s.grid.n()));
  for (std::size_t k = cut + 1; k < s.half.size(); ++k) s.half[k] = 0.0;
  return s;
}

/// Discrete multiplier of the periodic heat kernel of time `width`, sampled on
/// the grid and normalized to unit discrete mass. Equals exp(-width k^2) to
/// rounding whenever the kernel is resolved; for unresolved widths the sampled
/// kernel stays positive, so positivity and the mean are preserved exactly.
inline double heat_multiplier(int k, int n, double width) {
  if (width < 0.0) throw DomainError("mollifier width must be nonnegative");
  if (width == 0.0) return 1.0;
  const double wn2 = width * static_cast<double>(n) * n;
  double num = 0.0;
  double den = 0.0;
  if (wn2 >= 1.0) {
    // Aliased symbol sum_m exp(-w (k + m n)^2).
    const int mmax = static_cast<int>(std::ceil(std::sqrt(745.0 / wn2))) + 2;
    for (int m = -mmax; m <= mmax; ++m) {
      const double kk = k + static_cast<double>(m) * n;
      const double kd = static_cast<double>(m) * n;
      num += std::exp(-width * kk * kk);
      den += std::exp(-width * kd * kd);
    }
  } else {
    // Poisson-dual form; the common prefactor sqrt(pi/w)/n cancels.
    const double pi = std::numbers::pi;
    const int jmax = static_cast<int>(std::ceil(std::sqrt(745.0 * wn2) / pi)) + 2;
    for (int j = -jmax; j <= jmax; ++j) {
      const double e = std::exp(-pi * pi * j * j / wn2);
      num += e * std::cos(2.0 * pi * j * k / n);
      den += e;
    }
  }
  return num / den;
}

inline void apply_heat(Spectrum& s, double width) {
  const int n = s.grid.n();
  for (std::size_t k = 0; k < s.half.size(); ++k) s.half[k] *= heat_multiplier(static_cast<int>(k), n, width);
}

// Physical-space front ends.

inline RealField hilbert(const RealField& f) {
  auto s = forward(f);
  apply_hilbert(s);
  return inverse(s);
}

inline RealField frac_laplacian(const RealField& f, double alpha) {
  check_alpha(alpha);
  auto s = forward(f);
  apply_frac_laplacian(s, alpha);
  return inverse(s);
}

inline RealField derivative(const RealField& f) {
  auto s = forward(f);
  apply_derivative(s);
  return inverse(s);
}

inline RealField chemo_gradient(const RealField& u) {
  auto s = forward(u);
  apply_chemo_gradient(s);
  return inverse(s);
}

/// Mollified field before clamping; exposed for positivity checks.
inline RealField mollify_unclamped(const RealField& f, double width) {
  if (width < 0.0) throw DomainError("mollifier width must be nonnegative");
  if (width == 0.0) return f;
  auto s = forward(f);
  apply_heat(s, width);
  return inverse(s);
}

inline RealField mollify(const RealField& f, double width) {
  auto out = mollify_unclamped(f, width);
  if (width > 0.0) {
    bool nonneg = true;
    for (double v : f.values) nonneg = nonneg && v >= 0.0;
    if (nonneg) {
      for (double& v : out.values) v = std::max(v, 0.0);
    }
  }
  return out;
}

/// Mean <f> = (1/2pi) * integral of f (rectangle rule).
inline double mean(const RealField& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v;
  return acc / f.grid.n();
}

/// 2*pi * sum_k |k|^(2s) |coeff(k)|^2 over the full symmetric range.
inline double weighted_energy(const Spectrum& s, double smoothness) {
  const std::size_t nyq = s.half.size() - 1;
  double acc = 0.0;
  for (std::size_t k = 0; k <= nyq; ++k) {
    double w = (k == 0) ? (smoothness == 0.0 ? 1.0 : 0.0) : std::pow(static_cast<double>(k), 2.0 * smoothness);
    const double mult = (k == 0 || k == nyq) ? 1.0 : 2.0;
    acc += mult * w * std::norm(s.half[k]);
  }
  return 2.0 * std::numbers::pi * acc;
}

}  // namespace spectral
}  // namespace fks
