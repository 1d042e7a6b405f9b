#pragma once

// Built-in oracle battery: each spectral operator against a slow, independent
// route (direct sums, closed forms, image sums).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fks/diagnostics.hpp"
#include "fks/spectral.hpp"

namespace fks::selftest {

struct OracleResult {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return std::isfinite(error) && error <= tolerance; }
};

namespace detail {

constexpr double pi = std::numbers::pi;

struct Series {
  double mean = 1.0;
  std::vector<double> a;  // cos(kx), k = 1..
  std::vector<double> b;  // sin(kx)

  double operator()(double x) const {
    double v = mean;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double k = static_cast<double>(i + 1);
      v += a[i] * std::cos(k * x) + b[i] * std::sin(k * x);
    }
    return v;
  }
  double derivative(double x) const {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double k = static_cast<double>(i + 1);
      v += k * (-a[i] * std::sin(k * x) + b[i] * std::cos(k * x));
    }
    return v;
  }
  double hhalf_sq() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += pi * static_cast<double>(i + 1) * (a[i] * a[i] + b[i] * b[i]);
    return acc;
  }
};

inline Series random_series(std::uint64_t seed, int band, double amplitude) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  Series s;
  s.mean = 1.0 + unit();
  for (int k = 1; k <= band; ++k) {
    s.a.push_back(amplitude * (2.0 * unit() - 1.0) / k);
    s.b.push_back(amplitude * (2.0 * unit() - 1.0) / k);
  }
  return s;
}

template <class F>
RealField on_grid(int n, F&& f) {
  const Grid g(n);
  RealField u(g);
  for (int j = 0; j < n; ++j) u[static_cast<std::size_t>(j)] = f(g.x(j));
  return u;
}

inline double max_abs_diff(const RealField& u, const RealField& v) {
  double e = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) e = std::max(e, std::abs(u[j] - v[j]));
  return e;
}

inline std::complex<double> direct_coefficient(const RealField& u, int k) {
  std::complex<double> acc = 0.0;
  for (int j = 0; j < u.grid.n(); ++j) {
    acc += u[static_cast<std::size_t>(j)] * std::polar(1.0, -k * u.grid.x(j));
  }
  return acc / static_cast<double>(u.grid.n());
}

}  // namespace detail

inline std::vector<OracleResult> run_all() {
  using namespace detail;
  std::vector<OracleResult> out;

  {
    double e = 0.0;
    for (int n : {8, 64, 256}) {
      const auto u = on_grid(n, [s = random_series(11, n / 4, 1.0)](double x) { return s(x); });
      const auto sp = spectral::forward(u);
      for (int k = 0; k <= n / 2; ++k) e = std::max(e, std::abs(sp.at(k) - direct_coefficient(u, k)));
    }
    out.push_back({"transform vs direct sum", e, 1e-13});
  }
  {
    double e = 0.0;
    for (int k : {1, 5, 31}) {
      const auto u = on_grid(128, [k](double x) { return std::cos(k * x); });
      const auto h = spectral::hilbert(u);
      e = std::max(e, max_abs_diff(h, on_grid(128, [k](double x) { return std::sin(k * x); })));
    }
    out.push_back({"hilbert of cos kx is sin kx", e, 1e-12});
  }
  {
    double e = 0.0;
    for (double alpha : {0.3, 0.5, 1.0}) {
      const auto u = on_grid(64, [](double x) { return std::cos(3.0 * x); });
      const auto lu = spectral::frac_laplacian(u, alpha);
      const double sym = std::pow(3.0, alpha);
      e = std::max(e, max_abs_diff(lu, on_grid(64, [sym](double x) { return sym * std::cos(3.0 * x); })));
    }
    out.push_back({"fractional laplacian symbol on cos 3x", e, 1e-12});
  }
  {
    double e = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = random_series(seed, 20, 0.5);
      const auto u = on_grid(128, s);
      // d/dx of the chemo gradient must be u - <u>.
      const auto vx = spectral::chemo_gradient(u);
      const auto vxx = spectral::derivative(vx);
      for (std::size_t j = 0; j < u.size(); ++j) e = std::max(e, std::abs(vxx[j] - (u[j] - s.mean)));
    }
    out.push_back({"poisson residual", e, 1e-11});
  }
  {
    double e = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto s = random_series(100 + seed, 12, 0.4);
      const auto u = on_grid(128, s);
      const double kernel = diagnostics::kernel_quadratic_form(u, [](double v) { return v; }, [](double) { return 1.0; });
      const double exact = s.hhalf_sq();
      e = std::max(e, std::abs(kernel - exact) / std::max(exact, 1.0));
    }
    out.push_back({"kernel form vs H^1/2 seminorm", e, 1e-6});
  }
  {
    double e = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto s = random_series(200 + seed, 10, 0.6);
      e = std::max(e, [&] {
        const auto r = diagnostics::check_tricomi(on_grid(128, s));
        return r.scale > 0.0 ? r.residual / r.scale : r.residual;
      }());
    }
    out.push_back({"tricomi identity", e, 1e-10});
  }
  {
    const int n = 64;
    const double w = 0.3;
    const auto f = on_grid(n, [](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
    const auto m = spectral::mollify_unclamped(f, w);
    // Sampled periodic heat kernel by image sums, normalized on the grid.
    std::vector<double> kernel(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      const double d = j * f.grid.dx();
      for (int img = -60; img <= 60; ++img) {
        const double y = d + 2.0 * pi * img;
        acc += std::exp(-y * y / (4.0 * w));
      }
      kernel[static_cast<std::size_t>(j)] = acc;
      total += acc;
    }
    double e = 0.0;
    double lowest = 0.0;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        acc += f[static_cast<std::size_t>(j)] * kernel[static_cast<std::size_t>(((i - j) % n + n) % n)];
      }
      e = std::max(e, std::abs(acc / total - m[static_cast<std::size_t>(i)]));
      lowest = std::min(lowest, m[static_cast<std::size_t>(i)]);
    }
    out.push_back({"mollifier vs image-sum convolution", e, 1e-12});
    out.push_back({"mollifier keeps nonnegative data nonnegative", -lowest, 1e-12});
  }
  {
    const int n = 128;
    const auto f = on_grid(n, random_series(7, 30, 1.0));
    const auto g = on_grid(n, random_series(8, 30, 1.0));
    RealField fg(f.grid);
    for (std::size_t j = 0; j < fg.size(); ++j) fg[j] = f[j] * g[j];
    const auto got = spectral::dealias(spectral::forward(fg));
    std::vector<std::complex<double>> fc(static_cast<std::size_t>(n)), gc(static_cast<std::size_t>(n));
    for (int k = -n / 2 + 1; k < n / 2; ++k) {
      fc[static_cast<std::size_t>((k + n) % n)] = direct_coefficient(f, k);
      gc[static_cast<std::size_t>((k + n) % n)] = direct_coefficient(g, k);
    }
    double e = 0.0;
    const int cut = spectral::dealias_cutoff(n);
    // Band limit 30 keeps every product mode below n/2, so the convolution is alias free.
    for (int k = 0; k <= cut; ++k) {
      std::complex<double> acc = 0.0;
      for (int p = -30; p <= 30; ++p) {
        const int q = k - p;
        if (q < -30 || q > 30) continue;
        acc += fc[static_cast<std::size_t>((p + n) % n)] * gc[static_cast<std::size_t>((q + n) % n)];
      }
      e = std::max(e, std::abs(acc - got.at(k)));
    }
    for (int k = cut + 1; k <= n / 2; ++k) e = std::max(e, std::abs(got.at(k)));
    out.push_back({"dealiased product vs coefficient convolution", e, 1e-12});
  }
  return out;
}

}  // namespace fks::selftest
