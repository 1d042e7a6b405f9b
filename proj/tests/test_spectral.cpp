#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fks/diagnostics.hpp"
#include "fks/spectral.hpp"
#include "oracles.hpp"

namespace {

using namespace fks;
using oracle::pi;

double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a.values[j] - b.values[j]));
  return m;
}

double max_abs(const RealField& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid(6), DomainError);
  EXPECT_THROW(Grid(4), DomainError);
  EXPECT_THROW(Grid(96), DomainError);
  EXPECT_NO_THROW(Grid(8));
  Grid g(16);
  EXPECT_DOUBLE_EQ(g.x(0), -pi);
  EXPECT_NEAR(g.x(15) + g.dx(), pi, 1e-15);
}

TEST(Transform, ConstantField) {
  Grid g(32);
  auto s = spectral::forward(sample(g, [](double) { return 1.0; }));
  EXPECT_NEAR(s.at(0).real(), 1.0, 1e-15);
  for (int k = 1; k <= 16; ++k) EXPECT_LT(std::abs(s.at(k)), 1e-15);
}

TEST(Transform, CosineHasHalfCoefficients) {
  Grid g(32);
  auto s = spectral::forward(sample(g, [](double x) { return std::cos(x); }));
  EXPECT_NEAR(s.at(1).real(), 0.5, 1e-15);
  EXPECT_NEAR(s.at(-1).real(), 0.5, 1e-15);
  EXPECT_LT(std::abs(s.at(1).imag()), 1e-15);
  for (int k = 2; k <= 16; ++k) EXPECT_LT(std::abs(s.at(k)), 1e-15);
}

TEST(Transform, MatchesDirectSumAndRoundTrips) {
  for (int n : {8, 64, 256}) {
    Grid g(n);
    auto trig = oracle::random_trig(100 + n, n / 2 - 1, 1.0, 0.3);
    auto f = oracle::sample_trig(g, trig);
    const auto s = spectral::forward(f);
    for (int k = -n / 2 + 1; k <= n / 2; ++k) {
      EXPECT_LT(std::abs(s.at(k) - oracle::dft(f.values, k)), 1e-14) << "n=" << n << " k=" << k;
    }
    const auto back = spectral::inverse(s);
    EXPECT_LE(max_abs_diff(back, f), 1e-13 * max_abs(f));
  }
}

TEST(Transform, RejectsNonFinite) {
  Grid g(16);
  RealField f(g);
  f.values[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(spectral::forward(f), NonFiniteError);
  f.values[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(spectral::forward(f), NonFiniteError);
}

TEST(Transform, Parseval) {
  Grid g(128);
  auto f = oracle::sample_trig(g, oracle::random_trig(7, 40, 2.0, 1.0));
  double phys = 0.0;
  for (double v : f.values) phys += v * v;
  phys *= g.dx();
  const double spec = spectral::weighted_energy(spectral::forward(f), 0.0);
  EXPECT_NEAR(phys, spec, 1e-12 * phys);
}

TEST(Hilbert, SingleModes) {
  Grid g(64);
  auto c = sample(g, [](double x) { return std::cos(x); });
  auto s = sample(g, [](double x) { return std::sin(x); });
  auto ms = sample(g, [](double x) { return -std::cos(x); });
  EXPECT_LT(max_abs_diff(spectral::hilbert(c), s), 1e-12);
  EXPECT_LT(max_abs_diff(spectral::hilbert(s), ms), 1e-12);
  EXPECT_LT(max_abs(spectral::hilbert(sample(g, [](double) { return 4.2; }))), 1e-15);
}

TEST(Hilbert, SquaresToMinusIdentityAndMatchesAnalyticForm) {
  Grid g(128);
  auto trig = oracle::random_trig(11, 60, 1.0, 0.0);
  auto f = oracle::sample_trig(g, trig);
  auto hh = spectral::hilbert(spectral::hilbert(f));
  for (std::size_t j = 0; j < f.size(); ++j) EXPECT_NEAR(hh.values[j], -f.values[j], 1e-12 * max_abs(f));
  auto h = spectral::hilbert(f);
  for (int j = 0; j < g.n(); ++j) EXPECT_NEAR(h.values[static_cast<std::size_t>(j)], trig.hilbert(g.x(j)), 1e-12);
}

TEST(Hilbert, NyquistModeIsZeroed) {
  Grid g(16);
  RealField f(g);
  for (int j = 0; j < 16; ++j) f.values[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
  EXPECT_LT(max_abs(spectral::hilbert(f)), 1e-15);
  EXPECT_LT(max_abs(spectral::derivative(f)), 1e-15);
  EXPECT_LT(max_abs(spectral::chemo_gradient(f)), 1e-15);
}

TEST(FracLaplacian, SingleModesAndErrors) {
  Grid g(64);
  auto c = sample(g, [](double x) { return std::cos(x); });
  EXPECT_LT(max_abs_diff(spectral::frac_laplacian(c, 1.0), c), 1e-12);
  auto c3 = sample(g, [](double x) { return std::cos(3 * x); });
  auto expect = sample(g, [](double x) { return std::sqrt(3.0) * std::cos(3 * x); });
  EXPECT_LT(max_abs_diff(spectral::frac_laplacian(c3, 0.5), expect), 1e-12);
  EXPECT_THROW(spectral::frac_laplacian(c, 0.0), DomainError);
  EXPECT_THROW(spectral::frac_laplacian(c, 2.5), DomainError);
  EXPECT_THROW(spectral::frac_laplacian(c, -1.0), DomainError);
  EXPECT_NO_THROW(spectral::frac_laplacian(c, 2.0));
}

TEST(FracLaplacian, RandomFieldsMatchAnalyticSymbols) {
  Grid g(128);
  for (double alpha : {0.3, 0.8, 1.0, 1.7, 2.0}) {
    auto trig = oracle::random_trig(23, 50, 1.0, 2.0);
    auto out = spectral::frac_laplacian(oracle::sample_trig(g, trig), alpha);
    for (int j = 0; j < g.n(); ++j) {
      EXPECT_NEAR(out.values[static_cast<std::size_t>(j)], trig.frac(g.x(j), alpha), 1e-11) << alpha;
    }
  }
}

TEST(FracLaplacian, QuadraticFormAgreesWithKernelDoubleSum) {
  // Pairing with f: integral f Lambda f equals the symmetrized kernel sum.
  Grid g(128);
  auto trig = oracle::random_trig(5, 12, 1.0, 1.5);
  auto f = oracle::sample_trig(g, trig);
  const double spectral_form = diagnostics::integrate([&] {
    auto lam = spectral::frac_laplacian(f, 1.0);
    for (std::size_t j = 0; j < f.size(); ++j) lam.values[j] *= f.values[j];
    return lam;
  }());
  const double kernel = oracle::kernel_double_sum(trig, 128, [](double s) { return s; }, [](double) { return 1.0; });
  EXPECT_NEAR(spectral_form, kernel, 1e-6 * kernel);
}

TEST(Derivative, ModesAndIdentity) {
  Grid g(64);
  auto s = sample(g, [](double x) { return std::sin(x); });
  auto c = sample(g, [](double x) { return std::cos(x); });
  EXPECT_LT(max_abs_diff(spectral::derivative(s), c), 1e-12);
  EXPECT_LT(max_abs(spectral::derivative(sample(g, [](double) { return -3.0; }))), 1e-15);

  Grid g2(128);
  auto f = oracle::sample_trig(g2, oracle::random_trig(9, 63, 1.0, 0.7));
  auto lhs = spectral::derivative(spectral::hilbert(f));
  auto rhs = spectral::frac_laplacian(f, 1.0);
  EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12 * 64);
  // Relative to the size of Lambda f.
  EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12 * max_abs(rhs));
}

TEST(Multipliers, ZeroModeNeverPopulated) {
  Grid g(64);
  auto f = oracle::sample_trig(g, oracle::random_trig(3, 20, 1.0, 5.0));
  auto s = spectral::forward(f);
  auto a = s, b = s, c = s, d = s;
  spectral::apply_hilbert(a);
  spectral::apply_frac_laplacian(b, 0.6);
  spectral::apply_derivative(c);
  spectral::apply_chemo_gradient(d);
  for (const auto* x : {&a, &b, &c, &d}) EXPECT_EQ(x->half[0], cplx(0.0, 0.0));
  EXPECT_LT(std::abs(spectral::mean(spectral::hilbert(f))), 1e-15);
  EXPECT_LT(std::abs(spectral::mean(spectral::derivative(f))), 1e-15);
}

TEST(ChemoGradient, CosineAndConstant) {
  Grid g(64);
  auto c = sample(g, [](double x) { return std::cos(x); });
  auto s = sample(g, [](double x) { return std::sin(x); });
  EXPECT_LT(max_abs_diff(spectral::chemo_gradient(c), s), 1e-12);
  EXPECT_LT(max_abs(spectral::chemo_gradient(sample(g, [](double) { return 2.0; }))), 1e-15);
}

TEST(ChemoGradient, PoissonResidual) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Grid g(64);
    auto u = oracle::sample_trig(g, oracle::random_trig(seed, 31, 1.0, 2.0));
    auto vxx = spectral::derivative(spectral::chemo_gradient(u));
    const double m = spectral::mean(u);
    double res = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) res = std::max(res, std::abs(vxx.values[j] - (u.values[j] - m)));
    EXPECT_LE(res, 1e-12 * max_abs(u));
  }
}

TEST(Mollify, IdentityAndHalving) {
  Grid g(64);
  auto c = sample(g, [](double x) { return std::cos(x); });
  EXPECT_EQ(spectral::mollify(c, 0.0).values, c.values);
  auto half = spectral::mollify_unclamped(c, std::log(2.0));
  for (std::size_t j = 0; j < c.size(); ++j) EXPECT_NEAR(half.values[j], 0.5 * c.values[j], 1e-14);
  EXPECT_THROW(spectral::mollify(c, -1.0), DomainError);
}

TEST(Mollify, PositivityAgainstDirectKernelConvolution) {
  Grid g(64);
  std::mt19937_64 rng(42);
  for (double w : {1e-5, 1e-3, 1e-2, 0.05, 0.3, 2.0}) {
    RealField f(g);
    for (auto& v : f.values) v = oracle::unit(rng) < 0.2 ? 3.0 * oracle::unit(rng) : 0.0;
    const auto out = spectral::mollify_unclamped(f, w);
    const auto ref = oracle::heat_convolve(f.values, w);
    double lo = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      EXPECT_NEAR(out.values[j], ref[j], 1e-12) << "w=" << w;
      lo = std::min(lo, out.values[j]);
    }
    EXPECT_GE(lo, -1e-12) << "w=" << w;
    EXPECT_NEAR(spectral::mean(out), spectral::mean(f), 1e-14);
    const auto clamped = spectral::mollify(f, w);
    for (double v : clamped.values) EXPECT_GE(v, 0.0);
  }
}

TEST(Dealias, KeepsLowBandAndRemovesNyquist) {
  Grid g(96 / 3 * 2);  // 64
  auto f = oracle::sample_trig(g, oracle::random_trig(1, 21, 1.0, 0.0));
  auto s = spectral::forward(f);
  auto d = spectral::dealias(s);
  for (int k = 0; k <= spectral::dealias_cutoff(64); ++k) EXPECT_EQ(d.at(k), s.at(k));
  for (int k = spectral::dealias_cutoff(64) + 1; k <= 32; ++k) EXPECT_EQ(d.at(k), cplx(0.0, 0.0));

  Spectrum nyq(g);
  nyq.half.back() = 1.0;
  auto dn = spectral::dealias(nyq);
  for (const auto& c : dn.half) EXPECT_EQ(c, cplx(0.0, 0.0));
}

TEST(Dealias, ProductMatchesZeroPaddedConvolution) {
  const int n = 64;
  Grid g(n);
  const int band = n / 3;  // factors live on |k| <= 21
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto uf = oracle::random_trig(seed, band, 1.0, 1.0);
    auto vf = oracle::random_trig(seed + 50, band, 1.0, 0.0);
    auto u = oracle::sample_trig(g, uf);
    auto v = oracle::sample_trig(g, vf);
    RealField prod(g);
    for (std::size_t j = 0; j < prod.size(); ++j) prod.values[j] = u.values[j] * v.values[j];
    const auto aliased = spectral::dealias(spectral::forward(prod));
    // The 2n grid represents the product exactly.
    const auto exact = oracle::product_on(2 * n, uf, vf);
    for (int k = 0; k <= n / 3; ++k) {
      EXPECT_LT(std::abs(aliased.at(k) - oracle::dft(exact, k)), 1e-12) << k;
    }
    for (int k = n / 3 + 1; k <= n / 2; ++k) EXPECT_EQ(aliased.at(k), cplx(0.0, 0.0));
  }
}

}  // namespace
