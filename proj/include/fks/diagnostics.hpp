#pragma once

// Functionals, norms, energy identities and pointwise inequalities evaluated
// on grid fields and on recorded trajectories.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fks/error.hpp"
#include "fks/model.hpp"
#include "fks/spectral.hpp"

namespace fks {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double mean = 0.0;
  double min = 0.0;
  int argmin = 0;
  double max = 0.0;
  int argmax = 0;
  double l2 = 0.0;
  double l3 = 0.0;
  double linf = 0.0;
  double hhalf = 0.0;
  double entropy = 0.0;
  double fisher = 0.0;
  double dissipation_gamma = 0.0;
  double dissipation_m = 0.0;
  double entropy_balance_residual = std::numeric_limits<double>::quiet_NaN();
  double l2_balance_residual = std::numeric_limits<double>::quiet_NaN();

  // Right-hand sides of the entropy and L2 identities at this state, used to
  // form the balance residuals once neighbouring records exist. Not serialized.
  double entropy_rate_model = std::numeric_limits<double>::quiet_NaN();
  double entropy_rate_scale = std::numeric_limits<double>::quiet_NaN();
  double l2_rate_model = std::numeric_limits<double>::quiet_NaN();
  double l2_rate_scale = std::numeric_limits<double>::quiet_NaN();
};

namespace diagnostics {

inline constexpr double entropy_negativity_floor = -1e-10;
inline constexpr int kernel_max_n = 512;

inline double integrate(const RealField& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v;
  return acc * f.grid.dx();
}

template <class F>
double integrate(const RealField& u, F&& integrand) {
  double acc = 0.0;
  for (double v : u.values) acc += integrand(v);
  return acc * u.grid.dx();
}

inline double entropy_density(double s) {
  s = std::max(s, 0.0);
  return (s > 0.0 ? s * std::log(s) : 0.0) - s + 1.0;
}

/// F(u) = integral of u log u - u + 1.
inline double entropy(const RealField& u) {
  const double lo = *std::min_element(u.values.begin(), u.values.end());
  if (lo < entropy_negativity_floor) {
    throw DomainError("entropy undefined: field minimum " + std::to_string(lo) + " is negative");
  }
  return integrate(u, entropy_density);
}

/// Homogeneous Sobolev norm ||Lambda^s u||_L2.
inline double hs_norm(const RealField& u, double s) {
  return std::sqrt(spectral::weighted_energy(spectral::forward(u), s));
}

/// Fisher information ||Lambda^0.5 u||_L2^2.
inline double fisher(const RealField& u) { return spectral::weighted_energy(spectral::forward(u), 0.5); }

/// integral of Phi(u) Lambda u in symmetrized form: (1/8pi) double integral of (u(x)-u(y)) (Phi(u(x)) - Phi(u(y))) / sin^2((x-y)/2)
/// by the tensor trapezoid rule; the diagonal uses the removable-singularity
/// limit 4 Phi'(u) (u_x)^2. O(n^2), limited to n <= 512.
template <class Phi, class PhiPrime>
  requires std::invocable<Phi&, double> && std::invocable<PhiPrime&, double>
double kernel_quadratic_form(const RealField& u, Phi&& phi, PhiPrime&& phi_prime) {
  const int n = u.grid.n();
  if (n > kernel_max_n) throw DomainError("kernel quadrature limited to n <= 512");
  const double dx = u.grid.dx();
  std::vector<double> inv_sin2(static_cast<std::size_t>(n), 0.0);
  for (int d = 1; d < n; ++d) {
    const double s = std::sin(0.5 * d * dx);
    inv_sin2[static_cast<std::size_t>(d)] = 1.0 / (s * s);
  }
  std::vector<double> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = phi(u.values[static_cast<std::size_t>(i)]);
  const auto ux = spectral::derivative(u);

  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    acc += 4.0 * phi_prime(u.values[ui]) * ux.values[ui] * ux.values[ui];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto uj = static_cast<std::size_t>(j);
      const int d = (i - j + n) % n;
      acc += (u.values[ui] - u.values[uj]) * (p[ui] - p[uj]) * inv_sin2[static_cast<std::size_t>(d)];
    }
  }
  return acc * dx * dx / (8.0 * std::numbers::pi);
}

enum class Potential { identity, big_gamma, big_m };

inline double kernel_quadratic_form(const RealField& u, Potential which, const Semilinearity& sem) {
  switch (which) {
    case Potential::identity:
      return kernel_quadratic_form(u, [](double s) { return s; }, [](double) { return 1.0; });
    case Potential::big_gamma:
      return kernel_quadratic_form(
          u, [&](double s) { return sem.big_gamma(std::max(s, 0.0)); },
          [&](double s) { return sem.gamma(std::max(s, 0.0)); });
    case Potential::big_m:
      return kernel_quadratic_form(
          u, [&](double s) { return sem.big_m(std::max(s, 0.0)); },
          [&](double s) { return sem.mu(std::max(s, 0.0)); });
  }
  return 0.0;
}

/// integral of Phi(u) Lambda u, spectral Lambda and rectangle rule.
template <class Phi>
double dissipation(const RealField& u, const RealField& lambda_u, Phi&& phi) {
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += phi(u.values[j]) * lambda_u.values[j];
  return acc * u.grid.dx();
}

struct IdentityRates {
  double entropy_rate = std::numeric_limits<double>::quiet_NaN();
  double entropy_scale = std::numeric_limits<double>::quiet_NaN();
  double l2_rate = std::numeric_limits<double>::quiet_NaN();
  double l2_scale = std::numeric_limits<double>::quiet_NaN();
};

/// Right-hand sides of
///   dF/dt = [coupling] ||u - <u>||^2 + r int u(1-u) log u - int Gamma(u) Lambda u - 4 eps int |d_x sqrt u|^2
///   d(||u||^2/2)/dt = -int M(u) Lambda u - eps ||u_x||^2 + [coupling](int u^3/2 - <u>/2 int u^2)
///                     + r int u^2 - r int u^3
/// for the critical (alpha = 1) flux form. NaN where a term is undefined.
inline IdentityRates identity_rates(const RealField& u, const ModelParams& params, double diss_gamma,
                                    double diss_m) {
  IdentityRates out;
  if (params.alpha != 1.0) return out;
  const double m = spectral::mean(u);
  const double dev2 = integrate(u, [m](double s) { return (s - m) * (s - m); });
  const double u2 = integrate(u, [](double s) { return s * s; });
  const double u3 = integrate(u, [](double s) { return s * s * s; });
  const double coupling = params.coupling ? 1.0 : 0.0;

  RealField root(u.grid);
  for (std::size_t j = 0; j < u.size(); ++j) root.values[j] = std::sqrt(std::max(u.values[j], 0.0));
  const auto root_x = spectral::derivative(root);
  const double grad_root2 = integrate(root_x, [](double s) { return s * s; });
  const auto ux = spectral::derivative(u);
  const double grad2 = integrate(ux, [](double s) { return s * s; });

  if (std::isfinite(diss_gamma)) {
    const double logistic = integrate(u, [](double s) {
      return s > 0.0 ? s * (1.0 - s) * std::log(s) : 0.0;
    });
    const double viscous = 4.0 * params.epsilon * grad_root2;
    out.entropy_rate = coupling * dev2 + params.r * logistic - diss_gamma - viscous;
    out.entropy_scale = std::abs(coupling * dev2) + std::abs(params.r * logistic) + std::abs(diss_gamma) + viscous;
  }
  const double viscous = params.epsilon * grad2;
  const double chemo = coupling * (0.5 * u3 - 0.5 * m * u2);
  out.l2_rate = -diss_m - viscous + chemo + params.r * (u2 - u3);
  out.l2_scale = std::abs(diss_m) + viscous + std::abs(chemo) + params.r * (u2 + u3);
  return out;
}

inline DiagnosticsRecord compute_record(double t, const RealField& u, const ModelParams& params) {
  DiagnosticsRecord rec;
  rec.t = t;
  const auto& v = u.values;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  rec.min = *lo;
  rec.argmin = static_cast<int>(lo - v.begin());
  rec.max = *hi;
  rec.argmax = static_cast<int>(hi - v.begin());
  rec.mass = integrate(u);
  rec.mean = spectral::mean(u);
  rec.l2 = std::sqrt(integrate(u, [](double s) { return s * s; }));
  rec.l3 = std::cbrt(integrate(u, [](double s) { return std::abs(s * s * s); }));
  rec.linf = std::max(std::abs(rec.min), std::abs(rec.max));

  const auto spec = spectral::forward(u);
  rec.fisher = spectral::weighted_energy(spec, 0.5);
  rec.hhalf = std::sqrt(rec.fisher);
  rec.entropy = rec.min >= entropy_negativity_floor ? integrate(u, entropy_density)
                                                    : std::numeric_limits<double>::quiet_NaN();

  auto lam = spec;
  spectral::apply_frac_laplacian(lam, 1.0);
  const auto lambda_u = spectral::inverse(lam);
  const auto& sem = params.semilinearity;
  if (sem.log_gamma() && rec.min <= 0.0) {
    rec.dissipation_gamma = std::numeric_limits<double>::quiet_NaN();
  } else {
    rec.dissipation_gamma = dissipation(u, lambda_u, [&](double s) { return sem.big_gamma(std::max(s, 0.0)); });
  }
  rec.dissipation_m = dissipation(u, lambda_u, [&](double s) { return sem.big_m(std::max(s, 0.0)); });

  const auto rates = identity_rates(u, params, rec.dissipation_gamma, rec.dissipation_m);
  rec.entropy_rate_model = rates.entropy_rate;
  rec.entropy_rate_scale = rates.entropy_scale;
  rec.l2_rate_model = rates.l2_rate;
  rec.l2_rate_scale = rates.l2_scale;
  return rec;
}

/// Finite-difference weights for the first derivative at z on arbitrary nodes (Fornberg).
inline std::vector<double> derivative_weights(double z, std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

inline constexpr int balance_half_width = 2;

template <class Value>
double centered_rate(std::span<const DiagnosticsRecord> window, std::size_t centre, Value&& value) {
  std::vector<double> ts;
  for (const auto& r : window) ts.push_back(r.t);
  const auto w = derivative_weights(window[centre].t, ts);
  double rate = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) rate += w[i] * value(window[i]);
  return rate;
}

/// |dF/dt - (entropy identity right-hand side)| at the centre of a window of
/// 2*balance_half_width+1 consecutive records.
inline double entropy_balance_residual(std::span<const DiagnosticsRecord> window) {
  const std::size_t c = window.size() / 2;
  const double rate = centered_rate(window, c, [](const DiagnosticsRecord& r) { return r.entropy; });
  return std::abs(rate - window[c].entropy_rate_model);
}

/// Same for d(||u||^2/2)/dt against the L2 identity.
inline double l2_balance_residual(std::span<const DiagnosticsRecord> window) {
  const std::size_t c = window.size() / 2;
  const double rate = centered_rate(window, c, [](const DiagnosticsRecord& r) { return 0.5 * r.l2 * r.l2; });
  return std::abs(rate - window[c].l2_rate_model);
}

/// Fill both residual columns wherever a full window of records exists.
inline void fill_balance_residuals(std::vector<DiagnosticsRecord>& records) {
  const std::size_t hw = balance_half_width;
  if (records.size() < 2 * hw + 1) return;
  for (std::size_t i = hw; i + hw < records.size(); ++i) {
    std::span<const DiagnosticsRecord> window(records.data() + (i - hw), 2 * hw + 1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t j = 1; j < window.size(); ++j) {
      const double gap = window[j].t - window[j - 1].t;
      lo = std::min(lo, gap);
      hi = std::max(hi, gap);
    }
    // A clamped final step can leave two samples almost on top of each other.
    if (!(lo > 0.01 * hi)) continue;
    records[i].entropy_balance_residual = entropy_balance_residual(window);
    records[i].l2_balance_residual = l2_balance_residual(window);
  }
}

struct MaxpointReport {
  double lambda_at_max = 0.0;
  double max_margin = 0.0;  // Lambda u(xmax) - (u(xmax) - <u>)
  double lambda_at_min = 0.0;
  double min_margin = 0.0;  // (u(xmin) - <u>) - Lambda u(xmin)
  bool max_ok = true;
  bool min_ok = true;
};

inline MaxpointReport check_maxpoint_inequalities(const RealField& u) {
  const auto lam = spectral::frac_laplacian(u, 1.0);
  const auto& v = u.values;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const auto imax = static_cast<std::size_t>(hi - v.begin());
  const auto imin = static_cast<std::size_t>(lo - v.begin());
  const double m = spectral::mean(u);
  double linf = 0.0;
  for (double s : v) linf = std::max(linf, std::abs(s));
  const double tol = 1e-6 * linf;
  MaxpointReport r;
  r.lambda_at_max = lam.values[imax];
  r.max_margin = r.lambda_at_max - (v[imax] - m);
  r.lambda_at_min = lam.values[imin];
  r.min_margin = (v[imin] - m) - r.lambda_at_min;
  r.max_ok = r.max_margin >= -tol;
  r.min_ok = r.min_margin >= -tol;
  return r;
}

struct LuboReport {
  bool precondition_met = false;
  double lambda_at_max = 0.0;
  double required = 0.0;  // max^2 / (4 pi^2 <u>)
  double margin = 0.0;
  bool ok = true;
};

/// Lambda u(xmax) >= max^2 / (4 pi^2 <u>) whenever max >= 4 <u>.
inline LuboReport check_lubo(const RealField& u) {
  LuboReport r;
  const auto& v = u.values;
  const auto hi = std::max_element(v.begin(), v.end());
  const double m = spectral::mean(u);
  if (!(m > 0.0) || *hi < 4.0 * m) return r;
  r.precondition_met = true;
  const auto lam = spectral::frac_laplacian(u, 1.0);
  r.lambda_at_max = lam.values[static_cast<std::size_t>(hi - v.begin())];
  r.required = (*hi) * (*hi) / (4.0 * std::numbers::pi * std::numbers::pi * m);
  r.margin = r.lambda_at_max - r.required;
  r.ok = r.margin >= -1e-6 * std::abs(r.lambda_at_max);
  return r;
}

struct TricomiReport {
  double residual = 0.0;  // max |H(f Hf) - ((Hf)^2 - f^2)/2|
  double scale = 0.0;     // ||f||_inf^2
};

/// Tricomi relation for f = u_x band-limited to |k| < n/4.
inline TricomiReport check_tricomi(const RealField& u) {
  auto fs = spectral::forward(u);
  spectral::apply_derivative(fs);
  const std::size_t band = static_cast<std::size_t>(u.grid.n() / 4);
  for (std::size_t k = band; k < fs.half.size(); ++k) fs.half[k] = 0.0;
  auto hs = fs;
  spectral::apply_hilbert(hs);
  const auto f = spectral::inverse(fs);
  const auto hf = spectral::inverse(hs);
  RealField prod(u.grid);
  RealField rhs(u.grid);
  for (std::size_t j = 0; j < u.size(); ++j) {
    prod.values[j] = f.values[j] * hf.values[j];
    rhs.values[j] = 0.5 * (hf.values[j] * hf.values[j] - f.values[j] * f.values[j]);
  }
  const auto lhs = spectral::hilbert(prod);
  TricomiReport r;
  for (std::size_t j = 0; j < u.size(); ++j) {
    r.residual = std::max(r.residual, std::abs(lhs.values[j] - rhs.values[j]));
    r.scale = std::max(r.scale, f.values[j] * f.values[j]);
  }
  return r;
}

/// Smooth bump supported on (ta, tb): psi(t) = exp(1 - 1/(1 - s^2)), s mapped to (-1, 1).
struct TimeBump {
  double ta = 0.0;
  double tb = 1.0;

  double value(double t) const {
    const double s = (2.0 * t - ta - tb) / (tb - ta);
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  double derivative(double t) const {
    const double s = (2.0 * t - ta - tb) / (tb - ta);
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return value(t) * (-2.0 * s / (q * q)) * (2.0 / (tb - ta));
  }
};

struct WeakResidual {
  double residual = 0.0;  // |R|
  double scale = 0.0;     // sum of magnitudes of the individual contributions
};

/// Residual of the weak formulation against phi(x,t) = exp(ikx) psi(t),
/// including the viscous term eps u_xx of the approximate problem. Time
/// integrals use the trapezoid rule over the stored samples.
inline WeakResidual weak_residual(std::span<const double> times, std::span<const RealField> fields,
                                  const ModelParams& params, int k, const TimeBump& psi) {
  if (times.size() != fields.size() || times.size() < 2) {
    throw DomainError("weak residual needs matching time and field samples");
  }
  const double two_pi = 2.0 * std::numbers::pi;
  const auto& sem = params.semilinearity;
  const cplx ik{0.0, static_cast<double>(k)};
  std::vector<cplx> integrand(times.size());
  std::vector<double> magnitude(times.size());
  for (std::size_t s = 0; s < times.size(); ++s) {
    const auto& u = fields[s];
    const auto uh = spectral::forward(u);
    RealField flux(u.grid);
    RealField source(u.grid);
    RealField dv(u.grid);
    if (params.coupling) dv = spectral::chemo_gradient(u);
    RealField hu(u.grid);
    RealField lam_alpha(u.grid);
    if (params.alpha == 1.0) {
      hu = spectral::hilbert(u);
    } else {
      lam_alpha = spectral::frac_laplacian(u, params.alpha);
    }
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double uj = u.values[j];
      const double muj = sem.mu(std::max(uj, 0.0));
      flux.values[j] = uj * dv.values[j] + (params.alpha == 1.0 ? -muj * hu.values[j] : 0.0);
      source.values[j] = params.r * uj * (1.0 - uj) - (params.alpha == 1.0 ? 0.0 : muj * lam_alpha.values[j]);
    }
    auto uxh = uh;
    spectral::apply_derivative(uxh);
    const auto fh = spectral::forward(flux);
    const auto sh = spectral::forward(source);
    const double t = times[s];
    const cplx a = -psi.derivative(t) * uh.at(-k);
    const cplx b = psi.value(t) * ik * fh.at(-k);
    const cplx c = -psi.value(t) * sh.at(-k);
    const cplx d = psi.value(t) * ik * params.epsilon * uxh.at(-k);
    integrand[s] = two_pi * (a + b + c + d);
    magnitude[s] = two_pi * (std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d));
  }
  cplx acc{0.0, 0.0};
  double mag = 0.0;
  for (std::size_t s = 1; s < times.size(); ++s) {
    const double h = times[s] - times[s - 1];
    acc += 0.5 * h * (integrand[s] + integrand[s - 1]);
    mag += 0.5 * h * (magnitude[s] + magnitude[s - 1]);
  }
  return {std::abs(acc), mag};
}

// CSV output: one row per record, 17 significant digits.

inline const char* csv_header() {
  return "t,mass,mean,min,argmin,max,argmax,l2,l3,linf,hhalf,entropy,fisher,"
         "dissipation_gamma,dissipation_m,entropy_balance_residual,l2_balance_residual";
}

inline std::string csv_row(const DiagnosticsRecord& r) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "%.17g,%.17g,%.17g,%.17g,%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                r.t, r.mass, r.mean, r.min, r.argmin, r.max, r.argmax, r.l2, r.l3, r.linf, r.hhalf, r.entropy,
                r.fisher, r.dissipation_gamma, r.dissipation_m, r.entropy_balance_residual,
                r.l2_balance_residual);
  return buf;
}

}  // namespace diagnostics
}  // namespace fks
