#pragma once

// Semilinearity catalog, model parameters, and the explicit constants and
// conditions that decide which boundedness statement applies to a run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "fks/error.hpp"
#include "fks/spectral.hpp"

namespace fks {

namespace detail {

// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
  struct Rec {
    F& f;
    double worst = 0.0;
    bool converged = true;
    double run(double a, double fa, double m, double fm, double b, double fb, double whole, double tol,
               int depth) {
      const double lm = 0.5 * (a + m);
      const double rm = 0.5 * (m + b);
      const double flm = f(lm);
      const double frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
      if (depth <= 0) {
        converged = false;
        worst = std::max(worst, std::abs(delta) / 15.0);
        return left + right + delta / 15.0;
      }
      return run(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
             run(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
    }
  } rec{f};
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  // Split once unconditionally so that a lucky first estimate cannot stop the recursion.
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double out = rec.run(a, fa, lm, flm, m, fm, left, 0.5 * tol, max_depth) +
                     rec.run(m, fm, rm, frm, b, fb, right, 0.5 * tol, max_depth);
  if (!rec.converged) {
    throw ConvergenceError("adaptive Simpson did not reach tolerance", rec.worst);
  }
  return out;
}

}  // namespace detail

/// Density-dependent diffusion strength mu(s) = gamma(s) s, drawn from a fixed catalog.
class Semilinearity {
 public:
  enum class Kind { constant, linear, affine, power, ramped_gamma };

  static constexpr double quadrature_tolerance = 1e-10;

  static Semilinearity constant(double c) {
    require_positive(c, "constant c");
    Semilinearity s(Kind::constant);
    s.c_ = c;
    return s;
  }
  static Semilinearity linear() { return Semilinearity(Kind::linear); }
  static Semilinearity affine(double nu) {
    require_positive(nu, "affine nu");
    Semilinearity s(Kind::affine);
    s.nu_ = nu;
    return s;
  }
  static Semilinearity power(double p) {
    if (!(p > 1.0)) throw DomainError("power exponent must exceed 1");
    Semilinearity s(Kind::power);
    s.p_ = p;
    return s;
  }
  /// gamma(s) = delta + (1 - delta) * smoothstep((s - y0) / w).
  static Semilinearity ramped_gamma(double delta, double y0, double w) {
    require_positive(delta, "ramped delta");
    require_positive(w, "ramped width");
    if (!(y0 >= 0.0)) throw DomainError("ramped y0 must be nonnegative");
    Semilinearity s(Kind::ramped_gamma);
    s.delta_ = delta;
    s.y0_ = y0;
    s.w_ = w;
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  double c() const noexcept { return c_; }
  double nu() const noexcept { return nu_; }
  double p() const noexcept { return p_; }
  double ramp_delta() const noexcept { return delta_; }
  double ramp_y0() const noexcept { return y0_; }
  double ramp_width() const noexcept { return w_; }

  std::string_view name() const noexcept {
    switch (kind_) {
      case Kind::constant: return "constant";
      case Kind::linear: return "linear";
      case Kind::affine: return "affine";
      case Kind::power: return "power";
      case Kind::ramped_gamma: return "ramped_gamma";
    }
    return "unknown";
  }

  /// Gamma has a logarithmic singularity at 0 for these kinds; it is then
  /// normalized by Gamma(1) = 0 instead of Gamma(0) = 0.
  bool log_gamma() const noexcept { return kind_ == Kind::constant || kind_ == Kind::affine; }

  double mu(double s) const {
    check(s);
    switch (kind_) {
      case Kind::constant: return c_;
      case Kind::linear: return s;
      case Kind::affine: return s + nu_;
      case Kind::power: return std::pow(s, p_);
      case Kind::ramped_gamma: return ramp(s) * s;
    }
    return 0.0;
  }

  double mu_prime(double s) const {
    check(s);
    switch (kind_) {
      case Kind::constant: return 0.0;
      case Kind::linear: return 1.0;
      case Kind::affine: return 1.0;
      case Kind::power: return p_ * std::pow(s, p_ - 1.0);
      case Kind::ramped_gamma: return ramp(s) + s * ramp_prime(s);
    }
    return 0.0;
  }

  double gamma(double s) const {
    check(s);
    switch (kind_) {
      case Kind::constant: return s > 0.0 ? c_ / s : std::numeric_limits<double>::infinity();
      case Kind::linear: return 1.0;
      case Kind::affine: return s > 0.0 ? 1.0 + nu_ / s : std::numeric_limits<double>::infinity();
      case Kind::power: return std::pow(s, p_ - 1.0);
      case Kind::ramped_gamma: return ramp(s);
    }
    return 0.0;
  }

  /// Antiderivative of gamma.
  double big_gamma(double s) const {
    check(s);
    switch (kind_) {
      case Kind::constant: return c_ * std::log(s);
      case Kind::linear: return s;
      case Kind::affine: return (s - 1.0) + nu_ * std::log(s);
      case Kind::power: return std::pow(s, p_) / p_;
      case Kind::ramped_gamma:
        return integrate_pieces([this](double y) { return ramp(y); }, s);
    }
    return 0.0;
  }

  /// Antiderivative of mu, vanishing at 0.
  double big_m(double s) const {
    check(s);
    switch (kind_) {
      case Kind::constant: return c_ * s;
      case Kind::linear: return 0.5 * s * s;
      case Kind::affine: return 0.5 * s * s + nu_ * s;
      case Kind::power: return std::pow(s, p_ + 1.0) / (p_ + 1.0);
      case Kind::ramped_gamma:
        return integrate_pieces([this](double y) { return ramp(y) * y; }, s);
    }
    return 0.0;
  }

 private:
  explicit Semilinearity(Kind k) : kind_(k) {}

  static void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
  }
  static void check(double s) {
    if (!(s >= 0.0)) throw DomainError("semilinearity evaluated at negative density");
  }

  double ramp(double s) const {
    const double t = std::clamp((s - y0_) / w_, 0.0, 1.0);
    return delta_ + (1.0 - delta_) * t * t * (3.0 - 2.0 * t);
  }
  double ramp_prime(double s) const {
    const double t = (s - y0_) / w_;
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return (1.0 - delta_) * 6.0 * t * (1.0 - t) / w_;
  }

  // The ramp is a polynomial on [0,y0], [y0,y0+w] and beyond; integrate each piece separately.
  template <class F>
  double integrate_pieces(F&& f, double s) const {
    const double breaks[] = {0.0, y0_, y0_ + w_, s};
    double acc = 0.0;
    double lo = 0.0;
    for (double b : breaks) {
      const double hi = std::min(b, s);
      if (hi > lo) {
        acc += detail::adaptive_simpson(f, lo, hi, quadrature_tolerance / 3.0);
        lo = hi;
      }
    }
    return acc;
  }

  Kind kind_;
  double c_ = 0.0;
  double nu_ = 0.0;
  double p_ = 0.0;
  double delta_ = 0.0;
  double y0_ = 0.0;
  double w_ = 1.0;
};

struct ModelParams {
  Semilinearity semilinearity = Semilinearity::linear();
  double r = 0.0;        // logistic rate
  double epsilon = 0.0;  // viscosity
  double alpha = 1.0;    // diffusion order, 1 is critical
  bool coupling = true;  // false: v == 0

  void validate() const {
    if (!(r >= 0.0)) throw DomainError("logistic rate r must be >= 0");
    if (!(epsilon >= 0.0)) throw DomainError("viscosity epsilon must be >= 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  }
};

struct AssumptionVerdict {
  bool holds = false;
  double delta = 0.0;
  std::optional<double> y0;
  std::optional<double> witness;  // a density where the assumption visibly fails
  std::string note;
};

/// gamma >= delta > 0 everywhere and gamma >= 1 beyond some y0.
inline AssumptionVerdict check_assumption1(const Semilinearity& sem) {
  using K = Semilinearity::Kind;
  AssumptionVerdict v;
  switch (sem.kind()) {
    case K::constant:
      v.holds = false;
      v.delta = 0.0;
      v.witness = 2.0 * sem.c();
      v.note = "gamma(s) = c/s tends to 0, so no positive lower bound and no y0";
      break;
    case K::linear:
      v.holds = true;
      v.delta = 1.0;
      v.y0 = 0.0;
      v.note = "gamma == 1";
      break;
    case K::affine:
      v.holds = true;
      v.delta = 1.0;
      v.y0 = 0.0;
      v.note = "gamma(s) = 1 + nu/s >= 1";
      break;
    case K::power:
      v.holds = false;
      v.delta = 0.0;
      v.y0 = 1.0;
      v.witness = 0.0;
      v.note = "gamma(0) = 0";
      break;
    case K::ramped_gamma:
      v.holds = true;
      v.delta = std::min(sem.ramp_delta(), 1.0);
      v.y0 = sem.ramp_delta() >= 1.0 ? 0.0 : sem.ramp_y0() + sem.ramp_width();
      v.note = "gamma ramps from delta to 1 on [y0, y0 + w]";
      break;
  }
  return v;
}

/// mu vanishes only at 0 and mu >= delta >= 0.
inline AssumptionVerdict check_assumption2(const Semilinearity& sem) {
  using K = Semilinearity::Kind;
  AssumptionVerdict v;
  v.holds = true;
  switch (sem.kind()) {
    case K::constant: v.delta = sem.c(); v.note = "mu == c"; break;
    case K::linear: v.delta = 0.0; v.note = "mu(s) = s"; break;
    case K::affine: v.delta = sem.nu(); v.note = "mu(s) = s + nu >= nu"; break;
    case K::power: v.delta = 0.0; v.note = "mu(s) = s^p"; break;
    case K::ramped_gamma: v.delta = 0.0; v.note = "mu(0) = 0, positive for s > 0"; break;
  }
  return v;
}

struct L1Norm {
  double value = 0.0;
  bool had_negative = false;
};

inline L1Norm l1_norm(const RealField& u) {
  L1Norm out;
  double acc = 0.0;
  for (double v : u.values) {
    if (v < 0.0) out.had_negative = true;
    acc += std::abs(v);
  }
  out.value = acc * u.grid.dx();
  return out;
}

/// N1 = max{2 pi, ||u0||_L1}.
inline double n1(const RealField& u0) { return std::max(2.0 * std::numbers::pi, l1_norm(u0).value); }
inline double n1_from_l1(double l1) { return std::max(2.0 * std::numbers::pi, l1); }

struct DataSummary {
  double mean = 0.0;
  double sup = 0.0;
  double inf = 0.0;
  double l1 = 0.0;
};

inline DataSummary summarize(const RealField& u0) {
  DataSummary d;
  d.mean = spectral::mean(u0);
  d.sup = *std::max_element(u0.values.begin(), u0.values.end());
  d.inf = *std::min_element(u0.values.begin(), u0.values.end());
  d.l1 = l1_norm(u0).value;
  return d;
}

struct ConditionVerdict {
  bool holds = false;
  double lhs = 0.0;
  double margin = 0.0;  // lhs - 1
  bool via_delta = false;          // delta > 0
  bool via_positive_data = false;  // ess inf u0 > 0
};

/// r + delta / (4 pi^2 max{<u0>, 1}) > 1, together with delta > 0 or inf u0 > 0.
inline ConditionVerdict check_condition_teoL(double r, double delta, double mean0, double inf0) {
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  ConditionVerdict v;
  v.lhs = r + delta / (four_pi2 * std::max(mean0, 1.0));
  v.margin = v.lhs - 1.0;
  v.via_delta = delta > 0.0;
  v.via_positive_data = inf0 > 0.0;
  v.holds = v.lhs > 1.0 && (v.via_delta || v.via_positive_data);
  return v;
}

inline ConditionVerdict check_condition_teoL(const ModelParams& params, const RealField& u0) {
  const auto d = summarize(u0);
  return check_condition_teoL(params.r, check_assumption2(params.semilinearity).delta, d.mean, d.inf);
}

/// r = 0 variant: delta / (4 pi^2 <u0>) > 1.
inline ConditionVerdict check_condition_corollary(double delta, double mean0, double inf0) {
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  ConditionVerdict v;
  v.lhs = mean0 > 0.0 ? delta / (four_pi2 * mean0) : std::numeric_limits<double>::infinity();
  v.margin = v.lhs - 1.0;
  v.via_delta = delta > 0.0;
  v.via_positive_data = inf0 > 0.0;
  v.holds = v.lhs > 1.0 && (v.via_delta || v.via_positive_data);
  return v;
}

inline ConditionVerdict check_condition_corollary(const ModelParams& params, const RealField& u0) {
  const auto d = summarize(u0);
  return check_condition_corollary(check_assumption2(params.semilinearity).delta, d.mean, d.inf);
}

enum class CeilingPath { theorem1, rlarge, corollary };

inline std::string_view to_string(CeilingPath p) {
  switch (p) {
    case CeilingPath::theorem1: return "theorem1";
    case CeilingPath::rlarge: return "rlarge";
    case CeilingPath::corollary: return "corollary";
  }
  return "?";
}

/// Pointwise ceiling s0 for the given path. Throws when the path's hypothesis fails.
inline double compute_s0(const ModelParams& params, const DataSummary& d, CeilingPath path,
                         double margin = 0.0) {
  const double scale = 1.0 + margin;
  switch (path) {
    case CeilingPath::theorem1: {
      const auto a1 = check_assumption1(params.semilinearity);
      if (!a1.holds) throw DomainError("no ceiling guaranteed: assumption on gamma fails");
      return scale * std::max({1.0, d.sup, a1.y0.value_or(0.0)});
    }
    case CeilingPath::rlarge: {
      const double delta = check_assumption2(params.semilinearity).delta;
      const auto c = check_condition_teoL(params.r, delta, d.mean, d.inf);
      if (!c.holds) throw DomainError("no ceiling guaranteed: r + delta/(4 pi^2 max{<u0>,1}) <= 1");
      const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
      const double denom = 1.0 - params.r - delta / (four_pi2 * std::max(d.mean, 1.0));
      const double logistic_bound = -2.0 * params.r / denom;
      const double mass_bound = 2.0 / std::numbers::pi * n1_from_l1(d.l1);
      return scale * std::max({mass_bound, logistic_bound, d.sup});
    }
    case CeilingPath::corollary: {
      const double delta = check_assumption2(params.semilinearity).delta;
      if (params.r != 0.0) throw DomainError("corollary ceiling requires r = 0");
      const auto c = check_condition_corollary(delta, d.mean, d.inf);
      if (!c.holds) throw DomainError("no ceiling guaranteed: delta/(4 pi^2 <u0>) <= 1");
      return scale * std::max(2.0 / std::numbers::pi * n1_from_l1(d.l1), d.sup);
    }
  }
  return 0.0;
}

inline double compute_s0(const ModelParams& params, const RealField& u0, CeilingPath path,
                         double margin = 0.0) {
  return compute_s0(params, summarize(u0), path, margin);
}

/// inf u0 * exp(-max{1, <u0>} T).
inline double positivity_floor(double inf0, double mean0, double T) {
  if (inf0 <= 0.0) return 0.0;
  return inf0 * std::exp(-std::max(1.0, mean0) * T);
}

inline double positivity_floor(const RealField& u0, double T) {
  const auto d = summarize(u0);
  return positivity_floor(d.inf, d.mean, T);
}

/// Preferred ceiling path: rlarge when its condition holds, else theorem1.
inline std::optional<CeilingPath> applicable_path(const ModelParams& params, const DataSummary& d) {
  const double delta = check_assumption2(params.semilinearity).delta;
  if (check_condition_teoL(params.r, delta, d.mean, d.inf).holds) return CeilingPath::rlarge;
  if (check_assumption1(params.semilinearity).holds) return CeilingPath::theorem1;
  if (params.r == 0.0 && check_condition_corollary(delta, d.mean, d.inf).holds) return CeilingPath::corollary;
  return std::nullopt;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Range of densities a solution can visit on [0, T]; mu only matters there.
inline Interval existence_interval(const ModelParams& params, const DataSummary& d, double T,
                                   double margin = 0.0) {
  const auto path = applicable_path(params, d);
  if (!path) throw DomainError("no ceiling guaranteed for these parameters");
  return {positivity_floor(d.inf, d.mean, T), compute_s0(params, d, *path, margin)};
}

inline Interval existence_interval(const ModelParams& params, const RealField& u0, double T,
                                   double margin = 0.0) {
  return existence_interval(params, summarize(u0), T, margin);
}

struct TheoremConstants {
  double n1 = 0.0;
  double mean0 = 0.0;
  double sup0 = 0.0;
  double inf0 = 0.0;
  double delta = 0.0;
  std::optional<double> s0;
  std::optional<CeilingPath> path;

  double s1(double T) const { return positivity_floor(inf0, mean0, T); }
};

inline TheoremConstants theorem_constants(const ModelParams& params, const RealField& u0) {
  const auto d = summarize(u0);
  TheoremConstants tc;
  tc.n1 = n1_from_l1(d.l1);
  tc.mean0 = d.mean;
  tc.sup0 = d.sup;
  tc.inf0 = d.inf;
  tc.path = applicable_path(params, d);
  if (tc.path == CeilingPath::theorem1) {
    tc.delta = check_assumption1(params.semilinearity).delta;
  } else {
    tc.delta = check_assumption2(params.semilinearity).delta;
  }
  if (tc.path) tc.s0 = compute_s0(params, d, *tc.path);
  return tc;
}

}  // namespace fks
