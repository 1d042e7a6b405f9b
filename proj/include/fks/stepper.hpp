#pragma once

// Right-hand side of the viscous approximate problem and its time integration:
// SSP-RK3 with an exact integrating factor for eps*u_xx, 2/3 dealiasing of the
// nonlinear terms, and amplitude / spectral-tail blowup classification.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "fks/diagnostics.hpp"
#include "fks/model.hpp"
#include "fks/spectral.hpp"

namespace fks {

struct StepControl {
  double c_cfl = 0.4;
  double dt_max = 1e-2;
  double dt_min = 1e-12;
  double blowup_threshold = 1e6;
  double tail_fraction_threshold = 0.1;
  int tail_persistence = 5;
  double dt_fixed = 0.0;  // > 0 disables the CFL controller

  void validate() const {
    if (!(c_cfl > 0.0 && c_cfl <= 1.0)) throw DomainError("c_cfl must lie in (0, 1]");
    if (!(dt_min > 0.0 && dt_min < dt_max)) throw DomainError("need 0 < dt_min < dt_max");
    if (!(blowup_threshold > 0.0) || !(tail_fraction_threshold > 0.0)) {
      throw DomainError("blowup thresholds must be positive");
    }
    if (tail_persistence < 1) throw DomainError("tail_persistence must be >= 1");
    if (dt_fixed < 0.0) throw DomainError("dt_fixed must be >= 0");
  }
};

struct State {
  double t = 0.0;
  RealField u;
  ModelParams params;
  int tail_strikes = 0;  // consecutive steps with an over-threshold spectral tail
};

enum class Classification { ok, blowup, stalled };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::ok: return "ok";
    case Classification::blowup: return "blowup";
    case Classification::stalled: return "stalled";
  }
  return "?";
}

struct StepOutcome {
  State state;
  double dt_used = 0.0;
  Classification classified = Classification::ok;
  double tail_fraction = 0.0;
};

namespace stepper {

// mu and mu' are evaluated at max(u, 0): densities are nonnegative and only
// roundoff-scale negativity is expected.
inline double mu_at(const Semilinearity& sem, double u) { return sem.mu(std::max(u, 0.0)); }

/// Spectrum of d_x(-mu(u) Hu + u d_x v) + r u(1-u) (alpha = 1), or
/// d_x(u d_x v) - mu(u) Lambda^alpha u + r u(1-u) (alpha < 1). Not dealiased.
inline Spectrum nonlinear_spectrum(const RealField& u, const ModelParams& p) {
  const Grid g = u.grid;
  const auto uh = spectral::forward(u);
  RealField dv(g);
  if (p.coupling) {
    auto s = uh;
    spectral::apply_chemo_gradient(s);
    dv = spectral::inverse(s);
  }
  const auto& sem = p.semilinearity;
  RealField flux(g);
  RealField reaction(g);
  if (p.alpha == 1.0) {
    auto s = uh;
    spectral::apply_hilbert(s);
    const auto hu = spectral::inverse(s);
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double uj = u.values[j];
      flux.values[j] = -mu_at(sem, uj) * hu.values[j] + uj * dv.values[j];
      reaction.values[j] = p.r * uj * (1.0 - uj);
    }
  } else {
    auto s = uh;
    spectral::apply_frac_laplacian(s, p.alpha);
    const auto lam = spectral::inverse(s);
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double uj = u.values[j];
      flux.values[j] = uj * dv.values[j];
      reaction.values[j] = p.r * uj * (1.0 - uj) - mu_at(sem, uj) * lam.values[j];
    }
  }
  auto out = spectral::forward(flux);
  spectral::apply_derivative(out);
  const auto rh = spectral::forward(reaction);
  for (std::size_t k = 0; k < out.half.size(); ++k) out.half[k] += rh.half[k];
  return out;
}

/// Nonlinear right-hand side in physical space (viscous term excluded).
inline RealField rhs(const State& state) { return spectral::inverse(nonlinear_spectrum(state.u, state.params)); }

/// Energy fraction of the spectrum beyond the 2/3 cutoff, relative to all k != 0.
inline double tail_fraction(const Spectrum& s) {
  const auto cut = static_cast<std::size_t>(spectral::dealias_cutoff(s.grid.n()));
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k < s.half.size(); ++k) {
    const double e = std::norm(s.half[k]);
    total += e;
    if (k > cut) tail += e;
  }
  // Near a steady state the right-hand side is pure roundoff and the ratio carries no information.
  if (!(total > 1e-24)) return 0.0;
  return tail / total;
}

/// Explicit stability limit for the dissipative and transport terms.
inline double cfl_dt(const State& state, const StepControl& ctrl) {
  const auto& u = state.u;
  const auto& p = state.params;
  const auto& sem = p.semilinearity;
  const double kmax = u.grid.n() / 2.0;
  RealField hu = spectral::hilbert(u);
  RealField dv(u.grid);
  if (p.coupling) dv = spectral::chemo_gradient(u);
  double max_mu = 0.0;
  double max_transport = 0.0;
  double max_u = 0.0;
  double max_dv = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double uj = std::max(u.values[j], 0.0);
    max_mu = std::max(max_mu, sem.mu(uj));
    max_transport = std::max(max_transport, std::abs(sem.mu_prime(uj) * hu.values[j]));
    max_u = std::max(max_u, std::abs(u.values[j]));
    max_dv = std::max(max_dv, std::abs(dv.values[j]));
  }
  const double rate = std::pow(kmax, p.alpha) * max_mu + kmax * (max_dv + max_transport) +
                      p.r * (1.0 + 2.0 * max_u);
  if (!(rate > 0.0)) return ctrl.dt_max;
  return std::min(ctrl.dt_max, ctrl.c_cfl / rate);
}

namespace detail {

inline std::vector<double> decay_factors(const Grid& g, double eps, double tau) {
  std::vector<double> e(g.half_size());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = std::exp(-eps * static_cast<double>(k * k) * tau);
  return e;
}

}  // namespace detail

/// One integrating-factor SSP-RK3 step of size dt. Written in increment form
/// so that the k = 0 coefficient is reproduced bit for bit when the nonlinear
/// term has no mean.
inline StepOutcome step(const State& state, const StepControl& ctrl, double dt) {
  StepOutcome out;
  out.state = state;
  out.dt_used = dt;
  if (!(dt >= ctrl.dt_min)) {
    out.classified = Classification::stalled;
    return out;
  }
  const Grid g = state.u.grid;
  const auto& p = state.params;
  const auto e_full = detail::decay_factors(g, p.epsilon, dt);
  const auto e_half = detail::decay_factors(g, p.epsilon, 0.5 * dt);
  const auto e_back = detail::decay_factors(g, p.epsilon, -0.5 * dt);

  try {
    const auto u0 = spectral::forward(state.u);
    const auto n0_raw = nonlinear_spectrum(state.u, p);
    out.tail_fraction = tail_fraction(n0_raw);
    const auto n0 = spectral::dealias(n0_raw);

    Spectrum a(g);
    for (std::size_t k = 0; k < a.half.size(); ++k) a.half[k] = e_full[k] * (u0.half[k] + dt * n0.half[k]);
    const auto n1 = spectral::dealias(nonlinear_spectrum(spectral::inverse(a), p));

    Spectrum b(g);
    for (std::size_t k = 0; k < b.half.size(); ++k) {
      const cplx base = e_half[k] * u0.half[k];
      b.half[k] = base + 0.25 * (e_back[k] * (a.half[k] + dt * n1.half[k]) - base);
    }
    const auto n2 = spectral::dealias(nonlinear_spectrum(spectral::inverse(b), p));

    Spectrum c(g);
    for (std::size_t k = 0; k < c.half.size(); ++k) {
      const cplx base = e_full[k] * u0.half[k];
      c.half[k] = base + (2.0 / 3.0) * (e_half[k] * (b.half[k] + dt * n2.half[k]) - base);
    }
    out.state.u = spectral::inverse(c);
  } catch (const NonFiniteError&) {
    out.classified = Classification::blowup;
    return out;
  }
  out.state.t = state.t + dt;

  double amplitude = 0.0;
  bool finite = true;
  for (double v : out.state.u.values) {
    finite = finite && std::isfinite(v);
    amplitude = std::max(amplitude, std::abs(v));
  }
  out.state.tail_strikes = out.tail_fraction > ctrl.tail_fraction_threshold ? state.tail_strikes + 1 : 0;
  if (!finite || amplitude > ctrl.blowup_threshold || out.state.tail_strikes >= ctrl.tail_persistence) {
    out.classified = Classification::blowup;
  }
  return out;
}

inline StepOutcome step(const State& state, const StepControl& ctrl) {
  const double dt = ctrl.dt_fixed > 0.0 ? ctrl.dt_fixed : cfl_dt(state, ctrl);
  return step(state, ctrl, dt);
}

struct Observer {
  std::size_t every = 1;
  std::function<void(const State&, std::size_t step)> on_sample;
};

struct IntegrateOptions {
  std::size_t record_every = 10;   // diagnostics cadence in steps
  bool keep_fields = false;        // store u at every recorded time
  std::vector<Observer> observers;
};

struct TrajectoryRecord {
  std::vector<DiagnosticsRecord> records;
  std::vector<double> field_times;
  std::vector<RealField> fields;
  Classification classification = Classification::ok;
  std::size_t steps = 0;
  State final_state;
  double last_dt = 0.0;
};

/// Relative slack for landing on the horizon: a remaining interval shorter
/// than this fraction of T counts as arrived.
inline constexpr double horizon_slack = 1e-9;

inline TrajectoryRecord integrate(State state, const StepControl& ctrl, double T, const IntegrateOptions& opts = {}) {
  ctrl.validate();
  state.params.validate();
  TrajectoryRecord traj;
  const std::size_t every = std::max<std::size_t>(opts.record_every, 1);

  auto sample = [&](const State& s, std::size_t step_index) {
    traj.records.push_back(diagnostics::compute_record(s.t, s.u, s.params));
    if (opts.keep_fields) {
      traj.field_times.push_back(s.t);
      traj.fields.push_back(s.u);
    }
    (void)step_index;
  };
  auto notify = [&](const State& s, std::size_t step_index, bool force) {
    for (const auto& obs : opts.observers) {
      if (obs.on_sample && (force || step_index % std::max<std::size_t>(obs.every, 1) == 0)) {
        obs.on_sample(s, step_index);
      }
    }
  };

  sample(state, 0);
  notify(state, 0, true);
  const double slack = horizon_slack * std::max(1.0, std::abs(T));
  std::size_t n = 0;
  while (T - state.t > slack) {
    double dt = ctrl.dt_fixed > 0.0 ? ctrl.dt_fixed : cfl_dt(state, ctrl);
    dt = std::min(dt, T - state.t);
    auto outcome = step(state, ctrl, dt);
    ++n;
    traj.last_dt = dt;
    if (outcome.classified != Classification::ok) {
      traj.classification = outcome.classified;
      // Keep the last finite state; the failed update is discarded.
      if (outcome.classified == Classification::blowup) {
        bool finite = std::all_of(outcome.state.u.values.begin(), outcome.state.u.values.end(),
                                  [](double v) { return std::isfinite(v); });
        if (finite && outcome.state.t > state.t) {
          state = std::move(outcome.state);
          sample(state, n);
        }
      }
      break;
    }
    state = std::move(outcome.state);
    const bool last = !(T - state.t > slack);
    if (n % every == 0 || last) sample(state, n);
    notify(state, n, last);
  }
  traj.steps = n;
  traj.final_state = std::move(state);
  diagnostics::fill_balance_residuals(traj.records);
  return traj;
}

}  // namespace stepper
}  // namespace fks
