#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fks/stepper.hpp"
#include "oracles.hpp"

namespace {

using namespace fks;
using std::numbers::pi;

double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a.values[j] - b.values[j]));
  return m;
}

State make_state(Grid g, double (*f)(double), ModelParams p) {
  State s;
  s.u = sample(g, f);
  s.params = p;
  return s;
}

TEST(Rhs, HomogeneousStates) {
  Grid g(64);
  ModelParams p;
  p.semilinearity = Semilinearity::affine(0.5);
  p.r = 3.0;
  auto one = make_state(g, [](double) { return 1.0; }, p);
  for (double v : stepper::rhs(one).values) EXPECT_NEAR(v, 0.0, 1e-15);
  p.r = 1.0;
  auto two = make_state(g, [](double) { return 2.0; }, p);
  for (double v : stepper::rhs(two).values) EXPECT_NEAR(v, -2.0, 1e-14);
}

TEST(Rhs, MatchesExpandedProductForm) {
  // u = 1 + a cos x: Hu = a sin x, Lambda u = a cos x, u_x = -a sin x, v_x = a sin x.
  Grid g(128);
  const double a = 0.1;
  for (const auto& sem : {Semilinearity::constant(1.0), Semilinearity::linear(), Semilinearity::affine(0.3)}) {
    ModelParams p;
    p.semilinearity = sem;
    State s;
    s.params = p;
    s.u = sample(g, [a](double x) { return 1.0 + a * std::cos(x); });
    const auto out = stepper::rhs(s);
    for (int j = 0; j < g.n(); ++j) {
      const double x = g.x(j);
      const double u = 1.0 + a * std::cos(x);
      const double ux = -a * std::sin(x);
      const double hu = a * std::sin(x);
      const double lu = a * std::cos(x);
      const double vx = a * std::sin(x);
      const double expanded = -sem.mu_prime(u) * ux * hu - sem.mu(u) * lu + ux * vx + u * (u - 1.0);
      EXPECT_NEAR(out.values[static_cast<std::size_t>(j)], expanded, 1e-8) << sem.name();
    }
  }
}

TEST(Rhs, FluxHasNoMean) {
  Grid g(64);
  ModelParams p;
  p.semilinearity = Semilinearity::power(2.0);
  State s;
  s.params = p;
  s.u = oracle::sample_trig(g, oracle::random_trig(2, 15, 0.3, 1.0));
  EXPECT_EQ(stepper::nonlinear_spectrum(s.u, p).half[0], cplx(0.0, 0.0));
}

TEST(Cfl, WorkedValues) {
  ModelParams p;
  p.semilinearity = Semilinearity::constant(1.0);
  StepControl ctrl;
  auto s = make_state(Grid(128), [](double) { return 1.0; }, p);
  EXPECT_NEAR(stepper::cfl_dt(s, ctrl), 0.00625, 1e-15);

  ModelParams q;
  q.coupling = false;
  auto zero = make_state(Grid(64), [](double) { return 0.0; }, q);
  EXPECT_EQ(stepper::cfl_dt(zero, ctrl), ctrl.dt_max);
}

TEST(Cfl, DoublingResolutionHalvesStep) {
  ModelParams p;
  p.semilinearity = Semilinearity::constant(1.0);
  p.coupling = false;
  StepControl ctrl;
  ctrl.dt_max = 1.0;
  auto f = [](double x) { return 1.0 + 0.5 * std::cos(x); };
  const double a = stepper::cfl_dt(make_state(Grid(64), f, p), ctrl);
  const double b = stepper::cfl_dt(make_state(Grid(128), f, p), ctrl);
  EXPECT_NEAR(a / b, 2.0, 1e-12);
}

TEST(Step, SteadyStateUnchanged) {
  ModelParams p;
  p.semilinearity = Semilinearity::ramped_gamma(0.2, 1.0, 0.5);
  p.r = 1.0;
  p.epsilon = 0.01;
  auto s = make_state(Grid(64), [](double) { return 1.0; }, p);
  const auto out = stepper::step(s, StepControl{});
  EXPECT_EQ(out.classified, Classification::ok);
  EXPECT_LE(max_abs_diff(out.state.u, s.u), 1e-14);
  EXPECT_GT(out.state.t, 0.0);
}

TEST(Step, LogisticOdeForConstantState) {
  ModelParams p;
  p.semilinearity = Semilinearity::constant(2.0);
  p.coupling = false;
  p.r = 1.3;
  State s = make_state(Grid(32), [](double) { return 0.2; }, p);
  StepControl ctrl;
  ctrl.dt_fixed = 1e-3;
  const auto traj = stepper::integrate(s, ctrl, 1.0);
  EXPECT_EQ(traj.classification, Classification::ok);
  EXPECT_NEAR(traj.final_state.t, 1.0, 1e-12);
  const double exact = oracle::logistic(0.2, 1.3, 1.0);
  for (double v : traj.final_state.u.values) EXPECT_NEAR(v, exact, 1e-6);
}

TEST(Step, ViscousFactorIsExact) {
  // A vanishing flux strength leaves eps u_xx as the only dynamics.
  ModelParams p;
  p.semilinearity = Semilinearity::constant(1e-300);
  p.coupling = false;
  p.epsilon = 0.1;
  State s = make_state(Grid(64), [](double x) { return 1.0 + std::cos(x); }, p);
  StepControl ctrl;
  ctrl.dt_max = 0.5;
  ctrl.dt_fixed = 0.1;
  const auto traj = stepper::integrate(s, ctrl, 1.0);
  EXPECT_EQ(traj.steps, 10u);
  const auto expect = sample(Grid(64), [](double x) { return 1.0 + std::exp(-0.1) * std::cos(x); });
  EXPECT_LE(max_abs_diff(traj.final_state.u, expect), 1e-12);
}

TEST(Step, StalledBelowMinimumStep) {
  auto s = make_state(Grid(32), [](double) { return 1.0; }, ModelParams{});
  StepControl ctrl;
  const auto out = stepper::step(s, ctrl, 1e-14);
  EXPECT_EQ(out.classified, Classification::stalled);
  EXPECT_EQ(out.state.t, 0.0);
}

TEST(Step, AmplitudeBlowup) {
  auto s = make_state(Grid(32), [](double x) { return 1.0 + 0.5 * std::cos(x); }, ModelParams{});
  StepControl ctrl;
  ctrl.blowup_threshold = 1.2;
  EXPECT_EQ(stepper::step(s, ctrl).classified, Classification::blowup);
}

TEST(Step, PersistentSpectralTailIsBlowup) {
  ModelParams p;
  p.semilinearity = Semilinearity::constant(1.0);
  p.coupling = false;
  Grid g(32);
  State s;
  s.params = p;
  s.u = sample(g, [](double x) { return 1.0 + 0.1 * std::cos(14 * x); });
  StepControl ctrl;
  ctrl.dt_fixed = 1e-4;
  for (int i = 1; i <= 4; ++i) {
    auto out = stepper::step(s, ctrl);
    EXPECT_EQ(out.classified, Classification::ok) << i;
    EXPECT_EQ(out.state.tail_strikes, i);
    EXPECT_GT(out.tail_fraction, 0.9);
    s = out.state;
  }
  EXPECT_EQ(stepper::step(s, ctrl).classified, Classification::blowup);
  const auto traj = stepper::integrate(make_state(g, [](double x) { return 1.0 + 0.1 * std::cos(14 * x); }, p),
                                       ctrl, 1.0);
  EXPECT_EQ(traj.classification, Classification::blowup);
  EXPECT_EQ(traj.steps, 5u);
  EXPECT_TRUE(std::isfinite(traj.final_state.u.values[0]));
}

TEST(Step, TailFractionIgnoresRoundoffSpectra) {
  Spectrum s(Grid(32));
  s.half[15] = 1e-14;
  EXPECT_EQ(stepper::tail_fraction(s), 0.0);
  s.half[1] = 1.0;
  s.half[15] = 1.0;
  EXPECT_NEAR(stepper::tail_fraction(s), 0.5, 1e-15);
}

TEST(Control, Validation) {
  StepControl c;
  EXPECT_NO_THROW(c.validate());
  c.c_cfl = 1.5;
  EXPECT_THROW(c.validate(), DomainError);
  c = StepControl{};
  c.dt_min = 1.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = StepControl{};
  c.tail_persistence = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Integrate, ZeroHorizonGivesInitialRecord) {
  auto s = make_state(Grid(32), [](double x) { return 1.0 + 0.2 * std::sin(x); }, ModelParams{});
  const auto traj = stepper::integrate(s, StepControl{}, 0.0);
  EXPECT_EQ(traj.steps, 0u);
  ASSERT_EQ(traj.records.size(), 1u);
  EXPECT_EQ(traj.records[0].t, 0.0);
}

TEST(Integrate, SteadyStateRecordsIdentical) {
  ModelParams p;
  p.semilinearity = Semilinearity::affine(0.5);
  p.r = 1.0;
  auto s = make_state(Grid(32), [](double) { return 1.0; }, p);
  const auto traj = stepper::integrate(s, StepControl{}, 10.0, {.record_every = 50, .keep_fields = false, .observers = {}});
  EXPECT_EQ(traj.classification, Classification::ok);
  EXPECT_NEAR(traj.final_state.t, 10.0, 1e-12);
  for (const auto& r : traj.records) {
    EXPECT_NEAR(r.max, 1.0, 1e-10);
    EXPECT_NEAR(r.min, 1.0, 1e-10);
    EXPECT_NEAR(r.mass, traj.records[0].mass, 1e-10);
  }
}

TEST(Integrate, ObserversAndFieldsFollowCadence) {
  auto s = make_state(Grid(32), [](double x) { return 1.0 + 0.2 * std::cos(x); }, ModelParams{});
  StepControl ctrl;
  ctrl.dt_fixed = 0.01;
  std::vector<std::size_t> seen;
  stepper::IntegrateOptions opts;
  opts.record_every = 4;
  opts.keep_fields = true;
  opts.observers.push_back({3, [&](const State&, std::size_t i) { seen.push_back(i); }});
  const auto traj = stepper::integrate(s, ctrl, 0.1, opts);
  EXPECT_EQ(traj.steps, 10u);
  // Steps 0, 4, 8 and the final step.
  EXPECT_EQ(traj.records.size(), 4u);
  EXPECT_EQ(traj.fields.size(), traj.records.size());
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 3, 6, 9, 10}));
}

TEST(Integrate, MassConservedWithoutReaction) {
  ModelParams p;
  p.semilinearity = Semilinearity::affine(0.5);
  p.epsilon = 1e-3;
  auto s = make_state(Grid(64), [](double x) { return 1.0 + 0.5 * std::cos(x) + 0.2 * std::sin(3 * x); }, p);
  StepControl ctrl;
  ctrl.dt_fixed = 1e-3;
  const auto traj = stepper::integrate(s, ctrl, 1.0, {.record_every = 100, .keep_fields = false, .observers = {}});
  const double m0 = traj.records.front().mass;
  for (const auto& r : traj.records) EXPECT_LE(std::abs(r.mass - m0), 1e-13 * m0);
}

TEST(Integrate, MeanLawWithReaction) {
  ModelParams p;
  p.semilinearity = Semilinearity::linear();
  p.r = 1.0;
  auto s = make_state(Grid(64), [](double x) { return 0.6 + 0.3 * std::cos(x); }, p);
  StepControl ctrl;
  ctrl.dt_fixed = 1e-3;
  const auto traj = stepper::integrate(s, ctrl, 0.05, {.record_every = 1, .keep_fields = false, .observers = {}});
  const auto& rs = traj.records;
  for (std::size_t i = 2; i + 2 < rs.size(); ++i) {
    std::span<const DiagnosticsRecord> w(rs.data() + i - 2, 5);
    const double rate = diagnostics::centered_rate(w, 2, [](const DiagnosticsRecord& r) { return r.mean; });
    const double l2mean = rs[i].l2 * rs[i].l2 / (2 * pi);
    EXPECT_NEAR(rate, p.r * (rs[i].mean - l2mean), 1e-7);
  }
}

TEST(Integrate, UncoupledL2IdentityHolds) {
  ModelParams p;
  p.semilinearity = Semilinearity::linear();
  p.coupling = false;
  auto s = make_state(Grid(64), [](double x) { return 1.0 + 0.4 * std::cos(x); }, p);
  StepControl ctrl;
  ctrl.dt_fixed = 1e-3;
  const auto traj = stepper::integrate(s, ctrl, 0.05, {.record_every = 1, .keep_fields = false, .observers = {}});
  for (const auto& r : traj.records) {
    if (std::isnan(r.l2_balance_residual)) continue;
    EXPECT_LE(r.l2_balance_residual, 1e-6 * r.l2_rate_scale);
    EXPECT_LE(r.entropy_balance_residual, 1e-6 * r.entropy_rate_scale);
  }
}

TEST(Integrate, ThirdOrderInTime) {
  ModelParams p;
  p.semilinearity = Semilinearity::affine(0.5);
  p.r = 0.5;
  p.epsilon = 0.01;
  auto s = make_state(Grid(64), [](double x) { return 1.0 + 0.5 * std::cos(x); }, p);
  std::vector<RealField> finals;
  for (double dt : {0.02, 0.01, 0.005}) {
    StepControl ctrl;
    ctrl.dt_max = 0.05;
    ctrl.dt_fixed = dt;
    finals.push_back(stepper::integrate(s, ctrl, 0.5).final_state.u);
  }
  const double e1 = max_abs_diff(finals[0], finals[1]);
  const double e2 = max_abs_diff(finals[1], finals[2]);
  EXPECT_GT(e1 / e2, 6.0);
}

TEST(Integrate, SubcriticalSteadyStateAndApproximateMass) {
  ModelParams p;
  p.alpha = 0.8;
  p.semilinearity = Semilinearity::constant(1.0);
  auto one = make_state(Grid(32), [](double) { return 1.0; }, p);
  const auto t1 = stepper::integrate(one, StepControl{}, 1.0);
  for (double v : t1.final_state.u.values) EXPECT_NEAR(v, 1.0, 1e-13);
  // With a constant mu the nonlocal term is still mean free.
  auto s = make_state(Grid(64), [](double x) { return 1.0 + 0.3 * std::cos(x); }, p);
  const auto t2 = stepper::integrate(s, StepControl{}, 1.0);
  EXPECT_NEAR(t2.records.back().mass, t2.records.front().mass, 1e-12);
}

TEST(Integrate, ResumeFromIntermediateStateIsBitIdentical) {
  ModelParams p;
  p.semilinearity = Semilinearity::affine(0.5);
  p.r = 0.5;
  auto s = make_state(Grid(64), [](double x) { return 1.0 + 0.5 * std::cos(x); }, p);
  StepControl ctrl;
  State mid;
  stepper::IntegrateOptions opts;
  opts.observers.push_back({25, [&](const State& st, std::size_t i) {
                              if (i == 25) mid = st;
                            }});
  const auto full = stepper::integrate(s, ctrl, 1.0, opts);
  const auto resumed = stepper::integrate(mid, ctrl, 1.0);
  EXPECT_EQ(resumed.final_state.u.values, full.final_state.u.values);
}

}  // namespace
