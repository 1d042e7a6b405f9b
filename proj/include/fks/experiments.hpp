#pragma once

// Scenario runs, named checks, theorem campaigns, parameter sweeps, and the
// files each run leaves behind.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fks/diagnostics.hpp"
#include "fks/model.hpp"
#include "fks/scenario.hpp"
#include "fks/stepper.hpp"

namespace fks {

enum class VerdictStatus { pass, fail, precondition_unmet };

inline std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::pass: return "pass";
    case VerdictStatus::fail: return "fail";
    case VerdictStatus::precondition_unmet: return "precondition unmet";
  }
  return "?";
}

struct Verdict {
  std::string check;
  VerdictStatus status = VerdictStatus::pass;
  double measured = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  double margin = std::numeric_limits<double>::quiet_NaN();  // >= 0 means inside tolerance
  std::string detail;

  bool failed() const { return status == VerdictStatus::fail; }
};

/// Per-state inequality reports, evaluated on the diagnostics cadence.
struct SpotSample {
  double t = 0.0;
  diagnostics::LuboReport lubo;
  diagnostics::MaxpointReport maxpoint;
  diagnostics::TricomiReport tricomi;
  double linf = 0.0;
};

struct SnapshotInfo {
  std::string file;
  double t = 0.0;
  std::size_t step = 0;
  int tail_strikes = 0;
};

struct CampaignResult {
  std::string scenario;
  std::string campaign = "run";
  bool ran = false;  // false when a gate refused the campaign
  std::vector<Verdict> verdicts;
  Classification classification = Classification::ok;
  stepper::TrajectoryRecord trajectory;
  std::vector<SpotSample> spots;
  std::vector<SnapshotInfo> snapshots;
  RealField u0{Grid(8)};
  json meta;

  bool any_failed() const {
    return std::any_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.failed(); });
  }
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // scenario files go to out_dir / spec.name
  std::vector<std::string> overrides;             // echoed into meta.json
  std::optional<CeilingPath> ceiling_path;        // defaults to the preferred applicable path
  std::string campaign = "run";
};

namespace experiments {

inline constexpr const char* classifier_label =
    "numerical surrogate: amplitude threshold, non-finite values, or a persistent spectral tail";

/// Run body(i) for i in [0, count) on up to `jobs` threads; rethrows the first failure.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Checks

struct CheckContext {
  const ScenarioSpec& spec;
  const DataSummary& d0;
  const stepper::TrajectoryRecord& traj;
  const std::vector<SpotSample>& spots;
  std::optional<CeilingPath> path;
};

namespace detail {

inline Verdict unmet(std::string name, double tol, std::string why) {
  return {std::move(name), VerdictStatus::precondition_unmet, std::numeric_limits<double>::quiet_NaN(), tol,
          std::numeric_limits<double>::quiet_NaN(), std::move(why)};
}

inline Verdict judged(std::string name, double tol, double measured, double margin, std::string detail = {}) {
  const bool ok = std::isfinite(margin) && margin >= 0.0;
  return {std::move(name), ok ? VerdictStatus::pass : VerdictStatus::fail, measured, tol, margin, std::move(detail)};
}

/// Least-squares slope of y against t.
inline double fitted_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double den = n * stt - st * st;
  return den > 0.0 ? (n * sty - st * sy) / den : std::numeric_limits<double>::quiet_NaN();
}

inline bool within(const DiagnosticsRecord& r, double t_max) { return r.t <= t_max * (1.0 + 1e-12); }

}  // namespace detail

inline Verdict evaluate_check(const CheckRequest& req, const CheckContext& cx) {
  const std::string& name = req.name;
  const double tol = req.tolerance.value_or(default_tolerance(name).value_or(0.0));
  const double t_max = req.t_max.value_or(cx.spec.horizon);
  const auto& recs = cx.traj.records;
  const auto& params = cx.spec.params;
  using detail::judged;
  using detail::unmet;

  if (name == "bounded") {
    double peak = 0.0;
    for (const auto& r : recs) peak = std::max(peak, r.linf);
    const bool ok = cx.traj.classification == Classification::ok;
    return {name, ok ? VerdictStatus::pass : VerdictStatus::fail, peak, tol, ok ? 0.0 : -1.0,
            std::string("classification ") + std::string(to_string(cx.traj.classification))};
  }
  if (name == "positivity_floor") {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
      if (!detail::within(r, t_max)) continue;
      worst = std::min(worst, r.min - positivity_floor(cx.d0.inf, cx.d0.mean, r.t));
    }
    return judged(name, tol, worst, worst + tol, "min over t of min u - floor(t)");
  }
  if (name == "ceiling") {
    if (!cx.path) return unmet(name, tol, "no ceiling path applies to these parameters");
    double s0 = 0.0;
    try {
      s0 = compute_s0(params, cx.d0, *cx.path, tol);
    } catch (const DomainError& e) {
      return unmet(name, tol, e.what());
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
      if (detail::within(r, t_max)) peak = std::max(peak, r.max);
    }
    return judged(name, tol, peak, s0 - peak,
                  "path " + std::string(to_string(*cx.path)) + ", s0 with margin = " + format_double(s0));
  }
  if (name == "mass_conservation") {
    if (params.r != 0.0) return unmet(name, tol, "mass is conserved only for r = 0");
    const double m0 = recs.front().mass;
    double drift = 0.0;
    for (const auto& r : recs) drift = std::max(drift, std::abs(r.mass - m0) / std::abs(m0));
    return judged(name, tol, drift, tol - drift, "max relative drift of the integral of u");
  }
  if (name == "mean_law") {
    if (recs.size() < 5) return unmet(name, tol, "fewer than five records");
    const double two_pi = 2.0 * std::numbers::pi;
    double worst = 0.0;
    double scale = std::abs(cx.d0.mean);
    for (std::size_t i = 2; i + 2 < recs.size(); ++i) {
      if (!detail::within(recs[i + 2], t_max)) break;
      std::span<const DiagnosticsRecord> w(recs.data() + i - 2, 5);
      const double rate = diagnostics::centered_rate(w, 2, [](const DiagnosticsRecord& r) { return r.mean; });
      const double mean_sq = recs[i].l2 * recs[i].l2 / two_pi;
      const double model = params.r * (recs[i].mean - mean_sq);
      worst = std::max(worst, std::abs(rate - model));
      scale = std::max(scale, params.r * (std::abs(recs[i].mean) + mean_sq));
    }
    const double rel = worst / scale;
    return judged(name, tol, rel, tol - rel, "relative residual of d<u>/dt = r(<u> - <u^2>)");
  }
  if (name == "hhalf_linear_growth") {
    const auto a1 = check_assumption1(params.semilinearity);
    if (!a1.holds) return unmet(name, tol, "needs gamma >= delta > 0");
    std::vector<double> ts;
    std::vector<double> cum;
    double acc = 0.0;
    for (std::size_t i = 0; i < recs.size() && detail::within(recs[i], t_max); ++i) {
      if (i > 0) {
        const double h = recs[i].t - recs[i - 1].t;
        acc += 0.5 * h * a1.delta * (recs[i].fisher + recs[i - 1].fisher);
      }
      ts.push_back(recs[i].t);
      cum.push_back(acc);
    }
    const double half = 0.5 * std::min(t_max, cx.traj.final_state.t);
    std::vector<double> t1, y1, t2, y2;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      (ts[i] <= half ? t1 : t2).push_back(ts[i]);
      (ts[i] <= half ? y1 : y2).push_back(cum[i]);
    }
    if (t1.size() < 3 || t2.size() < 3) return unmet(name, tol, "too few records in one half of the run");
    const double s1 = detail::fitted_slope(t1, y1);
    const double s2 = detail::fitted_slope(t2, y2);
    return judged(name, tol, s2 / s1, s1 * (1.0 + tol) - s2,
                  "fitted slopes " + format_double(s1) + " (first half), " + format_double(s2) + " (second half)");
  }
  if (name == "entropy_balance" || name == "l2_balance") {
    if (params.alpha != 1.0) return unmet(name, tol, "identity holds for the critical order only");
    const bool entropy = name == "entropy_balance";
    double worst = 0.0;
    double scale = 0.0;
    std::size_t used = 0;
    for (const auto& r : recs) {
      if (!detail::within(r, t_max)) continue;
      const double res = entropy ? r.entropy_balance_residual : r.l2_balance_residual;
      const double sc = entropy ? r.entropy_rate_scale : r.l2_rate_scale;
      if (!std::isfinite(res) || !std::isfinite(sc)) continue;
      worst = std::max(worst, res);
      scale = std::max(scale, sc);
      ++used;
    }
    if (used == 0) return unmet(name, tol, "no complete balance window with defined terms");
    const double rel = scale > 0.0 ? worst / scale : worst;
    return judged(name, tol, rel, tol - rel, "max residual over max term magnitude");
  }
  if (name == "weak_residual") {
    if (cx.traj.fields.size() < 3) return unmet(name, tol, "trajectory fields were not stored");
    const double end = std::min(t_max, cx.traj.final_state.t);
    const diagnostics::TimeBump psi{0.1 * end, 0.9 * end};
    double worst = 0.0;
    std::string detail;
    for (int k = 0; k <= 3; ++k) {
      const auto w = diagnostics::weak_residual(cx.traj.field_times, cx.traj.fields, params, k, psi);
      const double floor = 1e-12 * 2.0 * std::numbers::pi * std::max(std::abs(cx.d0.mean), 1.0) * end;
      const double rel = w.residual / std::max(w.scale, floor);
      worst = std::max(worst, rel);
      detail += "k=" + std::to_string(k) + ": " + format_double(w.residual) + "; ";
    }
    return judged(name, tol, worst, tol - worst, detail);
  }
  if (name == "lubo") {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    for (const auto& s : cx.spots) {
      if (s.t > t_max * (1.0 + 1e-12) || !s.lubo.precondition_met) continue;
      ++used;
      worst = std::min(worst, s.lubo.margin / std::abs(s.lubo.lambda_at_max));
    }
    if (used == 0) return unmet(name, tol, "no sampled state with max u >= 4<u>");
    return judged(name, tol, worst, worst + tol,
                  std::to_string(used) + " states; relative margin of Lambda u(xmax) over max^2/(4 pi^2 <u>)");
  }
  if (name == "maxpoint") {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : cx.spots) {
      if (s.t > t_max * (1.0 + 1e-12)) continue;
      const double scale = std::max(s.linf, std::numeric_limits<double>::min());
      worst = std::min({worst, s.maxpoint.max_margin / scale, s.maxpoint.min_margin / scale});
    }
    if (!std::isfinite(worst)) return unmet(name, tol, "no sampled states");
    return judged(name, tol, worst, worst + tol, "worst margin at the grid argmax/argmin over ||u||_inf");
  }
  if (name == "tricomi") {
    double worst = 0.0;
    for (const auto& s : cx.spots) {
      if (s.t > t_max * (1.0 + 1e-12)) continue;
      worst = std::max(worst, s.tricomi.scale > 0.0 ? s.tricomi.residual / s.tricomi.scale : s.tricomi.residual);
    }
    return judged(name, tol, worst, tol - worst, "max residual over ||u_x||_inf^2");
  }
  if (name == "entropy_decay") {
    if (!(cx.d0.inf > 0.0)) return unmet(name, tol, "needs min u0 > 0");
    const double rate = 2.0 * cx.d0.inf;
    const double f0 = recs.front().entropy;
    double worst = 0.0;
    for (const auto& r : recs) {
      if (!detail::within(r, t_max)) continue;
      if (!std::isfinite(r.entropy)) return judged(name, tol, r.entropy, -1.0, "entropy undefined along the run");
      const double envelope = f0 * std::exp(-rate * r.t);
      if (f0 <= 0.0) {
        worst = std::max(worst, r.entropy > 1e-14 ? std::numeric_limits<double>::infinity() : 0.0);
      } else {
        worst = std::max(worst, r.entropy / envelope);
      }
    }
    return judged(name, tol, worst, 1.0 + tol - worst,
                  "max of F(t) / (F(0) exp(-" + format_double(rate) + " t))");
  }
  if (name == "fisher_decay") {
    if (!(cx.d0.inf > 0.0)) return unmet(name, tol, "needs min u0 > 0");
    const double rate = 2.0 * cx.d0.inf;
    double worst = 0.0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (!detail::within(recs[i], t_max)) break;
      // Below this level the information is pure roundoff.
      if (!(recs[i].fisher > 1e-24)) continue;
      for (std::size_t j = i + 1; j < recs.size() && detail::within(recs[j], t_max); ++j) {
        const double ratio = recs[j].fisher / (recs[i].fisher * std::exp(-rate * (recs[j].t - recs[i].t)));
        worst = std::max(worst, ratio);
      }
    }
    return judged(name, tol, worst, 1.0 + tol - worst, "max over t1 < t2 of I(t2) / (I(t1) exp(-rate (t2 - t1)))");
  }
  if (name == "convergence") {
    if (cx.traj.classification != Classification::ok) {
      return judged(name, tol, std::numeric_limits<double>::infinity(), -1.0, "run did not complete");
    }
    double dev = 0.0;
    for (double v : cx.traj.final_state.u.values) dev = std::max(dev, std::abs(v - cx.d0.mean));
    return judged(name, tol, dev, tol - dev, "||u(T) - <u0>||_inf");
  }
  throw SchemaError("unknown check '" + name + "'");
}

// ---------------------------------------------------------------------------
// Output files

inline std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%.9f.csv", t);
  return buf;
}

inline void write_snapshot(const std::filesystem::path& file, const RealField& u) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "x,u\n";
  char buf[96];
  for (int j = 0; j < u.grid.n(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u.grid.x(j), u.values[static_cast<std::size_t>(j)]);
    out << buf;
  }
}

inline RealField read_snapshot(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read " + file.string());
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("malformed snapshot line in " + file.string());
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  const int n = static_cast<int>(values.size());
  return RealField(Grid(n), std::move(values));
}

inline void write_diagnostics(const std::filesystem::path& file, const std::vector<DiagnosticsRecord>& recs) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << diagnostics::csv_header() << '\n';
  for (const auto& r : recs) out << diagnostics::csv_row(r) << '\n';
}

inline json verdicts_json(const CampaignResult& res) {
  json list = json::array();
  for (const auto& v : res.verdicts) {
    list.push_back({{"check", v.check},
                    {"status", std::string(to_string(v.status))},
                    {"measured", number_or_null(v.measured)},
                    {"tolerance", v.tolerance},
                    {"margin", number_or_null(v.margin)},
                    {"detail", v.detail}});
  }
  return {{"scenario", res.scenario},
          {"campaign", res.campaign},
          {"ran", res.ran},
          {"classification", std::string(to_string(res.classification))},
          {"classifier", classifier_label},
          {"verdicts", list}};
}

inline void write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

/// Derived constants of the initial data, for meta.json.
inline json constants_json(const ScenarioSpec& spec, const RealField& u0) {
  const auto d = summarize(u0);
  const auto& sem = spec.params.semilinearity;
  const auto a1 = check_assumption1(sem);
  const auto a2 = check_assumption2(sem);
  const auto big = check_condition_teoL(spec.params.r, a2.delta, d.mean, d.inf);
  const auto cor = check_condition_corollary(a2.delta, d.mean, d.inf);
  const auto path = applicable_path(spec.params, d);
  json s0 = nullptr;
  json s0_runtime = nullptr;
  json interval = nullptr;
  if (path) {
    s0 = compute_s0(spec.params, d, *path, 0.0);
    s0_runtime = compute_s0(spec.params, d, *path, 0.05);
    const auto iv = existence_interval(spec.params, d, spec.horizon);
    interval = {{"lo", iv.lo}, {"hi", iv.hi}};
  }
  auto verdict = [](const AssumptionVerdict& v) {
    json j{{"holds", v.holds}, {"delta", v.delta}, {"note", v.note}};
    j["y0"] = v.y0 ? json(*v.y0) : json(nullptr);
    j["witness"] = v.witness ? json(*v.witness) : json(nullptr);
    return j;
  };
  auto condition = [](const ConditionVerdict& c) {
    return json{{"holds", c.holds}, {"lhs", number_or_null(c.lhs)}, {"margin", number_or_null(c.margin)},
                {"via_delta", c.via_delta}, {"via_positive_data", c.via_positive_data}};
  };
  return {{"n1", n1_from_l1(d.l1)},
          {"l1", d.l1},
          {"mean0", d.mean},
          {"sup0", d.sup},
          {"inf0", d.inf},
          {"delta_assumption1", a1.delta},
          {"delta_assumption2", a2.delta},
          {"assumption1", verdict(a1)},
          {"assumption2", verdict(a2)},
          {"condition_rlarge", condition(big)},
          {"condition_corollary", condition(cor)},
          {"ceiling_path", path ? json(std::string(to_string(*path))) : json(nullptr)},
          {"s0", s0},
          {"s0_runtime_margin_5pct", s0_runtime},
          {"existence_interval", interval},
          {"positivity_floor_at_horizon", positivity_floor(d.inf, d.mean, spec.horizon)}};
}

// ---------------------------------------------------------------------------
// Runs

/// Integrate from `start` to the spec's horizon, sampling spot checks and snapshots.
inline CampaignResult integrate_scenario(const ScenarioSpec& spec, State start, const std::vector<CheckRequest>& checks,
                                         const std::optional<std::filesystem::path>& dir) {
  CampaignResult res;
  res.scenario = spec.name;
  res.ran = true;
  const bool need_spots = std::any_of(checks.begin(), checks.end(), [](const CheckRequest& c) {
    return c.name == "lubo" || c.name == "maxpoint" || c.name == "tricomi";
  });
  const bool need_fields =
      std::any_of(checks.begin(), checks.end(), [](const CheckRequest& c) { return c.name == "weak_residual"; });

  stepper::IntegrateOptions opts;
  opts.record_every = spec.record_every;
  opts.keep_fields = need_fields;
  if (need_spots) {
    opts.observers.push_back({spec.record_every, [&res](const State& s, std::size_t) {
                                SpotSample sp;
                                sp.t = s.t;
                                sp.lubo = diagnostics::check_lubo(s.u);
                                sp.maxpoint = diagnostics::check_maxpoint_inequalities(s.u);
                                sp.tricomi = diagnostics::check_tricomi(s.u);
                                for (double v : s.u.values) sp.linf = std::max(sp.linf, std::abs(v));
                                res.spots.push_back(sp);
                              }});
  }
  if (dir) {
    const std::size_t every = spec.snapshot_every;
    const double horizon = spec.horizon;
    opts.observers.push_back({every > 0 ? every : std::numeric_limits<std::size_t>::max(),
                              [&res, dir, every, horizon](const State& s, std::size_t step) {
                                const bool final = !(horizon - s.t > stepper::horizon_slack * std::max(1.0, horizon));
                                const bool cadence = every > 0 && step > 0 && step % every == 0;
                                if (!final && !cadence) return;
                                SnapshotInfo info{snapshot_name(s.t), s.t, step, s.tail_strikes};
                                write_snapshot(*dir / info.file, s.u);
                                res.snapshots.push_back(info);
                              }});
  }
  res.trajectory = stepper::integrate(std::move(start), spec.control, spec.horizon, opts);
  res.classification = res.trajectory.classification;
  if (dir && res.classification != Classification::ok) {
    // Keep the last finite state for inspection.
    const auto& fs = res.trajectory.final_state;
    SnapshotInfo info{snapshot_name(fs.t), fs.t, res.trajectory.steps, fs.tail_strikes};
    write_snapshot(*dir / info.file, fs.u);
    res.snapshots.push_back(info);
  }
  return res;
}

inline json snapshots_json(const std::vector<SnapshotInfo>& snaps) {
  json list = json::array();
  for (const auto& s : snaps) {
    list.push_back({{"file", s.file}, {"t", s.t}, {"step", s.step}, {"tail_strikes", s.tail_strikes}});
  }
  return list;
}

/// Integrate the scenario, evaluate `checks`, and write the output files when requested.
inline CampaignResult run_scenario(const ScenarioSpec& spec, const std::vector<CheckRequest>& checks,
                                   const RunOptions& opt = {}) {
  const Grid grid(spec.n);
  const auto u0 = spec.initial.build(grid);
  const auto d0 = summarize(u0);
  std::optional<std::filesystem::path> dir;
  if (opt.out_dir) {
    dir = *opt.out_dir / spec.name;
    std::filesystem::create_directories(*dir);
  }
  State start;
  start.u = u0;
  start.params = spec.params;
  auto res = integrate_scenario(spec, start, checks, dir);
  res.campaign = opt.campaign;
  res.u0 = u0;
  const auto path = opt.ceiling_path ? opt.ceiling_path : applicable_path(spec.params, d0);
  const CheckContext cx{spec, d0, res.trajectory, res.spots, path};
  for (const auto& c : checks) res.verdicts.push_back(evaluate_check(c, cx));

  res.meta = {{"scenario", spec.name},
              {"campaign", opt.campaign},
              {"schema_version", schema_version},
              {"effective_spec", to_json(spec)},
              {"overrides", opt.overrides},
              {"constants", constants_json(spec, u0)},
              {"classification", std::string(to_string(res.classification))},
              {"classifier", classifier_label},
              {"steps", res.trajectory.steps},
              {"final_t", res.trajectory.final_state.t},
              {"last_dt", res.trajectory.last_dt},
              {"snapshots", snapshots_json(res.snapshots)}};
  if (dir) {
    write_diagnostics(*dir / "diagnostics.csv", res.trajectory.records);
    write_json(*dir / "verdicts.json", verdicts_json(res));
    write_json(*dir / "meta.json", res.meta);
  }
  return res;
}

/// The spec's own check list.
inline CampaignResult run_scenario(const ScenarioSpec& spec, const RunOptions& opt = {}) {
  return run_scenario(spec, spec.checks, opt);
}

/// Continue a run from its latest snapshot strictly before the (possibly
/// overridden) horizon. Outputs go to <scenario dir>/resume.
inline CampaignResult resume_scenario(const std::filesystem::path& scenario_dir,
                                      const std::vector<std::string>& overrides = {}) {
  const auto meta = read_json_file((scenario_dir / "meta.json").string());
  if (!meta.contains("effective_spec") || !meta.contains("snapshots")) {
    throw SchemaError(scenario_dir.string() + "/meta.json lacks effective_spec or snapshots");
  }
  json doc = meta["effective_spec"];
  const auto errs = apply_overrides(doc, overrides);
  if (!errs.empty()) {
    std::string msg = "invalid overrides:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw SchemaError(msg);
  }
  const auto spec = scenario_from_json(doc);
  const json* best = nullptr;
  for (const auto& s : meta["snapshots"]) {
    const double t = s["t"].get<double>();
    if (t < spec.horizon && (!best || t > (*best)["t"].get<double>())) best = &s;
  }
  if (!best) throw SchemaError("no snapshot earlier than the horizon in " + scenario_dir.string());
  State start;
  start.t = (*best)["t"].get<double>();
  start.u = read_snapshot(scenario_dir / (*best)["file"].get<std::string>());
  if (start.u.grid.n() != spec.n) throw SchemaError("snapshot grid does not match grid.n");
  start.params = spec.params;
  start.tail_strikes = (*best)["tail_strikes"].get<int>();

  const auto dir = scenario_dir / "resume";
  std::filesystem::create_directories(dir);
  const std::vector<CheckRequest> checks{{"bounded", std::nullopt, std::nullopt}};
  auto res = integrate_scenario(spec, start, checks, dir);
  res.campaign = "resume";
  res.u0 = start.u;
  const auto d0 = summarize(start.u);
  const CheckContext cx{spec, d0, res.trajectory, res.spots, std::nullopt};
  for (const auto& c : checks) res.verdicts.push_back(evaluate_check(c, cx));
  res.meta = {{"scenario", spec.name},
              {"campaign", "resume"},
              {"schema_version", schema_version},
              {"effective_spec", to_json(spec)},
              {"overrides", overrides},
              {"resumed_from", *best},
              {"classification", std::string(to_string(res.classification))},
              {"classifier", classifier_label},
              {"steps", res.trajectory.steps},
              {"final_t", res.trajectory.final_state.t},
              {"snapshots", snapshots_json(res.snapshots)}};
  write_diagnostics(dir / "diagnostics.csv", res.trajectory.records);
  write_json(dir / "verdicts.json", verdicts_json(res));
  write_json(dir / "meta.json", res.meta);
  return res;
}

// ---------------------------------------------------------------------------
// Theorem campaigns

enum class Campaign { theorem1, rlarge, corollary, theorem3 };

inline std::string_view to_string(Campaign c) {
  switch (c) {
    case Campaign::theorem1: return "theorem1";
    case Campaign::rlarge: return "rlarge";
    case Campaign::corollary: return "corollary";
    case Campaign::theorem3: return "theorem3";
  }
  return "?";
}

/// The campaign's checks, with tolerances and windows taken from the spec where it names the same check.
inline std::vector<CheckRequest> campaign_checks(Campaign c, const ScenarioSpec& spec) {
  std::vector<std::string> names;
  switch (c) {
    case Campaign::theorem1:
      names = {"positivity_floor", "ceiling", "mass_conservation", "mean_law",
               "hhalf_linear_growth", "entropy_balance", "weak_residual"};
      break;
    case Campaign::rlarge:
    case Campaign::corollary:
      names = {"bounded", "ceiling", "positivity_floor", "lubo", "l2_balance", "mass_conservation"};
      break;
    case Campaign::theorem3:
      names = {"entropy_decay", "fisher_decay", "tricomi", "convergence"};
      break;
  }
  std::vector<CheckRequest> out;
  for (const auto& n : names) {
    CheckRequest req{n, std::nullopt, std::nullopt};
    for (const auto& s : spec.checks) {
      if (s.name == n) req = s;
    }
    out.push_back(req);
  }
  return out;
}

/// Reasons the campaign's hypotheses fail for this spec; empty when they hold.
inline std::vector<std::string> campaign_gate(Campaign c, const ScenarioSpec& spec, const DataSummary& d0) {
  std::vector<std::string> why;
  const auto& p = spec.params;
  if (p.alpha != 1.0) why.push_back("params.alpha must be 1");
  const double delta2 = check_assumption2(p.semilinearity).delta;
  switch (c) {
    case Campaign::theorem1: {
      const auto a1 = check_assumption1(p.semilinearity);
      if (!a1.holds) why.push_back("assumption on gamma fails: " + a1.note);
      break;
    }
    case Campaign::rlarge: {
      const auto v = check_condition_teoL(p.r, delta2, d0.mean, d0.inf);
      if (!v.holds) {
        why.push_back("r + delta/(4 pi^2 max{<u0>,1}) = " + format_double(v.lhs) +
                      " must exceed 1, with delta > 0 or min u0 > 0");
      }
      break;
    }
    case Campaign::corollary: {
      if (p.r != 0.0) why.push_back("params.r must be 0");
      const auto v = check_condition_corollary(delta2, d0.mean, d0.inf);
      if (!v.holds) why.push_back("delta/(4 pi^2 <u0>) = " + format_double(v.lhs) + " must exceed 1");
      break;
    }
    case Campaign::theorem3:
      if (p.semilinearity.kind() != Semilinearity::Kind::linear) why.push_back("semilinearity must be linear");
      if (p.coupling) why.push_back("params.coupling must be false");
      if (p.r != 0.0) why.push_back("params.r must be 0");
      if (std::abs(d0.mean - 1.0) > 1e-9) why.push_back("<u0> must be 1, got " + format_double(d0.mean));
      if (!(d0.inf > 0.0)) why.push_back("min u0 must be positive");
      break;
  }
  return why;
}

inline CampaignResult verify(Campaign c, const ScenarioSpec& spec, RunOptions opt = {}) {
  const auto u0 = spec.initial.build(Grid(spec.n));
  const auto d0 = summarize(u0);
  opt.campaign = std::string(to_string(c));
  const auto why = campaign_gate(c, spec, d0);
  if (!why.empty()) {
    CampaignResult res;
    res.scenario = spec.name;
    res.campaign = opt.campaign;
    res.u0 = u0;
    std::string detail;
    for (const auto& w : why) detail += (detail.empty() ? "" : "; ") + w;
    res.verdicts.push_back({"precondition", VerdictStatus::fail, std::numeric_limits<double>::quiet_NaN(), 0.0,
                            std::numeric_limits<double>::quiet_NaN(), "campaign refused: " + detail});
    res.meta = {{"scenario", spec.name}, {"campaign", opt.campaign}, {"effective_spec", to_json(spec)},
                {"overrides", opt.overrides}, {"constants", constants_json(spec, u0)}, {"refused", detail}};
    if (opt.out_dir) {
      const auto dir = *opt.out_dir / spec.name;
      std::filesystem::create_directories(dir);
      write_json(dir / "verdicts.json", verdicts_json(res));
      write_json(dir / "meta.json", res.meta);
    }
    return res;
  }
  switch (c) {
    case Campaign::theorem1: opt.ceiling_path = CeilingPath::theorem1; break;
    case Campaign::rlarge: opt.ceiling_path = CeilingPath::rlarge; break;
    case Campaign::corollary: opt.ceiling_path = CeilingPath::corollary; break;
    case Campaign::theorem3: break;
  }
  return run_scenario(spec, campaign_checks(c, spec), opt);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRun {
  double parameter = 0.0;
  Classification classification = Classification::ok;
  double final_t = 0.0;
  RealField final_u{Grid(8)};
  std::size_t steps = 0;
};

inline SweepRun sweep_run(const ScenarioSpec& spec, double parameter) {
  State s;
  s.u = spec.initial.build(Grid(spec.n));
  s.params = spec.params;
  stepper::IntegrateOptions opts;
  opts.record_every = std::numeric_limits<std::size_t>::max();
  auto traj = stepper::integrate(std::move(s), spec.control, spec.horizon, opts);
  return {parameter, traj.classification, traj.final_state.t, std::move(traj.final_state.u), traj.steps};
}

inline double l2_distance(const RealField& a, const RealField& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += (a.values[j] - b.values[j]) * (a.values[j] - b.values[j]);
  return std::sqrt(acc * a.grid.dx());
}

struct ViscosityReport {
  std::vector<SweepRun> runs;
  std::vector<double> differences;  // ||u_i(T) - u_{i+1}(T)||_L2
  bool cauchy = true;               // differences decrease monotonically

  json to_json() const {
    json rows = json::array();
    for (const auto& r : runs) {
      rows.push_back({{"epsilon", r.parameter}, {"classification", std::string(to_string(r.classification))},
                      {"final_t", r.final_t}, {"steps", r.steps}});
    }
    return {{"kind", "viscosity"}, {"runs", rows}, {"differences", differences}, {"cauchy_trend", cauchy},
            {"classifier", classifier_label}};
  }
};

inline const std::vector<double>& default_viscosities() {
  static const std::vector<double> v{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  return v;
}

inline ViscosityReport sweep_viscosity(const ScenarioSpec& spec, std::vector<double> eps_list = {},
                                       unsigned jobs = default_jobs()) {
  if (eps_list.empty()) eps_list = default_viscosities();
  ViscosityReport rep;
  rep.runs.resize(eps_list.size());
  parallel_for(eps_list.size(), jobs, [&](std::size_t i) {
    auto s = spec;
    s.params.epsilon = eps_list[i];
    rep.runs[i] = sweep_run(s, eps_list[i]);
  });
  for (std::size_t i = 0; i + 1 < rep.runs.size(); ++i) {
    rep.differences.push_back(l2_distance(rep.runs[i].final_u, rep.runs[i + 1].final_u));
  }
  // Differences at roundoff level count as converged.
  for (std::size_t i = 0; i + 1 < rep.differences.size(); ++i) {
    if (rep.differences[i + 1] > rep.differences[i] && rep.differences[i + 1] > 1e-12) rep.cauchy = false;
  }
  for (const auto& r : rep.runs) rep.cauchy = rep.cauchy && r.classification == Classification::ok;
  return rep;
}

struct ResolutionReport {
  std::vector<SweepRun> runs;
  std::vector<double> differences;  // max-norm difference on the coarser grid's nodes
  std::vector<std::optional<double>> orders;
  bool converged = true;

  json to_json() const {
    json rows = json::array();
    for (const auto& r : runs) {
      rows.push_back({{"n", static_cast<int>(r.parameter)},
                      {"classification", std::string(to_string(r.classification))},
                      {"final_t", r.final_t}, {"steps", r.steps}});
    }
    json ord = json::array();
    for (const auto& o : orders) ord.push_back(o ? json(*o) : json(nullptr));
    return {{"kind", "resolution"}, {"runs", rows}, {"differences", differences}, {"observed_orders", ord},
            {"converged", converged}, {"classifier", classifier_label}};
  }
};

/// Differences below this level are roundoff and carry no order information.
inline constexpr double resolution_noise_floor = 1e-12;

inline ResolutionReport sweep_resolution(const ScenarioSpec& spec, std::vector<int> n_list = {},
                                         unsigned jobs = default_jobs()) {
  if (n_list.empty()) n_list = {64, 128, 256, 512};
  std::sort(n_list.begin(), n_list.end());
  ResolutionReport rep;
  rep.runs.resize(n_list.size());
  parallel_for(n_list.size(), jobs, [&](std::size_t i) {
    auto s = spec;
    s.n = n_list[i];
    rep.runs[i] = sweep_run(s, n_list[i]);
  });
  for (std::size_t i = 0; i + 1 < rep.runs.size(); ++i) {
    const auto& coarse = rep.runs[i].final_u;
    const auto& fine = rep.runs[i + 1].final_u;
    const int stride = fine.grid.n() / coarse.grid.n();
    double d = 0.0;
    for (int j = 0; j < coarse.grid.n(); ++j) {
      d = std::max(d, std::abs(coarse.values[static_cast<std::size_t>(j)] -
                               fine.values[static_cast<std::size_t>(j * stride)]));
    }
    rep.differences.push_back(d);
  }
  for (std::size_t i = 0; i + 1 < rep.differences.size(); ++i) {
    const double a = rep.differences[i];
    const double b = rep.differences[i + 1];
    const double ratio = static_cast<double>(n_list[i + 1]) / n_list[i];
    if (a > resolution_noise_floor && b > resolution_noise_floor) {
      rep.orders.push_back(std::log(a / b) / std::log(ratio));
    } else {
      rep.orders.push_back(std::nullopt);
    }
  }
  for (const auto& r : rep.runs) rep.converged = rep.converged && r.classification == Classification::ok;
  if (!rep.differences.empty() && rep.differences.back() > resolution_noise_floor) {
    for (const auto& o : rep.orders) rep.converged = rep.converged && (!o || *o >= 2.0);
  }
  return rep;
}

struct SubcriticalCell {
  double alpha = 1.0;
  double r = 0.0;
  std::string label_coarse;
  std::string label_fine;
  bool stable = true;  // same label after one resolution doubling
};

/// bounded, decaying (flattening toward its mean) or blowup-flag.
inline std::string classify_run(const SweepRun& run) {
  if (run.classification == Classification::blowup) return "blowup-flag";
  if (run.classification == Classification::stalled) return "stalled";
  const auto [lo, hi] = std::minmax_element(run.final_u.values.begin(), run.final_u.values.end());
  const double m = spectral::mean(run.final_u);
  return (*hi - *lo) <= 1e-3 * std::max(std::abs(m), 1e-300) ? "decaying" : "bounded";
}

struct SubcriticalTable {
  std::vector<SubcriticalCell> cells;

  json to_json() const {
    json rows = json::array();
    for (const auto& c : cells) {
      rows.push_back({{"alpha", c.alpha}, {"r", c.r}, {"label_n", c.label_coarse}, {"label_2n", c.label_fine},
                      {"stable_under_refinement", c.stable}});
    }
    return {{"kind", "subcritical"}, {"cells", rows}, {"classifier", classifier_label}};
  }
  std::string to_csv() const {
    std::string out = "alpha,r,label_n,label_2n,stable\n";
    for (const auto& c : cells) {
      out += format_double(c.alpha) + "," + format_double(c.r) + "," + c.label_coarse + "," + c.label_fine + "," +
             (c.stable ? "true" : "false") + "\n";
    }
    return out;
  }
};

/// Exploratory (alpha, r) grid, each cell run at n and 2n.
inline SubcriticalTable explore_subcritical(const ScenarioSpec& spec, std::vector<double> alphas,
                                            std::vector<double> rates, unsigned jobs = default_jobs()) {
  if (alphas.empty()) alphas = {0.8, 0.9};
  if (rates.empty()) rates = {0.0, 1.5};
  SubcriticalTable table;
  const std::size_t cells = alphas.size() * rates.size();
  std::vector<SweepRun> runs(2 * cells);
  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    const std::size_t cell = i / 2;
    auto s = spec;
    s.params.alpha = alphas[cell / rates.size()];
    s.params.r = rates[cell % rates.size()];
    s.n = (i % 2 == 0) ? spec.n : 2 * spec.n;
    runs[i] = sweep_run(s, s.n);
  });
  for (std::size_t cell = 0; cell < cells; ++cell) {
    SubcriticalCell c;
    c.alpha = alphas[cell / rates.size()];
    c.r = rates[cell % rates.size()];
    c.label_coarse = classify_run(runs[2 * cell]);
    c.label_fine = classify_run(runs[2 * cell + 1]);
    c.stable = c.label_coarse == c.label_fine;
    table.cells.push_back(c);
  }
  return table;
}

}  // namespace experiments
}  // namespace fks
