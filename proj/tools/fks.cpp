// fks: run, verify, sweep and resume scenarios of the fractional
// Keller-Segel solver, or run the built-in oracle battery.
//
// Exit codes: 0 ok, 1 usage or schema error, 2 a check failed, 3 blowup flagged.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fks/fks.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fks;

enum Exit : int { ok = 0, usage = 1, check_failed = 2, blowup = 3 };

struct Common {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  unsigned jobs = experiments::default_jobs();
};

std::string default_out() {
  const char* env = std::getenv("FKS_OUT");
  return env && *env ? env : "out";
}

void add_common(CLI::App* cmd, Common& c, bool with_config = true) {
  if (with_config) cmd->add_option("-c,--config", c.config, "scenario JSON file");
  cmd->add_option("-o,--out", c.out, "output root (default $FKS_OUT or ./out)");
  cmd->add_option("--set", c.overrides, "override a field, e.g. --set params.r=1.5 (repeatable)");
  cmd->add_option("--jobs", c.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "seed of a random initial condition");
}

std::vector<std::string> effective_overrides(const Common& c) {
  auto o = c.overrides;
  if (c.seed) o.push_back("initial_condition.seed=" + std::to_string(*c.seed));
  return o;
}

ScenarioSpec load(const Common& c) {
  if (c.config.empty()) {
    throw SchemaError("--config is required. Scenario fields:\n" + schema_listing());
  }
  auto doc = read_json_file(c.config);
  const auto errs = apply_overrides(doc, effective_overrides(c));
  if (!errs.empty()) {
    std::string msg = "invalid overrides:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw SchemaError(msg);
  }
  return scenario_from_json(doc);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int report(const CampaignResult& res, const fs::path& dir) {
  std::cout << "scenario " << res.scenario << "  campaign " << res.campaign << '\n';
  if (res.ran) {
    std::cout << "  classification " << to_string(res.classification) << " (" << experiments::classifier_label
              << ")\n"
              << "  steps " << res.trajectory.steps << "  final t " << fmt(res.trajectory.final_state.t) << '\n';
  }
  for (const auto& v : res.verdicts) {
    std::cout << "  [" << to_string(v.status) << "] " << v.check;
    if (std::isfinite(v.measured)) std::cout << "  measured " << fmt(v.measured);
    if (std::isfinite(v.margin)) std::cout << "  margin " << fmt(v.margin);
    if (!v.detail.empty()) std::cout << "  (" << v.detail << ')';
    std::cout << '\n';
  }
  std::cout << "  outputs in " << dir.string() << '\n';
  if (res.ran && res.classification == Classification::blowup) return blowup;
  return res.any_failed() ? check_failed : ok;
}

std::optional<experiments::Campaign> parse_campaign(const std::string& s) {
  using experiments::Campaign;
  if (s == "1" || s == "theorem1") return Campaign::theorem1;
  if (s == "rlarge") return Campaign::rlarge;
  if (s == "corollary") return Campaign::corollary;
  if (s == "3" || s == "theorem3") return Campaign::theorem3;
  return std::nullopt;
}

int run_sweep(const ScenarioSpec& spec, const Common& c) {
  if (!spec.sweep) throw SchemaError("config has no sweep block; set sweep.kind");
  const auto& sw = *spec.sweep;
  const fs::path dir = fs::path(c.out) / spec.name;
  fs::create_directories(dir);
  json result;
  int code = ok;
  if (sw.kind == "viscosity") {
    const auto rep = experiments::sweep_viscosity(spec, sw.epsilon, c.jobs);
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
      std::cout << "  epsilon " << fmt(rep.runs[i].parameter) << "  " << to_string(rep.runs[i].classification);
      if (i > 0) std::cout << "  ||u - u_prev||_L2 " << fmt(rep.differences[i - 1]);
      std::cout << '\n';
    }
    std::cout << "  cauchy trend " << (rep.cauchy ? "yes" : "no") << '\n';
    result = rep.to_json();
    if (!rep.cauchy) code = check_failed;
  } else if (sw.kind == "resolution") {
    const auto rep = experiments::sweep_resolution(spec, sw.n, c.jobs);
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
      std::cout << "  n " << static_cast<int>(rep.runs[i].parameter) << "  " << to_string(rep.runs[i].classification);
      if (i > 0) std::cout << "  max diff vs coarser " << fmt(rep.differences[i - 1]);
      if (i > 1 && rep.orders[i - 2]) std::cout << "  order " << fmt(*rep.orders[i - 2]);
      std::cout << '\n';
    }
    std::cout << "  converged " << (rep.converged ? "yes" : "no") << '\n';
    result = rep.to_json();
    if (!rep.converged) code = check_failed;
  } else {
    const auto table = experiments::explore_subcritical(spec, sw.alpha, sw.r, c.jobs);
    std::cout << "  exploratory; labels come from a numerical surrogate\n";
    for (const auto& cell : table.cells) {
      std::cout << "  alpha " << fmt(cell.alpha) << "  r " << fmt(cell.r) << "  n: " << cell.label_coarse
                << "  2n: " << cell.label_fine << (cell.stable ? "" : "  (unstable under refinement)") << '\n';
    }
    result = table.to_json();
    std::ofstream(dir / "subcritical.csv") << table.to_csv();
  }
  result["scenario"] = spec.name;
  result["effective_spec"] = to_json(spec);
  result["overrides"] = effective_overrides(c);
  experiments::write_json(dir / "sweep.json", result);
  std::cout << "  outputs in " << dir.string() << '\n';
  return code;
}

int run_oracle() {
  bool all = true;
  for (const auto& r : selftest::run_all()) {
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << "  error " << fmt(r.error) << "  tolerance "
              << fmt(r.tolerance) << '\n';
    all = all && r.passed();
  }
  return all ? ok : check_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Keller-Segel solver and verification harness"};
  app.require_subcommand(1);
  Common common;
  common.out = default_out();

  auto* run = app.add_subcommand("run", "integrate a scenario and evaluate its checks");
  add_common(run, common);

  std::string theorem;
  auto* ver = app.add_subcommand("verify", "run a theorem campaign on a scenario");
  add_common(ver, common);
  ver->add_option("--theorem", theorem, "1 | rlarge | corollary | 3")
      ->required()
      ->check(CLI::IsMember({"1", "theorem1", "rlarge", "corollary", "3", "theorem3"}));

  auto* sweep = app.add_subcommand("sweep", "viscosity, resolution or subcritical sweep (kind from the config)");
  add_common(sweep, common);

  app.add_subcommand("oracle", "compare spectral operators against slow independent routes");

  std::string from;
  auto* resume = app.add_subcommand("resume", "continue a finished or interrupted run from its latest snapshot");
  resume->add_option("--from", from, "scenario output directory holding meta.json")->required();
  resume->add_option("--set", common.overrides, "override a field, e.g. --set horizon=40 (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (app.got_subcommand("oracle")) return run_oracle();
    if (app.got_subcommand("resume")) {
      const auto res = experiments::resume_scenario(from, common.overrides);
      return report(res, fs::path(from) / "resume");
    }
    const auto spec = load(common);
    if (app.got_subcommand("sweep")) return run_sweep(spec, common);

    RunOptions opt;
    opt.out_dir = fs::path(common.out);
    opt.overrides = effective_overrides(common);
    const fs::path dir = fs::path(common.out) / spec.name;
    if (app.got_subcommand("verify")) {
      return report(experiments::verify(*parse_campaign(theorem), spec, opt), dir);
    }
    return report(experiments::run_scenario(spec, opt), dir);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  }
}
