#pragma once

// Declarative scenario description: JSON schema (version 1), validation with
// a full list of offending fields, dotted-path overrides, and construction of
// the initial density.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fks/error.hpp"
#include "fks/model.hpp"
#include "fks/spectral.hpp"
#include "fks/stepper.hpp"

namespace fks {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

enum class FieldType { string, integer, number, boolean, number_array, integer_array, object_array };

struct SchemaField {
  std::string path;
  FieldType type;
  std::string description;
};

/// Every dotted path a scenario document may contain.
inline const std::vector<SchemaField>& schema_fields() {
  static const std::vector<SchemaField> fields{
      {"schema_version", FieldType::integer, "must be 1"},
      {"name", FieldType::string, "scenario name, also the output subdirectory"},
      {"grid.n", FieldType::integer, "grid size, power of two >= 8"},
      {"initial_condition.kind", FieldType::string, "constant | cosine | bump | random"},
      {"initial_condition.a", FieldType::number, "constant value / cosine offset"},
      {"initial_condition.b", FieldType::number, "cosine amplitude"},
      {"initial_condition.k", FieldType::integer, "cosine wavenumber (default 1)"},
      {"initial_condition.height", FieldType::number, "bump height"},
      {"initial_condition.width", FieldType::number, "bump half-width"},
      {"initial_condition.base", FieldType::number, "bump background level (default 0)"},
      {"initial_condition.seed", FieldType::integer, "random field seed (default 0)"},
      {"initial_condition.band", FieldType::integer, "random field highest mode"},
      {"initial_condition.amplitude", FieldType::number, "random field amplitude"},
      {"initial_condition.mean", FieldType::number, "random field mean"},
      {"initial_condition.min_clamp", FieldType::number, "random field lower clamp (default 0)"},
      {"initial_condition.mollify", FieldType::number, "heat-kernel mollification width (default 0)"},
      {"params.semilinearity.kind", FieldType::string, "constant | linear | affine | power | ramped_gamma"},
      {"params.semilinearity.c", FieldType::number, "constant mu value"},
      {"params.semilinearity.nu", FieldType::number, "affine offset"},
      {"params.semilinearity.p", FieldType::number, "power exponent > 1"},
      {"params.semilinearity.delta", FieldType::number, "ramped gamma floor"},
      {"params.semilinearity.y0", FieldType::number, "ramped gamma ramp start"},
      {"params.semilinearity.width", FieldType::number, "ramped gamma ramp width"},
      {"params.r", FieldType::number, "logistic rate >= 0 (default 0)"},
      {"params.epsilon", FieldType::number, "viscosity >= 0 (default 0)"},
      {"params.alpha", FieldType::number, "diffusion order in (0, 1] (default 1)"},
      {"params.coupling", FieldType::boolean, "chemical coupling on/off (default true)"},
      {"control.c_cfl", FieldType::number, "CFL number in (0, 1] (default 0.4)"},
      {"control.dt_max", FieldType::number, "largest time step (default 1e-2)"},
      {"control.dt_min", FieldType::number, "smallest time step before stalling (default 1e-12)"},
      {"control.blowup_threshold", FieldType::number, "amplitude flag (default 1e6)"},
      {"control.tail_fraction_threshold", FieldType::number, "spectral tail flag (default 0.1)"},
      {"control.tail_persistence", FieldType::integer, "consecutive tail strikes (default 5)"},
      {"control.dt_fixed", FieldType::number, "fixed step, 0 = adaptive (default 0)"},
      {"horizon", FieldType::number, "final time T > 0"},
      {"record_every", FieldType::integer, "diagnostics cadence in steps (default 10)"},
      {"snapshot_every", FieldType::integer, "snapshot cadence in steps, 0 = final only (default 0)"},
      {"checks", FieldType::object_array, "list of {name, tolerance?, t_max?}"},
      {"sweep.kind", FieldType::string, "viscosity | resolution | subcritical"},
      {"sweep.epsilon", FieldType::number_array, "viscosities for a viscosity sweep"},
      {"sweep.n", FieldType::integer_array, "grid sizes for a resolution sweep"},
      {"sweep.alpha", FieldType::number_array, "orders for a subcritical sweep"},
      {"sweep.r", FieldType::number_array, "logistic rates for a subcritical sweep"},
  };
  return fields;
}

inline const SchemaField* find_field(std::string_view path) {
  for (const auto& f : schema_fields()) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

inline std::string schema_listing() {
  std::string out;
  for (const auto& f : schema_fields()) out += "  " + f.path + "  " + f.description + "\n";
  return out;
}

/// Named checks a scenario may activate, with their default tolerances.
inline const std::vector<std::pair<std::string, double>>& known_checks() {
  static const std::vector<std::pair<std::string, double>> checks{
      {"positivity_floor", 1e-6},   {"ceiling", 0.05},     {"mass_conservation", 1e-12},
      {"mean_law", 1e-3},           {"hhalf_linear_growth", 0.1}, {"entropy_balance", 0.01},
      {"l2_balance", 0.01},         {"weak_residual", 1e-3}, {"lubo", 1e-6},
      {"maxpoint", 1e-6},           {"entropy_decay", 0.05}, {"fisher_decay", 0.05},
      {"tricomi", 1e-10},           {"convergence", 1e-6},  {"bounded", 0.0},
  };
  return checks;
}

inline std::optional<double> default_tolerance(std::string_view check) {
  for (const auto& [name, tol] : known_checks()) {
    if (name == check) return tol;
  }
  return std::nullopt;
}

enum class InitialKind { constant, cosine, bump, random };

struct InitialCondition {
  InitialKind kind = InitialKind::constant;
  double a = 1.0;
  double b = 0.0;
  int k = 1;
  double height = 0.0;
  double width = 1.0;
  double base = 0.0;
  std::uint64_t seed = 0;
  int band = 1;
  double amplitude = 0.0;
  double mean = 1.0;
  double min_clamp = 0.0;
  double mollify = 0.0;

  /// Sampled, clamped where requested, then mollified.
  RealField build(Grid g) const {
    RealField u(g);
    switch (kind) {
      case InitialKind::constant:
        u = sample(g, [&](double) { return a; });
        break;
      case InitialKind::cosine:
        u = sample(g, [&](double x) { return a + b * std::cos(k * x); });
        break;
      case InitialKind::bump:
        u = sample(g, [&](double x) { return base + height * std::max(0.0, 1.0 - std::abs(x) / width); });
        break;
      case InitialKind::random: {
        std::mt19937_64 rng(seed);
        auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        std::vector<double> ca;
        std::vector<double> cb;
        for (int m = 1; m <= band; ++m) {
          ca.push_back((2.0 * unit() - 1.0) / m);
          cb.push_back((2.0 * unit() - 1.0) / m);
        }
        u = sample(g, [&](double x) {
          double v = 0.0;
          for (int m = 1; m <= band; ++m) {
            const auto i = static_cast<std::size_t>(m - 1);
            v += ca[i] * std::cos(m * x) + cb[i] * std::sin(m * x);
          }
          return std::max(mean + amplitude * v, min_clamp);
        });
        break;
      }
    }
    return mollify > 0.0 ? spectral::mollify(u, mollify) : u;
  }
};

struct CheckRequest {
  std::string name;
  std::optional<double> tolerance;
  std::optional<double> t_max;
};

struct SweepSpec {
  std::string kind;
  std::vector<double> epsilon;
  std::vector<int> n;
  std::vector<double> alpha;
  std::vector<double> r;
};

struct ScenarioSpec {
  std::string name = "scenario";
  int n = 128;
  InitialCondition initial;
  ModelParams params;
  StepControl control;
  double horizon = 1.0;
  std::size_t record_every = 10;
  std::size_t snapshot_every = 0;
  std::vector<CheckRequest> checks;
  std::optional<SweepSpec> sweep;
};

inline std::string_view to_string(InitialKind k) {
  switch (k) {
    case InitialKind::constant: return "constant";
    case InitialKind::cosine: return "cosine";
    case InitialKind::bump: return "bump";
    case InitialKind::random: return "random";
  }
  return "?";
}

inline json to_json(const Semilinearity& s) {
  json j{{"kind", std::string(s.name())}};
  switch (s.kind()) {
    case Semilinearity::Kind::constant: j["c"] = s.c(); break;
    case Semilinearity::Kind::linear: break;
    case Semilinearity::Kind::affine: j["nu"] = s.nu(); break;
    case Semilinearity::Kind::power: j["p"] = s.p(); break;
    case Semilinearity::Kind::ramped_gamma:
      j["delta"] = s.ramp_delta();
      j["y0"] = s.ramp_y0();
      j["width"] = s.ramp_width();
      break;
  }
  return j;
}

inline json to_json(const ScenarioSpec& s) {
  json ic{{"kind", std::string(to_string(s.initial.kind))}, {"mollify", s.initial.mollify}};
  switch (s.initial.kind) {
    case InitialKind::constant: ic["a"] = s.initial.a; break;
    case InitialKind::cosine:
      ic["a"] = s.initial.a;
      ic["b"] = s.initial.b;
      ic["k"] = s.initial.k;
      break;
    case InitialKind::bump:
      ic["height"] = s.initial.height;
      ic["width"] = s.initial.width;
      ic["base"] = s.initial.base;
      break;
    case InitialKind::random:
      ic["seed"] = s.initial.seed;
      ic["band"] = s.initial.band;
      ic["amplitude"] = s.initial.amplitude;
      ic["mean"] = s.initial.mean;
      ic["min_clamp"] = s.initial.min_clamp;
      break;
  }
  json checks = json::array();
  for (const auto& c : s.checks) {
    json e{{"name", c.name}};
    if (c.tolerance) e["tolerance"] = *c.tolerance;
    if (c.t_max) e["t_max"] = *c.t_max;
    checks.push_back(e);
  }
  json j{{"schema_version", schema_version},
         {"name", s.name},
         {"grid", {{"n", s.n}}},
         {"initial_condition", ic},
         {"params",
          {{"semilinearity", to_json(s.params.semilinearity)},
           {"r", s.params.r},
           {"epsilon", s.params.epsilon},
           {"alpha", s.params.alpha},
           {"coupling", s.params.coupling}}},
         {"control",
          {{"c_cfl", s.control.c_cfl},
           {"dt_max", s.control.dt_max},
           {"dt_min", s.control.dt_min},
           {"blowup_threshold", s.control.blowup_threshold},
           {"tail_fraction_threshold", s.control.tail_fraction_threshold},
           {"tail_persistence", s.control.tail_persistence},
           {"dt_fixed", s.control.dt_fixed}}},
         {"horizon", s.horizon},
         {"record_every", s.record_every},
         {"snapshot_every", s.snapshot_every},
         {"checks", checks}};
  if (s.sweep) {
    json sw{{"kind", s.sweep->kind}};
    if (!s.sweep->epsilon.empty()) sw["epsilon"] = s.sweep->epsilon;
    if (!s.sweep->n.empty()) sw["n"] = s.sweep->n;
    if (!s.sweep->alpha.empty()) sw["alpha"] = s.sweep->alpha;
    if (!s.sweep->r.empty()) sw["r"] = s.sweep->r;
    j["sweep"] = sw;
  }
  return j;
}

namespace detail {

inline bool type_matches(const json& v, FieldType t) {
  auto all = [&](auto pred) { return v.is_array() && std::all_of(v.begin(), v.end(), pred); };
  switch (t) {
    case FieldType::string: return v.is_string();
    case FieldType::integer: return v.is_number_integer();
    case FieldType::number: return v.is_number();
    case FieldType::boolean: return v.is_boolean();
    case FieldType::number_array: return all([](const json& e) { return e.is_number(); });
    case FieldType::integer_array: return all([](const json& e) { return e.is_number_integer(); });
    case FieldType::object_array: return all([](const json& e) { return e.is_object(); });
  }
  return false;
}

inline void walk(const json& node, const std::string& prefix, std::vector<std::string>& errors,
                 std::set<std::string>& present) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (const auto* f = find_field(path)) {
      present.insert(path);
      if (!type_matches(it.value(), f->type)) errors.push_back(path + ": wrong type (" + f->description + ")");
    } else if (it.value().is_object()) {
      // Only known section prefixes may hold objects.
      bool known_prefix = false;
      for (const auto& fld : schema_fields()) known_prefix = known_prefix || fld.path.rfind(path + ".", 0) == 0;
      if (known_prefix) {
        walk(it.value(), path, errors, present);
      } else {
        errors.push_back(path + ": unknown field");
      }
    } else {
      errors.push_back(path + ": unknown field");
    }
  }
}

inline const json* at_path(const json& doc, std::string_view path) {
  const json* node = &doc;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto dot = path.find('.', start);
    const auto key = std::string(path.substr(start, dot == std::string_view::npos ? path.npos : dot - start));
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return node;
}

}  // namespace detail

/// Apply "a.b.c=value" overrides. Values parse as JSON, falling back to a plain string.
inline std::vector<std::string> apply_overrides(json& doc, const std::vector<std::string>& overrides) {
  std::vector<std::string> errors;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      errors.push_back(o + ": expected key=value");
      continue;
    }
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    const auto* f = find_field(key);
    if (!f || f->type == FieldType::object_array) {
      errors.push_back(key + ": not an overridable schema path");
      continue;
    }
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return errors;
}

/// Parse and validate; throws SchemaError listing every offending field.
inline ScenarioSpec scenario_from_json(const json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) throw SchemaError("scenario document must be a JSON object");
  std::set<std::string> present;
  detail::walk(doc, "", errors, present);

  auto get = [&](std::string_view path) -> const json* { return detail::at_path(doc, path); };
  auto require = [&](std::string_view path) -> const json* {
    const auto* v = get(path);
    if (!v) errors.push_back(std::string(path) + ": required");
    return v;
  };
  auto num = [&](std::string_view path, double fallback) {
    const auto* v = get(path);
    return v && v->is_number() ? v->get<double>() : fallback;
  };
  auto integer = [&](std::string_view path, long long fallback) {
    const auto* v = get(path);
    return v && v->is_number_integer() ? v->get<long long>() : fallback;
  };
  auto num_req = [&](std::string_view path) {
    const auto* v = require(path);
    return v && v->is_number() ? v->get<double>() : 0.0;
  };
  auto forbid_others = [&](std::string_view prefix, const std::set<std::string>& allowed) {
    for (const auto& p : present) {
      if (p.rfind(std::string(prefix) + ".", 0) != 0) continue;
      const auto leaf = p.substr(prefix.size() + 1);
      if (leaf != "kind" && !allowed.contains(leaf)) errors.push_back(p + ": not used by this kind");
    }
  };

  ScenarioSpec s;
  if (const auto* v = require("schema_version"); v && (!v->is_number_integer() || v->get<int>() != schema_version)) {
    errors.push_back("schema_version: must be " + std::to_string(schema_version));
  }
  if (const auto* v = require("name"); v && v->is_string()) {
    s.name = v->get<std::string>();
    const bool safe = !s.name.empty() && std::all_of(s.name.begin(), s.name.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
    if (!safe || s.name == "." || s.name == "..") errors.push_back("name: use letters, digits, '_', '-', '.'");
  }
  if (const auto* v = require("grid.n"); v && v->is_number_integer()) {
    s.n = v->get<int>();
    const bool pow2 = s.n >= 8 && (s.n & (s.n - 1)) == 0;
    if (!pow2) errors.push_back("grid.n: must be a power of two >= 8");
  }

  // Initial condition.
  auto& ic = s.initial;
  if (const auto* v = require("initial_condition.kind"); v && v->is_string()) {
    const auto kind = v->get<std::string>();
    ic.mollify = num("initial_condition.mollify", 0.0);
    if (ic.mollify < 0.0) errors.push_back("initial_condition.mollify: must be >= 0");
    if (kind == "constant") {
      ic.kind = InitialKind::constant;
      ic.a = num_req("initial_condition.a");
      forbid_others("initial_condition", {"a", "mollify"});
    } else if (kind == "cosine") {
      ic.kind = InitialKind::cosine;
      ic.a = num_req("initial_condition.a");
      ic.b = num_req("initial_condition.b");
      ic.k = static_cast<int>(integer("initial_condition.k", 1));
      if (ic.k < 1) errors.push_back("initial_condition.k: must be >= 1");
      forbid_others("initial_condition", {"a", "b", "k", "mollify"});
    } else if (kind == "bump") {
      ic.kind = InitialKind::bump;
      ic.height = num_req("initial_condition.height");
      ic.width = num_req("initial_condition.width");
      ic.base = num("initial_condition.base", 0.0);
      if (!(ic.width > 0.0)) errors.push_back("initial_condition.width: must be > 0");
      forbid_others("initial_condition", {"height", "width", "base", "mollify"});
    } else if (kind == "random") {
      ic.kind = InitialKind::random;
      const auto seed = integer("initial_condition.seed", 0);
      if (seed < 0) errors.push_back("initial_condition.seed: must be >= 0");
      ic.seed = static_cast<std::uint64_t>(std::max<long long>(seed, 0));
      ic.band = static_cast<int>(integer("initial_condition.band", 0));
      if (!get("initial_condition.band")) errors.push_back("initial_condition.band: required");
      else if (ic.band < 1) errors.push_back("initial_condition.band: must be >= 1");
      ic.amplitude = num_req("initial_condition.amplitude");
      ic.mean = num_req("initial_condition.mean");
      ic.min_clamp = num("initial_condition.min_clamp", 0.0);
      forbid_others("initial_condition", {"seed", "band", "amplitude", "mean", "min_clamp", "mollify"});
    } else {
      errors.push_back("initial_condition.kind: unknown kind '" + kind + "'");
    }
  }

  // Parameters.
  try {
    if (const auto* v = require("params.semilinearity.kind"); v && v->is_string()) {
      const auto kind = v->get<std::string>();
      const std::string pre = "params.semilinearity";
      if (kind == "constant") {
        s.params.semilinearity = Semilinearity::constant(num_req(pre + ".c"));
        forbid_others(pre, {"c"});
      } else if (kind == "linear") {
        s.params.semilinearity = Semilinearity::linear();
        forbid_others(pre, {});
      } else if (kind == "affine") {
        s.params.semilinearity = Semilinearity::affine(num_req(pre + ".nu"));
        forbid_others(pre, {"nu"});
      } else if (kind == "power") {
        s.params.semilinearity = Semilinearity::power(num_req(pre + ".p"));
        forbid_others(pre, {"p"});
      } else if (kind == "ramped_gamma") {
        s.params.semilinearity =
            Semilinearity::ramped_gamma(num_req(pre + ".delta"), num_req(pre + ".y0"), num_req(pre + ".width"));
        forbid_others(pre, {"delta", "y0", "width"});
      } else {
        errors.push_back("params.semilinearity.kind: unknown kind '" + kind + "'");
      }
    }
  } catch (const DomainError& e) {
    errors.push_back(std::string("params.semilinearity: ") + e.what());
  }
  s.params.r = num("params.r", 0.0);
  s.params.epsilon = num("params.epsilon", 0.0);
  s.params.alpha = num("params.alpha", 1.0);
  if (const auto* v = get("params.coupling"); v && v->is_boolean()) s.params.coupling = v->get<bool>();
  if (!(s.params.r >= 0.0)) errors.push_back("params.r: must be >= 0");
  if (!(s.params.epsilon >= 0.0)) errors.push_back("params.epsilon: must be >= 0");
  if (!(s.params.alpha > 0.0 && s.params.alpha <= 1.0)) errors.push_back("params.alpha: must lie in (0, 1]");

  // Control.
  auto& c = s.control;
  c.c_cfl = num("control.c_cfl", c.c_cfl);
  c.dt_max = num("control.dt_max", c.dt_max);
  c.dt_min = num("control.dt_min", c.dt_min);
  c.blowup_threshold = num("control.blowup_threshold", c.blowup_threshold);
  c.tail_fraction_threshold = num("control.tail_fraction_threshold", c.tail_fraction_threshold);
  c.tail_persistence = static_cast<int>(integer("control.tail_persistence", c.tail_persistence));
  c.dt_fixed = num("control.dt_fixed", c.dt_fixed);
  try {
    c.validate();
  } catch (const DomainError& e) {
    errors.push_back(std::string("control: ") + e.what());
  }

  s.horizon = num_req("horizon");
  if (get("horizon") && !(s.horizon > 0.0)) errors.push_back("horizon: must be > 0");
  const auto rec = integer("record_every", 10);
  const auto snap = integer("snapshot_every", 0);
  if (rec < 1) errors.push_back("record_every: must be >= 1");
  if (snap < 0) errors.push_back("snapshot_every: must be >= 0");
  s.record_every = static_cast<std::size_t>(std::max<long long>(rec, 1));
  s.snapshot_every = static_cast<std::size_t>(std::max<long long>(snap, 0));

  if (const auto* v = get("checks"); v && v->is_array()) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& e = (*v)[i];
      const std::string at = "checks[" + std::to_string(i) + "]";
      if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) {
        errors.push_back(at + ".name: required string");
        continue;
      }
      CheckRequest req{e["name"].get<std::string>(), std::nullopt, std::nullopt};
      if (!default_tolerance(req.name)) errors.push_back(at + ".name: unknown check '" + req.name + "'");
      for (auto it = e.begin(); it != e.end(); ++it) {
        if (it.key() == "name") continue;
        if (it.key() != "tolerance" && it.key() != "t_max") {
          errors.push_back(at + "." + it.key() + ": unknown field");
        } else if (!it.value().is_number()) {
          errors.push_back(at + "." + it.key() + ": must be a number");
        } else if (it.key() == "tolerance") {
          req.tolerance = it.value().get<double>();
        } else {
          req.t_max = it.value().get<double>();
        }
      }
      s.checks.push_back(req);
    }
  }

  if (get("sweep")) {
    SweepSpec sw;
    if (const auto* v = require("sweep.kind"); v && v->is_string()) sw.kind = v->get<std::string>();
    if (sw.kind != "viscosity" && sw.kind != "resolution" && sw.kind != "subcritical") {
      errors.push_back("sweep.kind: must be viscosity, resolution or subcritical");
    }
    if (const auto* v = get("sweep.epsilon"); v && detail::type_matches(*v, FieldType::number_array)) {
      sw.epsilon = v->get<std::vector<double>>();
    }
    if (const auto* v = get("sweep.n"); v && detail::type_matches(*v, FieldType::integer_array)) {
      sw.n = v->get<std::vector<int>>();
      for (int n : sw.n) {
        if (n < 8 || (n & (n - 1)) != 0) errors.push_back("sweep.n: entries must be powers of two >= 8");
      }
    }
    if (const auto* v = get("sweep.alpha"); v && detail::type_matches(*v, FieldType::number_array)) {
      sw.alpha = v->get<std::vector<double>>();
    }
    if (const auto* v = get("sweep.r"); v && detail::type_matches(*v, FieldType::number_array)) {
      sw.r = v->get<std::vector<double>>();
    }
    s.sweep = sw;
  }

  if (errors.empty()) {
    const auto u0 = s.initial.build(Grid(s.n));
    const double lo = *std::min_element(u0.values.begin(), u0.values.end());
    if (!(lo >= 0.0)) errors.push_back("initial_condition: density must be nonnegative (min " + std::to_string(lo) + ")");
  }
  if (!errors.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw SchemaError(msg);
  }
  return s;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw SchemaError("config '" + path + "' is not valid JSON");
  return doc;
}

}  // namespace fks
