#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "chlab/ch_dynamics.hpp"
#include "chlab/grid.hpp"
#include "chlab/initial_conditions.hpp"
#include "chlab/scaling.hpp"

namespace chlab {

enum class Command { simulate, peakon, scale, verify_variational, verify_linear, sweep };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::peakon: return "peakon";
    case Command::scale: return "scale";
    case Command::verify_variational: return "verify-variational";
    case Command::verify_linear: return "verify-linear";
    case Command::sweep: return "sweep";
  }
  return "?";
}

struct GridConfig {
  int n = 256;
  double length = 40.0;
};

/// Spatial coefficient F(x) = offset + amplitude * sin(mode * 2 pi x / L + phase).
struct FCoefficient {
  double offset = 0.0;
  double amplitude = 0.0;
  int mode = 1;
  double phase = 0.0;
};

struct EquationConfig {
  bool use_F = false;
  double kappa = 0.0;
  FCoefficient F;
};

struct InitialConfig {
  std::string name = "gaussian";
  double value = 0.0;                                   // constant
  double amplitude = 0.5, center = 20.0, width = 2.0;   // gaussian
  int mode = 1;                                         // sine
  double phase = 0.0;                                   // sine
  double p1 = 2.0, q1 = 10.0, p2 = 1.0, q2 = 20.0;      // peakon_pair
  double mollify_dx = 4.0;                              // peakon_pair
};

struct PeakonRunConfig {
  std::vector<double> q;
  std::vector<double> p;
  bool periodic = false;
  double length = 0.0;
};

struct PhysicalConfig {
  std::string regime = "irrotational";
  double g = 9.81, h0 = 1.0, a = 0.1, lambda = 10.0;
  double omega0 = 0.0, c0 = 0.0, rho = 1000.0, p0 = 101325.0;

  PhysicalParams params() const {
    PhysicalParams pp;
    pp.g = g;
    pp.h0 = h0;
    pp.a = a;
    pp.lambda = lambda;
    pp.omega0 = omega0;
    pp.c0 = c0;
    pp.rho = rho;
    pp.p0 = p0;
    return pp;
  }
};

struct VariationalConfig {
  int n = 128;
  std::vector<int> ms{16, 32, 64};
  double T = 1.0;
};

struct LinearConfig {
  double amplitude = 0.1;
  int nx = 128;
};

struct SweepConfig {
  std::string command;
  std::string parameter;  // dotted path, e.g. "equation.kappa" or "dt"
  std::vector<nlohmann::json> values;
};

struct RunConfig {
  Command command = Command::simulate;
  GridConfig grid;
  EquationConfig equation;
  InitialConfig initial;
  double dt = 1e-3;
  double T = 1.0;
  int record_every = 100;
  double breaking_threshold = -10.0;
  std::optional<PeakonRunConfig> peakon;
  PhysicalConfig physical;
  VariationalConfig variational;
  LinearConfig linear;
  std::optional<SweepConfig> sweep;
  nlohmann::ordered_json raw;  // parsed document, echoed to config.json
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty() && config.has_value(); }
};

namespace detail {

inline void check_keys(const nlohmann::ordered_json& obj, const std::string& where,
                       const std::set<std::string>& allowed, std::vector<std::string>& errors) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      errors.push_back(where + ": unknown key \"" + it.key() + "\"");
  }
}

template <class T>
bool read_field(const nlohmann::ordered_json& obj, const std::string& where, const char* key,
                T& out, std::vector<std::string>& errors) {
  auto it = obj.find(key);
  if (it == obj.end()) return false;
  try {
    out = it->get<T>();
    return true;
  } catch (const nlohmann::json::exception&) {
    errors.push_back(where + "." + key + ": wrong type");
    return false;
  }
}

}  // namespace detail

inline ParseResult parse_config(const std::string& text) {
  using nlohmann::ordered_json;
  ParseResult result;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    result.errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return result;
  }
  if (!doc.is_object()) {
    result.errors.push_back("config root must be a JSON object");
    return result;
  }
  auto& errors = result.errors;
  RunConfig cfg;
  cfg.raw = doc;

  detail::check_keys(doc, "config",
                     {"command", "grid", "equation", "initial", "dt", "T", "record_every",
                      "breaking_threshold", "peakon", "physical", "variational", "linear",
                      "sweep"},
                     errors);

  std::string cmd;
  if (!detail::read_field(doc, "config", "command", cmd, errors) && errors.empty())
    errors.push_back("config.command: required");
  if (cmd == "simulate")
    cfg.command = Command::simulate;
  else if (cmd == "peakon")
    cfg.command = Command::peakon;
  else if (cmd == "scale")
    cfg.command = Command::scale;
  else if (cmd == "verify-variational")
    cfg.command = Command::verify_variational;
  else if (cmd == "verify-linear")
    cfg.command = Command::verify_linear;
  else if (cmd == "sweep")
    cfg.command = Command::sweep;
  else if (!cmd.empty())
    errors.push_back("config.command: must be one of simulate, peakon, scale, "
                     "verify-variational, verify-linear, sweep");

  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    if (!g.is_object()) {
      errors.push_back("config.grid: must be an object");
    } else {
      detail::check_keys(g, "config.grid", {"n", "length"}, errors);
      detail::read_field(g, "config.grid", "n", cfg.grid.n, errors);
      detail::read_field(g, "config.grid", "length", cfg.grid.length, errors);
      if (cfg.grid.n < 8 || cfg.grid.n % 2 != 0)
        errors.push_back("config.grid.n: must be even and >= 8");
      if (!(cfg.grid.length > 0.0)) errors.push_back("config.grid.length: must be positive");
    }
  }

  if (doc.contains("equation")) {
    const auto& e = doc["equation"];
    if (!e.is_object()) {
      errors.push_back("config.equation: must be an object");
    } else {
      detail::check_keys(e, "config.equation", {"kappa", "F"}, errors);
      const bool has_kappa = e.contains("kappa");
      const bool has_F = e.contains("F");
      if (has_kappa && has_F)
        errors.push_back("config.equation: exclusive coefficient settings, "
                         "set either kappa or F but not both");
      if (has_kappa) detail::read_field(e, "config.equation", "kappa", cfg.equation.kappa, errors);
      if (has_F) {
        cfg.equation.use_F = true;
        const auto& F = e["F"];
        if (!F.is_object()) {
          errors.push_back("config.equation.F: must be an object");
        } else {
          detail::check_keys(F, "config.equation.F", {"offset", "amplitude", "mode", "phase"},
                             errors);
          detail::read_field(F, "config.equation.F", "offset", cfg.equation.F.offset, errors);
          detail::read_field(F, "config.equation.F", "amplitude", cfg.equation.F.amplitude,
                             errors);
          detail::read_field(F, "config.equation.F", "mode", cfg.equation.F.mode, errors);
          detail::read_field(F, "config.equation.F", "phase", cfg.equation.F.phase, errors);
          if (cfg.equation.F.mode < 1) errors.push_back("config.equation.F.mode: must be >= 1");
        }
      }
    }
  }

  if (doc.contains("initial")) {
    const auto& ic = doc["initial"];
    if (!ic.is_object()) {
      errors.push_back("config.initial: must be an object");
    } else {
      detail::check_keys(ic, "config.initial",
                         {"name", "value", "amplitude", "center", "width", "mode", "phase", "p1",
                          "q1", "p2", "q2", "mollify_dx"},
                         errors);
      detail::read_field(ic, "config.initial", "name", cfg.initial.name, errors);
      static const std::set<std::string> kNames{"constant", "gaussian", "sine", "peakon_pair"};
      if (!kNames.count(cfg.initial.name))
        errors.push_back("config.initial.name: must be one of constant, gaussian, sine, "
                         "peakon_pair");
      detail::read_field(ic, "config.initial", "value", cfg.initial.value, errors);
      detail::read_field(ic, "config.initial", "amplitude", cfg.initial.amplitude, errors);
      detail::read_field(ic, "config.initial", "center", cfg.initial.center, errors);
      detail::read_field(ic, "config.initial", "width", cfg.initial.width, errors);
      detail::read_field(ic, "config.initial", "mode", cfg.initial.mode, errors);
      detail::read_field(ic, "config.initial", "phase", cfg.initial.phase, errors);
      detail::read_field(ic, "config.initial", "p1", cfg.initial.p1, errors);
      detail::read_field(ic, "config.initial", "q1", cfg.initial.q1, errors);
      detail::read_field(ic, "config.initial", "p2", cfg.initial.p2, errors);
      detail::read_field(ic, "config.initial", "q2", cfg.initial.q2, errors);
      detail::read_field(ic, "config.initial", "mollify_dx", cfg.initial.mollify_dx, errors);
    }
  }

  detail::read_field(doc, "config", "dt", cfg.dt, errors);
  detail::read_field(doc, "config", "T", cfg.T, errors);
  detail::read_field(doc, "config", "record_every", cfg.record_every, errors);
  detail::read_field(doc, "config", "breaking_threshold", cfg.breaking_threshold, errors);
  if (!(cfg.dt > 0.0)) errors.push_back("config.dt: must be positive");
  if (!(cfg.T > 0.0)) errors.push_back("config.T: must be positive");
  if (cfg.record_every < 1) errors.push_back("config.record_every: must be >= 1");

  if (doc.contains("peakon")) {
    const auto& pk = doc["peakon"];
    if (!pk.is_object()) {
      errors.push_back("config.peakon: must be an object");
    } else {
      detail::check_keys(pk, "config.peakon", {"q", "p", "domain", "length"}, errors);
      PeakonRunConfig prc;
      detail::read_field(pk, "config.peakon", "q", prc.q, errors);
      detail::read_field(pk, "config.peakon", "p", prc.p, errors);
      std::string domain = "line";
      detail::read_field(pk, "config.peakon", "domain", domain, errors);
      if (domain == "box") {
        prc.periodic = true;
        prc.length = cfg.grid.length;
        detail::read_field(pk, "config.peakon", "length", prc.length, errors);
        if (!(prc.length > 0.0)) errors.push_back("config.peakon.length: must be positive");
      } else if (domain != "line") {
        errors.push_back("config.peakon.domain: must be line or box");
      }
      if (prc.q.size() != prc.p.size() || prc.q.empty())
        errors.push_back("config.peakon: q and p must be non-empty and equal-sized");
      cfg.peakon = std::move(prc);
    }
  } else if (cfg.command == Command::peakon) {
    errors.push_back("config.peakon: required for the peakon command");
  }

  if (doc.contains("physical")) {
    const auto& ph = doc["physical"];
    if (!ph.is_object()) {
      errors.push_back("config.physical: must be an object");
    } else {
      detail::check_keys(ph, "config.physical",
                         {"regime", "g", "h0", "a", "lambda", "omega0", "c0", "rho", "p0"},
                         errors);
      detail::read_field(ph, "config.physical", "regime", cfg.physical.regime, errors);
      if (cfg.physical.regime != "irrotational" && cfg.physical.regime != "shear" &&
          cfg.physical.regime != "arbitrary")
        errors.push_back("config.physical.regime: must be irrotational, shear, or arbitrary");
      detail::read_field(ph, "config.physical", "g", cfg.physical.g, errors);
      detail::read_field(ph, "config.physical", "h0", cfg.physical.h0, errors);
      detail::read_field(ph, "config.physical", "a", cfg.physical.a, errors);
      detail::read_field(ph, "config.physical", "lambda", cfg.physical.lambda, errors);
      detail::read_field(ph, "config.physical", "omega0", cfg.physical.omega0, errors);
      detail::read_field(ph, "config.physical", "c0", cfg.physical.c0, errors);
      detail::read_field(ph, "config.physical", "rho", cfg.physical.rho, errors);
      detail::read_field(ph, "config.physical", "p0", cfg.physical.p0, errors);
      if (!(cfg.physical.g > 0.0 && cfg.physical.h0 > 0.0 && cfg.physical.a > 0.0 &&
            cfg.physical.lambda > 0.0 && cfg.physical.rho > 0.0))
        errors.push_back("config.physical: g, h0, a, lambda, rho must be positive");
    }
  }

  if (doc.contains("variational")) {
    const auto& va = doc["variational"];
    if (!va.is_object()) {
      errors.push_back("config.variational: must be an object");
    } else {
      detail::check_keys(va, "config.variational", {"n", "ms", "T"}, errors);
      detail::read_field(va, "config.variational", "n", cfg.variational.n, errors);
      detail::read_field(va, "config.variational", "ms", cfg.variational.ms, errors);
      detail::read_field(va, "config.variational", "T", cfg.variational.T, errors);
      if (cfg.variational.ms.empty()) errors.push_back("config.variational.ms: must be non-empty");
      for (int m : cfg.variational.ms)
        if (m < 8) errors.push_back("config.variational.ms: entries must be >= 8");
    }
  }

  if (doc.contains("linear")) {
    const auto& li = doc["linear"];
    if (!li.is_object()) {
      errors.push_back("config.linear: must be an object");
    } else {
      detail::check_keys(li, "config.linear", {"amplitude", "nx"}, errors);
      detail::read_field(li, "config.linear", "amplitude", cfg.linear.amplitude, errors);
      detail::read_field(li, "config.linear", "nx", cfg.linear.nx, errors);
    }
  }

  if (doc.contains("sweep")) {
    const auto& sw = doc["sweep"];
    if (!sw.is_object()) {
      errors.push_back("config.sweep: must be an object");
    } else {
      detail::check_keys(sw, "config.sweep", {"command", "parameter", "values"}, errors);
      SweepConfig sc;
      if (!detail::read_field(sw, "config.sweep", "command", sc.command, errors))
        errors.push_back("config.sweep.command: required");
      if (!detail::read_field(sw, "config.sweep", "parameter", sc.parameter, errors))
        errors.push_back("config.sweep.parameter: required");
      std::vector<nlohmann::json> values;
      if (sw.contains("values") && sw["values"].is_array()) {
        for (const auto& v : sw["values"]) values.push_back(v);
      } else {
        errors.push_back("config.sweep.values: required array");
      }
      if (values.empty()) errors.push_back("config.sweep.values: must be non-empty");
      if (sc.command == "sweep") errors.push_back("config.sweep.command: cannot be sweep");
      sc.values = std::move(values);
      cfg.sweep = std::move(sc);
    }
  } else if (cfg.command == Command::sweep) {
    errors.push_back("config.sweep: required for the sweep command");
  }

  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

/// Child configurations of a sweep: the base document minus the sweep block,
/// with the swept parameter substituted and the child command installed.
inline std::vector<nlohmann::ordered_json> expand_sweep(const RunConfig& cfg) {
  if (!cfg.sweep) throw std::invalid_argument("expand_sweep: config has no sweep block");
  std::vector<nlohmann::ordered_json> children;
  for (const auto& value : cfg.sweep->values) {
    nlohmann::ordered_json child = cfg.raw;
    child.erase("sweep");
    child["command"] = cfg.sweep->command;
    // dotted path into nested objects
    nlohmann::ordered_json* node = &child;
    std::string path = cfg.sweep->parameter;
    std::size_t dot;
    while ((dot = path.find('.')) != std::string::npos) {
      const std::string head = path.substr(0, dot);
      if (!node->contains(head)) (*node)[head] = nlohmann::ordered_json::object();
      node = &(*node)[head];
      path = path.substr(dot + 1);
    }
    (*node)[path] = value;
    children.push_back(std::move(child));
  }
  return children;
}

inline FieldState build_initial(const RunConfig& cfg, const Grid1D& g) {
  const InitialConfig& ic = cfg.initial;
  if (ic.name == "constant") return ic_constant(g, ic.value);
  if (ic.name == "gaussian") return ic_gaussian(g, ic.amplitude, ic.center, ic.width);
  if (ic.name == "sine") return ic_sine(g, ic.amplitude, ic.mode, ic.phase);
  if (ic.name == "peakon_pair")
    return ic_peakon_pair(g, ic.p1, ic.q1, ic.p2, ic.q2, ic.mollify_dx);
  throw std::invalid_argument("build_initial: unknown initial condition " + ic.name);
}

inline CHParams build_equation(const RunConfig& cfg, const Grid1D& g) {
  if (!cfg.equation.use_F) return CHParams::constant(g, cfg.equation.kappa);
  const FCoefficient& F = cfg.equation.F;
  const double k = 2.0 * std::numbers::pi * F.mode / g.length;
  std::vector<double> samples(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j)
    samples[static_cast<std::size_t>(j)] =
        F.offset + F.amplitude * std::sin(k * g.node(j) + F.phase);
  return CHParams::spatial(g, std::move(samples));
}

}  // namespace chlab
