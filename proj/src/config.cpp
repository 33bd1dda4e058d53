#include "vpme/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vpme/errors.hpp"

namespace vpme {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& section, const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ParseError(section.empty() ? key : section + "." + key, "unknown key");
  }
}

const json& require_object(const json& parent, const std::string& key) {
  if (!parent.contains(key)) throw ParseError(key, "missing mandatory section");
  const json& obj = parent.at(key);
  if (!obj.is_object()) throw ParseError(key, "expected an object");
  return obj;
}

double number(const json& obj, const std::string& section, const std::string& key) {
  const std::string name = section + "." + key;
  if (!obj.contains(key)) throw ParseError(name, "missing mandatory key");
  if (!obj.at(key).is_number()) throw ParseError(name, "expected a number");
  return obj.at(key).get<double>();
}

template <typename T>
void optional_value(const json& obj, const std::string& section, const std::string& key, T& out) {
  if (!obj.contains(key)) return;
  const json& value = obj.at(key);
  const std::string name = section.empty() ? key : section + "." + key;
  if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
    if (!value.is_number_integer()) throw ParseError(name, "expected an integer");
    if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (value.is_number_unsigned()) {
        out = value.get<std::uint64_t>();
      } else {
        const auto signed_value = value.get<std::int64_t>();
        if (signed_value < 0) throw ParseError(name, "expected a nonnegative integer");
        out = static_cast<std::uint64_t>(signed_value);
      }
    } else {
      out = value.get<int>();
    }
  } else if constexpr (std::is_same_v<T, double>) {
    if (!value.is_number()) throw ParseError(name, "expected a number");
    out = value.get<double>();
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    if (!value.is_number()) throw ParseError(name, "expected a number");
    out = value.get<double>();
  } else {
    if (!value.is_string()) throw ParseError(name, "expected a string");
    out = value.get<std::string>();
  }
}

}  // namespace

std::string to_string(RunMode mode) { return mode == RunMode::Theorem ? "theorem" : "exploratory"; }

RunMode run_mode_from_string(const std::string& name) {
  if (name == "theorem") return RunMode::Theorem;
  if (name == "exploratory") return RunMode::Exploratory;
  throw ParseError("mode", "expected 'theorem' or 'exploratory', got '" + name + "'");
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("<document>", e.what());
  }
  if (!doc.is_object()) throw ParseError("<document>", "expected a top-level object");
  reject_unknown(doc, "", {"datum", "class", "grid", "solver", "diagnostics", "mode", "output_dir", "seed"});

  RunConfig cfg;
  const json& datum = require_object(doc, "datum");
  reject_unknown(datum, "datum", {"family", "amplitude", "sigma", "file"});
  std::string family;
  if (!datum.contains("family")) throw ParseError("datum.family", "missing mandatory key");
  optional_value(datum, "datum", "family", family);
  try {
    cfg.datum.family = datum_family_from_string(family);
  } catch (const ParameterError& e) {
    throw ParseError("datum.family", e.what());
  }
  if (cfg.datum.family == DatumFamily::GaussianCosine) {
    cfg.datum.amplitude = number(datum, "datum", "amplitude");
    cfg.datum.sigma = number(datum, "datum", "sigma");
  } else {
    if (!datum.contains("file")) throw ParseError("datum.file", "missing mandatory key");
    optional_value(datum, "datum", "file", cfg.datum.file);
  }

  const json& cls = require_object(doc, "class");
  reject_unknown(cls, "class", {"a", "a1", "a2", "alpha", "t0"});
  cfg.cls.a = number(cls, "class", "a");
  cfg.cls.a1 = number(cls, "class", "a1");
  cfg.cls.a2 = number(cls, "class", "a2");
  cfg.cls.alpha = number(cls, "class", "alpha");
  if (cls.contains("t0")) {
    cfg.cls.t0 = number(cls, "class", "t0");
  } else if (cfg.cls.a > 0.0 && cfg.cls.a1 > 0.0 && cfg.cls.a2 > 0.0) {
    cfg.cls.t0 = cfg.cls.min_admissible_t0();
  }

  if (doc.contains("grid")) {
    const json& g = require_object(doc, "grid");
    reject_unknown(g, "grid", {"Nx", "Nv", "vmax", "Nt", "T"});
    optional_value(g, "grid", "Nx", cfg.grid.nx);
    optional_value(g, "grid", "Nv", cfg.grid.nv);
    optional_value(g, "grid", "vmax", cfg.grid.vmax);
    optional_value(g, "grid", "Nt", cfg.grid.nt);
    optional_value(g, "grid", "T", cfg.grid.horizon);
  }
  if (doc.contains("solver")) {
    const json& s = require_object(doc, "solver");
    reject_unknown(s, "solver", {"newton_tol", "newton_max_iterations", "ode_substeps", "fixed_point_tol",
                                 "max_iterations", "impulse_floor"});
    optional_value(s, "solver", "newton_tol", cfg.solver.newton_tol);
    optional_value(s, "solver", "newton_max_iterations", cfg.solver.newton_max_iterations);
    optional_value(s, "solver", "ode_substeps", cfg.solver.ode_substeps);
    optional_value(s, "solver", "fixed_point_tol", cfg.solver.fixed_point_tol);
    optional_value(s, "solver", "max_iterations", cfg.solver.max_iterations);
    optional_value(s, "solver", "impulse_floor", cfg.solver.impulse_floor);
  }
  if (doc.contains("diagnostics")) {
    const json& d = require_object(doc, "diagnostics");
    reject_unknown(d, "diagnostics", {"probe_velocity", "weak_times"});
    optional_value(d, "diagnostics", "probe_velocity", cfg.diagnostics.probe_velocity);
    optional_value(d, "diagnostics", "weak_times", cfg.diagnostics.weak_times);
  }
  if (doc.contains("mode")) {
    std::string mode;
    optional_value(doc, "", "mode", mode);
    cfg.mode = run_mode_from_string(mode);
  }
  optional_value(doc, "", "output_dir", cfg.output_dir);
  optional_value(doc, "", "seed", cfg.seed);

  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate_config(const RunConfig& c) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (c.datum.family == DatumFamily::GaussianCosine) {
    if (!positive(c.datum.amplitude)) throw ParseError("datum.amplitude", "must be positive");
    if (!positive(c.datum.sigma)) throw ParseError("datum.sigma", "must be positive");
  } else if (c.datum.file.empty()) {
    throw ParseError("datum.file", "must name a grid file");
  }
  if (!positive(c.cls.a)) throw ParseError("class.a", "must be positive");
  if (!positive(c.cls.a1)) throw ParseError("class.a1", "must be positive");
  if (!positive(c.cls.a2)) throw ParseError("class.a2", "must be positive");
  if (!(c.cls.alpha > 0.0 && c.cls.alpha < 1.0)) throw ParseError("class.alpha", "must lie in (0,1)");
  if (!(c.cls.t0 >= 0.0) || !std::isfinite(c.cls.t0)) throw ParseError("class.t0", "must be finite and >= 0");
  if (c.grid.nx < 8 || c.grid.nx % 2 != 0) throw ParseError("grid.Nx", "must be even and >= 8");
  if (c.grid.nv < 3) throw ParseError("grid.Nv", "must be >= 3");
  if (c.grid.vmax && !positive(*c.grid.vmax)) throw ParseError("grid.vmax", "must be positive");
  if (c.grid.nt < 3) throw ParseError("grid.Nt", "must be >= 3");
  if (c.grid.horizon && !(std::isfinite(*c.grid.horizon) && *c.grid.horizon > c.cls.t0))
    throw ParseError("grid.T", "horizon T must exceed t0");
  if (!positive(c.solver.newton_tol)) throw ParseError("solver.newton_tol", "must be positive");
  if (c.solver.newton_max_iterations < 1) throw ParseError("solver.newton_max_iterations", "must be >= 1");
  if (c.solver.ode_substeps < 1) throw ParseError("solver.ode_substeps", "must be >= 1");
  if (!positive(c.solver.fixed_point_tol)) throw ParseError("solver.fixed_point_tol", "must be positive");
  if (c.solver.max_iterations < 1) throw ParseError("solver.max_iterations", "must be >= 1");
  if (!(c.solver.impulse_floor >= 0.0)) throw ParseError("solver.impulse_floor", "must be >= 0");
  if (c.diagnostics.weak_times < 2) throw ParseError("diagnostics.weak_times", "must be >= 2");
}

std::string serialize_config(const RunConfig& c) {
  json doc;
  json datum{{"family", to_string(c.datum.family)}};
  if (c.datum.family == DatumFamily::GaussianCosine) {
    datum["amplitude"] = c.datum.amplitude;
    datum["sigma"] = c.datum.sigma;
  } else {
    datum["file"] = c.datum.file;
  }
  doc["datum"] = datum;
  doc["class"] = {{"a", c.cls.a}, {"a1", c.cls.a1}, {"a2", c.cls.a2}, {"alpha", c.cls.alpha}, {"t0", c.cls.t0}};
  json grid{{"Nx", c.grid.nx}, {"Nv", c.grid.nv}, {"Nt", c.grid.nt}};
  if (c.grid.vmax) grid["vmax"] = *c.grid.vmax;
  if (c.grid.horizon) grid["T"] = *c.grid.horizon;
  doc["grid"] = grid;
  doc["solver"] = {{"newton_tol", c.solver.newton_tol},
                   {"newton_max_iterations", c.solver.newton_max_iterations},
                   {"ode_substeps", c.solver.ode_substeps},
                   {"fixed_point_tol", c.solver.fixed_point_tol},
                   {"max_iterations", c.solver.max_iterations},
                   {"impulse_floor", c.solver.impulse_floor}};
  doc["diagnostics"] = {{"probe_velocity", c.diagnostics.probe_velocity}, {"weak_times", c.diagnostics.weak_times}};
  doc["mode"] = to_string(c.mode);
  if (!c.output_dir.empty()) doc["output_dir"] = c.output_dir;
  doc["seed"] = c.seed;
  return doc.dump(2);
}

AsymptoticDatum build_datum(const RunConfig& config, const std::filesystem::path& base_dir) {
  if (config.datum.family == DatumFamily::GaussianCosine)
    return make_gaussian_cosine_datum(config.datum.amplitude, config.datum.sigma, config.cls);
  std::filesystem::path file = config.datum.file;
  if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
  return load_tabulated_datum(file, config.cls);
}

}  // namespace vpme
