#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "vpme/asymptotic_data.hpp"

namespace vpme {

enum class RunMode { Theorem, Exploratory };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct DatumSpec {
  DatumFamily family = DatumFamily::GaussianCosine;
  double amplitude = 0.0;  // gaussian-cosine
  double sigma = 0.0;      // gaussian-cosine
  std::string file;        // tabulated-grid; relative paths resolve against the config file
};

struct GridSpec {
  int nx = 256;
  int nv = 512;
  std::optional<double> vmax;     // default: the datum's own velocity cutoff
  int nt = 200;                   // time nodes, both ends included
  std::optional<double> horizon;  // default: (16 a1 / a) e^{-aT} = 1e-10
};

struct SolverSpec {
  double newton_tol = 1e-10;
  int newton_max_iterations = 50;
  int ode_substeps = 4;
  double fixed_point_tol = 1e-9;  // relative to 1 + ||E_1||_{a,t0}
  int max_iterations = 30;
  double impulse_floor = 1e-14;  // past the node where the remaining field impulse drops below this, E = 0 and flights are free
};

struct DiagnosticsSpec {
  double probe_velocity = 0.0;
  int weak_times = 8;
};

struct RunConfig {
  DatumSpec datum;
  ClassParameters cls;
  GridSpec grid;
  SolverSpec solver;
  DiagnosticsSpec diagnostics;
  RunMode mode = RunMode::Theorem;
  std::string output_dir;
  std::uint64_t seed = 0;

  double horizon() const { return grid.horizon ? *grid.horizon : cls.default_horizon(); }
  double vmax(const AsymptoticDatum& datum) const { return grid.vmax ? *grid.vmax : datum.natural_vmax(); }
};

/// Parses a JSON document with sections `datum`, `class` (mandatory) and `grid`, `solver`,
/// `diagnostics`, `mode`, `output_dir`, `seed` (optional). Throws ParseError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Full JSON echo with every default made explicit; parse_config inverts it.
std::string serialize_config(const RunConfig& config);
/// Throws ParseError naming the first key that violates its documented constraint.
void validate_config(const RunConfig& config);

AsymptoticDatum build_datum(const RunConfig& config, const std::filesystem::path& base_dir = {});

}  // namespace vpme
