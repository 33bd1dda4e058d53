#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vpme/diagnostics.hpp"
#include "vpme/scheme.hpp"

namespace vpme {

std::string code_version();

/// Shortest decimal string that parses back to the same double.
std::string format_number(double value);

void write_field_table(const FieldHistory& history, const std::filesystem::path& path);
void write_density_table(const DensityHistory& density, const std::filesystem::path& path);
void write_norm_trace(const std::vector<IterationRecord>& records, const std::filesystem::path& path);

/// Rebuilds a field history from a `t,x,Ebar,Etilde,E` table. Potentials are not stored and come back as zero.
FieldHistory read_field_table(const std::filesystem::path& path);

struct RunReports {
  std::optional<DecayReport> decay;
  std::optional<WeakConvergenceReport> weak;
  std::optional<InstabilityReport> instability;
};

struct PhaseTiming {
  std::string phase;
  double seconds = 0.0;
};

struct RunManifest {
  std::string config_echo;  // serialized RunConfig
  std::string command;
  std::string version;
  std::vector<PhaseTiming> phases;
  std::string status;  // converged | not-converged | error
  int exit_status = 0;
  std::optional<double> final_delta;
  std::optional<double> decay_rate;
  std::optional<bool> envelope_pass;
  std::vector<std::string> headline;
  std::vector<std::string> files;
};

/// Writes fields.csv, density.csv, norms.csv and reports.json into `dir` (created if needed).
/// Returns the file names written. Throws IoError when the directory is not writable.
std::vector<std::string> emit_outputs(const SchemeResult& result, const RunReports& reports,
                                      const std::filesystem::path& dir);

/// reports.json without the tables, for commands that produce no scheme result of their own.
void write_reports(const RunReports& reports, const SchemeResult* result, const std::filesystem::path& path);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

std::string report_json(const ValidationReport& report);

}  // namespace vpme
