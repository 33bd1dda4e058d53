#include "vpme/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "vpme/errors.hpp"

namespace vpme {

using nlohmann::ordered_json;

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json to_json(const ValidationReport& r) {
  return ordered_json{{"member", r.member()},
                      {"theorem_ready", r.theorem_ready()},
                      {"nonnegative", r.nonnegative},
                      {"tail_bound", r.tail_bound},
                      {"fourier_envelope", r.fourier_envelope},
                      {"series_condition", r.series_condition},
                      {"t0_admissible", r.t0_admissible},
                      {"theorem_regime", r.theorem_regime},
                      {"min_value", number_or_null(r.min_value)},
                      {"max_tail_ratio", number_or_null(r.max_tail_ratio)},
                      {"max_envelope_ratio", number_or_null(r.max_envelope_ratio)},
                      {"required_a1", number_or_null(r.required_a1)},
                      {"min_t0", number_or_null(r.min_t0)},
                      {"theorem_min_rate", number_or_null(r.theorem_min_rate)},
                      {"lattice", {{"k_max", r.lattice_k_max},
                                   {"eta_max", number_or_null(r.lattice_eta_max)},
                                   {"eta_points", r.lattice_eta_points}}}};
}

ordered_json to_json(const DecayReport& r) {
  return ordered_json{{"degenerate", r.degenerate},
                      {"prefactor", number_or_null(r.prefactor)},
                      {"rate", number_or_null(r.rate)},
                      {"r_squared", number_or_null(r.r_squared)},
                      {"envelope_pass", r.envelope_pass},
                      {"envelope_max_ratio", number_or_null(r.envelope_max_ratio)},
                      {"fitted_nodes", r.times.size()}};
}

ordered_json to_json(const WeakConvergenceReport& r) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"test", e.id}, {"t", number_or_null(e.t)}, {"gap", number_or_null(e.gap)}});
  return ordered_json{{"entries", entries}};
}

ordered_json to_json(const InstabilityReport& r) {
  ordered_json probe = ordered_json::array();
  for (const auto& p : r.probe) probe.push_back({{"t", number_or_null(p.t)}, {"gap", number_or_null(p.gap)}});
  return ordered_json{{"membership", to_json(r.membership)},
                      {"converged", r.converged},
                      {"iterations", r.iterations},
                      {"weak_gaps_decreasing", r.weak_gaps_decreasing},
                      {"final_weak_gap", number_or_null(r.final_weak_gap)},
                      {"probe_velocity", number_or_null(r.probe_velocity)},
                      {"probe_reference", number_or_null(r.probe_reference)},
                      {"probe_bounded_below", r.probe_bounded_below},
                      {"probe_gap_is_proxy", true},
                      {"probe", probe},
                      {"weak", to_json(r.weak)},
                      {"narrative", r.narrative}};
}

ordered_json to_json(const IterationRecord& r) {
  return ordered_json{{"n", r.n},
                      {"norm", number_or_null(r.norm)},
                      {"delta", number_or_null(r.delta)},
                      {"ratio", number_or_null(r.ratio)},
                      {"mass_min", number_or_null(r.mass_min)},
                      {"mass_max", number_or_null(r.mass_max)},
                      {"mass_drift", number_or_null(r.mass_drift)},
                      {"rho_inf", number_or_null(r.rho_inf)},
                      {"rho_l1", number_or_null(r.rho_l1)},
                      {"utilde_max", number_or_null(r.utilde_max)},
                      {"dx_utilde_max", number_or_null(r.dx_utilde_max)},
                      {"dxx_utilde_max", number_or_null(r.dxx_utilde_max)},
                      {"exp_mass_deviation", number_or_null(r.exp_mass_deviation)},
                      {"poisson_residual", number_or_null(r.poisson_residual)},
                      {"lipschitz", number_or_null(r.lipschitz)},
                      {"newton_iterations", r.newton_iterations}};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_number(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw IoError("bad number '" + cell + "' at " + path.string() + ":" + std::to_string(line));
  return value;
}

}  // namespace

std::string code_version() { return VPME_VERSION; }

std::string format_number(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return std::string(buffer, ptr);
}

void write_field_table(const FieldHistory& history, const std::filesystem::path& path) {
  auto out = open_output(path);
  const auto& time = history.time_grid();
  const auto& space = history.spatial_grid();
  out << "t,x,Ebar,Etilde,E\n";
  for (Eigen::Index i = 0; i < time.size(); ++i) {
    const std::string t = format_number(time.node(i));
    for (Eigen::Index j = 0; j < space.size(); ++j) {
      out << t << ',' << format_number(space.node(j)) << ',' << format_number(history.ebar()(i, j)) << ','
          << format_number(history.etilde()(i, j)) << ',' << format_number(history.total()(i, j)) << '\n';
    }
  }
  finish(out, path);
}

void write_density_table(const DensityHistory& density, const std::filesystem::path& path) {
  auto out = open_output(path);
  const auto& time = density.time_grid();
  const auto& space = density.spatial_grid();
  out << "t,x,rho\n";
  for (Eigen::Index i = 0; i < time.size(); ++i) {
    const std::string t = format_number(time.node(i));
    for (Eigen::Index j = 0; j < space.size(); ++j)
      out << t << ',' << format_number(space.node(j)) << ',' << format_number(density.rho()(i, j)) << '\n';
  }
  finish(out, path);
}

void write_norm_trace(const std::vector<IterationRecord>& records, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "n,norm,delta,ratio\n";
  for (const auto& r : records)
    out << r.n << ',' << format_number(r.norm) << ',' << format_number(r.delta) << ',' << format_number(r.ratio)
        << '\n';
  finish(out, path);
}

FieldHistory read_field_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "t,x,Ebar,Etilde,E")
    throw IoError("'" + path.string() + "' is not a field table (header t,x,Ebar,Etilde,E expected)");

  std::vector<double> times;
  std::vector<std::array<double, 2>> values;
  std::size_t nx = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 5) throw IoError("expected 5 columns at " + path.string() + ":" + std::to_string(line_no));
    const double t = parse_number(cells[0], path, line_no);
    if (times.empty() || t != times.back()) {
      if (!times.empty() && values.size() != times.size() * nx)
        throw IoError("ragged field table '" + path.string() + "'");
      times.push_back(t);
    }
    if (times.size() == 1) ++nx;
    values.push_back({parse_number(cells[2], path, line_no), parse_number(cells[3], path, line_no)});
  }
  if (times.size() < 2 || values.size() != times.size() * nx)
    throw IoError("field table '" + path.string() + "' is empty or ragged");

  TimeGrid time(times.front(), times.back(), static_cast<Eigen::Index>(times.size()));
  SpatialGrid space(static_cast<Eigen::Index>(nx));
  SliceMatrixXd ebar(time.size(), space.size());
  SliceMatrixXd etilde(time.size(), space.size());
  for (Eigen::Index i = 0; i < time.size(); ++i) {
    for (Eigen::Index j = 0; j < space.size(); ++j) {
      const auto& row = values[static_cast<std::size_t>(i * space.size() + j)];
      ebar(i, j) = row[0];
      etilde(i, j) = row[1];
    }
  }
  return FieldHistory::from_fields(time, space, std::move(ebar), std::move(etilde));
}

void write_reports(const RunReports& reports, const SchemeResult* result, const std::filesystem::path& path) {
  ordered_json doc;
  if (result) {
    doc["converged"] = result->converged;
    doc["tolerance"] = number_or_null(result->tolerance);
    doc["vmax"] = number_or_null(result->vmax);
    doc["validation"] = to_json(result->validation);
    doc["warnings"] = result->warnings;
    ordered_json trace = ordered_json::array();
    for (const auto& r : result->iterations) trace.push_back(to_json(r));
    doc["iterations"] = trace;
  }
  if (reports.decay) doc["decay"] = to_json(*reports.decay);
  if (reports.weak) doc["weak_convergence"] = to_json(*reports.weak);
  if (reports.instability) doc["instability"] = to_json(*reports.instability);
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

std::vector<std::string> emit_outputs(const SchemeResult& result, const RunReports& reports,
                                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  write_field_table(result.field, dir / "fields.csv");
  write_density_table(result.density, dir / "density.csv");
  write_norm_trace(result.iterations, dir / "norms.csv");
  write_reports(reports, &result, dir / "reports.json");
  return {"fields.csv", "density.csv", "norms.csv", "reports.json"};
}

void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
  ordered_json doc;
  doc["command"] = m.command;
  doc["version"] = m.version.empty() ? code_version() : m.version;
  doc["status"] = m.status;
  doc["exit_status"] = m.exit_status;
  doc["headline"] = m.headline;
  ordered_json metrics = ordered_json::object();
  if (m.final_delta) metrics["final_delta"] = number_or_null(*m.final_delta);
  if (m.decay_rate) metrics["decay_rate"] = number_or_null(*m.decay_rate);
  if (m.envelope_pass) metrics["envelope_pass"] = *m.envelope_pass;
  doc["metrics"] = metrics;
  ordered_json phases = ordered_json::array();
  for (const auto& p : m.phases) phases.push_back({{"phase", p.phase}, {"seconds", p.seconds}});
  doc["wall_clock"] = phases;
  doc["files"] = m.files;
  doc["config"] = m.config_echo.empty() ? ordered_json(nullptr) : ordered_json::parse(m.config_echo);

  const auto path = dir / "manifest.json";
  if (std::filesystem::exists(path)) throw IoError("manifest already present in '" + dir.string() + "'");
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

std::string report_json(const ValidationReport& report) { return to_json(report).dump(2); }

}  // namespace vpme
