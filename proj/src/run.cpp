#include "vpme/run.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "vpme/diagnostics.hpp"
#include "vpme/errors.hpp"
#include "vpme/io.hpp"
#include "vpme/scheme.hpp"

namespace vpme {

namespace {

std::ostream& out_of(const CommandContext& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& err_of(const CommandContext& ctx) { return ctx.err ? *ctx.err : std::cerr; }

class PhaseClock {
 public:
  explicit PhaseClock(std::vector<PhaseTiming>& sink) : sink_(sink) {}
  void start(std::string phase) {
    stop();
    phase_ = std::move(phase);
    begin_ = std::chrono::steady_clock::now();
  }
  void stop() {
    if (phase_.empty()) return;
    const std::chrono::duration<double> span = std::chrono::steady_clock::now() - begin_;
    sink_.push_back({phase_, span.count()});
    phase_.clear();
  }

 private:
  std::vector<PhaseTiming>& sink_;
  std::string phase_;
  std::chrono::steady_clock::time_point begin_;
};

std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::filesystem::remove(dir / "manifest.json", ec);
  return dir;
}

IterationObserver progress(std::ostream& out) {
  return [&out](const IterationRecord& r) {
    out << "iter " << r.n << "  norm " << format_number(r.norm) << "  delta " << format_number(r.delta);
    if (!std::isnan(r.ratio)) out << "  ratio " << format_number(r.ratio);
    out << "  newton " << r.newton_iterations << std::endl;
  };
}

void print_validation(std::ostream& out, const ValidationReport& v) {
  auto flag = [](bool b) { return b ? "pass" : "FAIL"; };
  out << "nonnegative       " << flag(v.nonnegative) << "  (min " << format_number(v.min_value) << ")\n"
      << "tail bound        " << flag(v.tail_bound) << "  (max ratio " << format_number(v.max_tail_ratio) << ")\n"
      << "fourier envelope  " << flag(v.fourier_envelope) << "  (max ratio " << format_number(v.max_envelope_ratio)
      << ")\n"
      << "series condition  " << flag(v.series_condition) << "  (a1 >= " << format_number(v.required_a1) << ")\n"
      << "t0 admissible     " << flag(v.t0_admissible) << "  (t0 >= " << format_number(v.min_t0) << ")\n"
      << "theorem regime    " << flag(v.theorem_regime) << "  (a >= " << format_number(v.theorem_min_rate) << ")\n";
}

std::string pass_fail(bool ok) { return ok ? "pass" : "fail"; }

}  // namespace

std::filesystem::path resolve_output_dir(const RunConfig& config,
                                         const std::optional<std::filesystem::path>& override_dir) {
  if (override_dir) return *override_dir;
  if (!config.output_dir.empty()) return config.output_dir;
  const std::string leaf = "vpme-" + std::to_string(config.seed);
  if (const char* root = std::getenv("VPME_OUTPUT_ROOT"); root && *root) return std::filesystem::path(root) / leaf;
  return std::filesystem::path("runs") / leaf;
}

int validate_command(const RunConfig& config, const CommandContext& ctx) {
  try {
    validate_config(config);
    const AsymptoticDatum datum = build_datum(config, ctx.base_dir);
    const ValidationReport report = validate_class_membership(datum);
    print_validation(out_of(ctx), report);
    const bool usable = config.mode == RunMode::Theorem ? report.theorem_ready() : report.member();
    out_of(ctx) << "mode " << to_string(config.mode) << ": " << (usable ? "usable" : "not usable") << '\n';
    return usable ? kExitConverged : kExitError;
  } catch (const std::exception& e) {
    err_of(ctx) << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int run_command(const RunConfig& config, const CommandContext& ctx) {
  std::ostream& out = out_of(ctx);
  std::ostream& err = err_of(ctx);
  RunManifest manifest;
  manifest.command = "run";
  manifest.config_echo = serialize_config(config);
  PhaseClock clock(manifest.phases);
  std::filesystem::path dir;
  try {
    dir = prepare_dir(resolve_output_dir(config, ctx.output_override));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    clock.start("validate");
    validate_config(config);
    const AsymptoticDatum datum = build_datum(config, ctx.base_dir);
    const ValidationReport validation = validate_class_membership(datum);
    if (config.mode == RunMode::Theorem && !validation.theorem_ready()) {
      print_validation(err, validation);
      throw ParameterError("datum is not admissible in theorem mode (use --mode exploratory to proceed)");
    }

    clock.start("iterate");
    SchemeResult result = run_iteration(datum, config, progress(out));
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';

    clock.start("diagnostics");
    RunReports reports;
    reports.decay = decay_fit(result.field, config.cls);
    const FlowOptions flow{config.solver.ode_substeps};
    reports.weak = weak_convergence_gap(datum, result.field,
                                        report_times(result.field.time_grid(), config.diagnostics.weak_times),
                                        default_test_set(), VelocityGrid::trapezoid(result.vmax, config.grid.nv), flow);

    clock.start("write");
    manifest.files = emit_outputs(result, reports, dir);
    clock.stop();

    const bool contraction = result.converged && result.max_ratio() <= 0.5;
    manifest.status = result.converged ? "converged" : "not-converged";
    manifest.exit_status = result.converged ? kExitConverged : kExitNotConverged;
    manifest.final_delta = result.iterations.empty() ? 0.0 : result.iterations.back().delta;
    if (!reports.decay->degenerate) manifest.decay_rate = reports.decay->rate;
    manifest.envelope_pass = reports.decay->envelope_pass;
    manifest.headline = {"contraction ≤ 0.5: " + pass_fail(contraction),
                         "converged: " + std::string(result.converged ? "yes" : "no") + " after " +
                             std::to_string(result.count()) + " iterations",
                         "decay envelope: " + pass_fail(reports.decay->envelope_pass)};
    write_manifest(manifest, dir);
    for (const auto& line : manifest.headline) out << line << '\n';
    out << "output: " << dir.string() << '\n';
    return manifest.exit_status;
  } catch (const std::exception& e) {
    clock.stop();
    err << "error: " << e.what() << '\n';
    manifest.status = "error";
    manifest.exit_status = kExitError;
    manifest.headline = {std::string("error: ") + e.what()};
    try {
      write_manifest(manifest, dir);
    } catch (const std::exception& io) {
      err << "error: " << io.what() << '\n';
    }
    return kExitError;
  }
}

int demo_instability_command(const RunConfig& config, const CommandContext& ctx) {
  std::ostream& out = out_of(ctx);
  std::ostream& err = err_of(ctx);
  RunManifest manifest;
  manifest.command = "demo-instability";
  manifest.config_echo = serialize_config(config);
  PhaseClock clock(manifest.phases);
  std::filesystem::path dir;
  try {
    dir = prepare_dir(resolve_output_dir(config, ctx.output_override));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  try {
    clock.start("demo");
    const MuParameters mu{config.datum.amplitude, config.datum.sigma};
    RunReports reports;
    reports.instability = instability_report(mu, config.cls, config, progress(out));
    clock.start("write");
    write_reports(reports, nullptr, dir / "reports.json");
    clock.stop();
    const InstabilityReport& r = *reports.instability;
    manifest.files = {"reports.json"};
    manifest.status = r.converged ? "converged" : "not-converged";
    manifest.exit_status = r.converged ? kExitConverged : kExitNotConverged;
    manifest.headline = {"weak gaps decreasing: " + pass_fail(r.weak_gaps_decreasing),
                         "probe gap bounded below (proxy): " + pass_fail(r.probe_bounded_below)};
    write_manifest(manifest, dir);
    out << r.narrative << '\n';
    for (const auto& line : manifest.headline) out << line << '\n';
    out << "output: " << dir.string() << '\n';
    return manifest.exit_status;
  } catch (const std::exception& e) {
    clock.stop();
    err << "error: " << e.what() << '\n';
    manifest.status = "error";
    manifest.exit_status = kExitError;
    manifest.headline = {std::string("error: ") + e.what()};
    try {
      write_manifest(manifest, dir);
    } catch (const std::exception& io) {
      err << "error: " << io.what() << '\n';
    }
    return kExitError;
  }
}

int decay_report_command(const std::filesystem::path& run_dir, const CommandContext& ctx) {
  try {
    std::ifstream in(run_dir / "manifest.json");
    if (!in) throw IoError("no manifest in '" + run_dir.string() + "' (incomplete run?)");
    const auto manifest = nlohmann::json::parse(in, nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("config") || manifest["config"].is_null())
      throw IoError("manifest in '" + run_dir.string() + "' carries no config echo");
    const RunConfig config = parse_config(manifest["config"].dump());
    const FieldHistory field = read_field_table(run_dir / "fields.csv");
    const DecayReport r = decay_fit(field, config.cls);
    std::ostream& out = out_of(ctx);
    if (r.degenerate) {
      out << "decay fit: degenerate (fewer than 3 nodes above the floor)\n";
    } else {
      out << "decay fit: sup|E| ~ " << format_number(r.prefactor) << " exp(-" << format_number(r.rate) << " t)\n"
          << "r_squared " << format_number(r.r_squared) << " over " << r.times.size() << " nodes\n";
    }
    out << "envelope 16 a1 e^{-a t}: " << pass_fail(r.envelope_pass) << " (max ratio "
        << format_number(r.envelope_max_ratio) << ")\n";
    return kExitConverged;
  } catch (const std::exception& e) {
    err_of(ctx) << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace vpme
