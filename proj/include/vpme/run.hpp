#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "vpme/config.hpp"

namespace vpme {

enum ExitStatus : int { kExitConverged = 0, kExitError = 1, kExitNotConverged = 2 };

struct CommandContext {
  std::filesystem::path base_dir;  // resolves relative datum files
  std::optional<std::filesystem::path> output_override;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

/// --out, then config output_dir, then $VPME_OUTPUT_ROOT/vpme-<seed>, then ./runs/vpme-<seed>.
std::filesystem::path resolve_output_dir(const RunConfig& config,
                                         const std::optional<std::filesystem::path>& override_dir = {});

/// Prints the class-membership report. 0 when the datum is usable in the configured mode, 1 otherwise.
int validate_command(const RunConfig& config, const CommandContext& ctx);
/// validate -> iterate -> diagnostics, writing tables, reports and the manifest (last).
int run_command(const RunConfig& config, const CommandContext& ctx);
/// Uses datum.amplitude and datum.sigma as the Maxwellian mu; the datum family is ignored.
int demo_instability_command(const RunConfig& config, const CommandContext& ctx);
/// Refits the decay of an existing run directory and prints the report.
int decay_report_command(const std::filesystem::path& run_dir, const CommandContext& ctx);

}  // namespace vpme
