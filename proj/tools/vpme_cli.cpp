#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vpme/config.hpp"
#include "vpme/io.hpp"
#include "vpme/run.hpp"

namespace {

struct ConfigArgs {
  std::string path;
  std::string mode;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_config_args(CLI::App* cmd, ConfigArgs& args, bool with_output) {
  cmd->add_option("config", args.path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mode", args.mode, "theorem | exploratory (overrides the config)")
      ->check(CLI::IsMember({"theorem", "exploratory"}));
  if (with_output) cmd->add_option("--out", args.out, "output directory (overrides config and $VPME_OUTPUT_ROOT)");
  cmd->add_option("--seed", args.seed, "random seed recorded in the manifest");
}

vpme::RunConfig load(const ConfigArgs& args) {
  vpme::RunConfig config = vpme::load_config(args.path);
  if (!args.mode.empty()) config.mode = vpme::run_mode_from_string(args.mode);
  if (args.seed) config.seed = *args.seed;
  return config;
}

vpme::CommandContext context(const ConfigArgs& args) {
  vpme::CommandContext ctx;
  ctx.base_dir = std::filesystem::path(args.path).parent_path();
  if (!args.out.empty()) ctx.output_override = args.out;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering-state solver for 1D Vlasov-Poisson with massless electrons"};
  app.set_version_flag("--version", vpme::code_version());
  app.require_subcommand(1);

  ConfigArgs validate_args, run_args, demo_args;
  std::string run_dir;
  auto* validate = app.add_subcommand("validate", "check the datum against its class");
  add_config_args(validate, validate_args, false);
  auto* run = app.add_subcommand("run", "solve for the scattering field and write tables, reports, manifest");
  add_config_args(run, run_args, true);
  auto* demo = app.add_subcommand("demo-instability", "weak vs pointwise convergence near a Maxwellian");
  add_config_args(demo, demo_args, true);
  auto* decay = app.add_subcommand("decay-report", "refit the field decay of a finished run");
  decay->add_option("run-dir", run_dir, "run directory containing manifest.json and fields.csv")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vpme::kExitError;
  }

  try {
    if (*validate) return vpme::validate_command(load(validate_args), context(validate_args));
    if (*run) return vpme::run_command(load(run_args), context(run_args));
    if (*demo) return vpme::demo_instability_command(load(demo_args), context(demo_args));
    if (*decay) return vpme::decay_report_command(run_dir, {});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return vpme::kExitError;
  }
  return vpme::kExitError;
}
