#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "influence/commands.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path,
                  "run configuration file (INI)")
      ->required();
  cmd->add_option("-o,--out", args.out_dir, "override [paths] output");
  cmd->add_option("--seed", args.seed, "override [seed] root");
}

influence::RunConfig resolve(const CommonArgs& args) {
  influence::RunConfig config = influence::RunConfig::from_file(args.config_path);
  if (!args.out_dir.empty()) config.output_dir = args.out_dir;
  if (args.seed) config.seed = *args.seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"influence dynamics: simulate, forecast, fit, analyze"};
  app.require_subcommand(1);

  CommonArgs args;
  int (*run)(const influence::RunConfig&) = nullptr;

  auto wire = [&](const char* name, const char* help,
                  int (*fn)(const influence::RunConfig&)) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, args);
    cmd->callback([&run, fn] { run = fn; });
  };
  wire("simulate", "step a model from synthetic starts",
       influence::cmd_simulate);
  wire("forecast", "predict session reports round over round",
       influence::cmd_forecast);
  wire("fit", "train and evaluate the estimators", influence::cmd_fit);
  wire("analyze", "correlation, regression, causality summaries",
       influence::cmd_analyze);
  wire("networks", "export communication networks", influence::cmd_networks);

  CLI11_PARSE(app, argc, argv);

  try {
    return run(resolve(args));
  } catch (const influence::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
