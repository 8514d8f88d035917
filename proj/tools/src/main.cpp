#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "elm/errors.hpp"
#include "elm_cli/config.hpp"
#include "elm_cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Eulerian-Lagrangian solver for linear convection-diffusion"};
  app.require_subcommand(1);
  std::string path;
  auto* run = app.add_subcommand("run", "time stepping in the configured mode");
  auto* study = app.add_subcommand("study", "temporal convergence study");
  auto* trace = app.add_subcommand("trace", "characteristic tracing diagnostics");
  for (auto* sub : {run, study, trace})
    sub->add_option("config", path, "key = value configuration file")->required();
  CLI11_PARSE(app, argc, argv);

  elm::cli::RunConfig config;
  try {
    config = elm::cli::load_config(path);
  } catch (const elm::Error& e) {
    std::cerr << "error: " << path << ": " << e.what() << '\n';
    return elm::cli::kConfigError;
  }
  if (study->parsed()) config.mode = elm::cli::Mode::Convergence;
  else if (trace->parsed()) config.mode = elm::cli::Mode::Trace;
  else if (config.mode == elm::cli::Mode::Convergence || config.mode == elm::cli::Mode::Trace) {
    std::cerr << "error: mode " << elm::cli::to_string(config.mode) << " needs the '"
              << (config.mode == elm::cli::Mode::Trace ? "trace" : "study") << "' subcommand\n";
    return elm::cli::kConfigError;
  }
  return elm::cli::run_guarded(config, std::cout, std::cerr);
}
