// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pwe/commands.hpp"
#include "pwe/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation and optimization of programmable indoor wireless environments"};
  app.require_subcommand(1);

  std::string scenario_arg;
  pwe::CommandOptions options;
  std::optional<std::string> callbacks_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_arg,
                    "Preset name (corridor-60ghz, corridor-2.4ghz, security-room, "
                    "smoke-box) or scenario JSON path")
        ->required();
    cmd->add_option("--out", options.out_dir, "Output directory");
    cmd->add_option("--seed", options.seed, "RNG seed override");
    cmd->add_option("--angular-res-deg", options.angular_resolution_deg,
                    "Launch grid resolution override");
    cmd->add_option("--threads", options.n_threads, "Worker threads (0 = auto)");
  };

  CLI::App* trace_cmd = app.add_subcommand("trace", "Trace a scenario and emit CSVs");
  add_common(trace_cmd);
  trace_cmd->add_option("--genome", options.genome_path,
                        "best.json whose genome is deployed before tracing");

  CLI::App* opt_cmd = app.add_subcommand("optimize", "Search tile configurations");
  add_common(opt_cmd);
  opt_cmd->add_option("--objective", options.objective,
                      "case-a | case-b | multiuser");
  opt_cmd->add_option("--threshold-dbm", options.threshold_dbm,
                      "Per-receiver power constraint (case-b)");
  opt_cmd->add_option("--ga-pop", options.ga_population, "GA population size");
  opt_cmd->add_option("--ga-gens", options.ga_generations, "GA generations");

  CLI::App* secure_cmd = app.add_subcommand("secure", "Eavesdropping mitigation");
  add_common(secure_cmd);
  secure_cmd->add_option("--mode", options.secure_mode, "route | phase");
  secure_cmd->add_option("--k", options.k_paths, "Tile-disjoint path count");

  CLI::App* cp_cmd =
      app.add_subcommand("controlplane-demo", "Gateway network callback demo");
  add_common(cp_cmd);
  cp_cmd->add_option("--callbacks", callbacks_path, "Callback batch JSON file");

  CLI11_PARSE(app, argc, argv);

  try {
    const pwe::Scenario scenario = pwe::load_scenario(scenario_arg);
    if (trace_cmd->parsed()) return pwe::cmd_trace(scenario, options);
    if (opt_cmd->parsed()) return pwe::cmd_optimize(scenario, options);
    if (secure_cmd->parsed()) return pwe::cmd_secure(scenario, options);
    if (cp_cmd->parsed())
      return pwe::cmd_controlplane_demo(scenario, options, callbacks_path);
  } catch (const pwe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == pwe::ErrorCode::kInvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
