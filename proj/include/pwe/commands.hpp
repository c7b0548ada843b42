// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <optional>
#include <string>

#include "pwe/scenario.hpp"

namespace pwe {

// Flag overrides shared by the CLI subcommands; unset fields fall back to
// the scenario file.
struct CommandOptions {
  std::string out_dir = ".";
  std::optional<uint64_t> seed;
  std::optional<std::string> objective;  // case-a | case-b | multiuser
  std::optional<double> threshold_dbm;
  std::optional<int> ga_population;
  std::optional<int> ga_generations;
  std::optional<double> angular_resolution_deg;
  std::string secure_mode = "route";  // route | phase
  int k_paths = 2;
  std::optional<std::string> genome_path;  // trace over a stored best.json
  int n_threads = 0;
};

// Writes paths.csv, powers.csv and pdp.csv. Returns the process exit code.
int cmd_trace(const Scenario& scenario, const CommandOptions& options);

// Runs the configured GA; writes best.json, history.csv and heatmap.csv.
int cmd_optimize(const Scenario& scenario, const CommandOptions& options);

// Route or phase eavesdropping mitigation; writes plan.json and results.csv.
int cmd_secure(const Scenario& scenario, const CommandOptions& options);

// Applies a callback batch (JSON array) to the gateway network and writes
// outcomes.json; exercises faults when the batch is empty.
int cmd_controlplane_demo(const Scenario& scenario, const CommandOptions& options,
                          const std::optional<std::string>& callbacks_path);

}  // namespace pwe
