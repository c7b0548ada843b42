// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pwe/raytracer.hpp"
#include "pwe/tiles.hpp"
#include "pwe/types.hpp"

namespace pwe {

// One tile-configuration assignment: a repertoire index per tile, in the
// floorplan's flat tile order.
struct Genome {
  std::vector<int> genes;

  friend bool operator==(const Genome&, const Genome&) = default;
};

struct GaParams {
  int population_size = 32;
  int generations = 60;
  int tournament_k = 3;
  double crossover_rate = 0.9;
  std::optional<double> mutation_rate_per_gene;  // default 1 / num_tiles
  uint64_t rng_seed = 1;                         // mandatory, reproducibility
  int elitism_count = 2;
  int n_threads = 0;
};

enum class ObjectiveKind {
  kCaseAMaxMinPower,
  kCaseBMinMaxDelaySpread,
  kMultiuserWeightedPower,
};

struct Objective {
  ObjectiveKind kind = ObjectiveKind::kCaseAMaxMinPower;
  std::optional<double> power_threshold_dbm;      // case B constraint
  std::vector<double> weights;                    // multiuser priorities
  std::vector<double> power_split;                // multiuser transmit shares
  std::vector<std::vector<int>> tile_partitions;  // multiuser flat tile sets
};

// Case B constraint-violation penalty weight: ns of fitness per dB short of
// the power threshold.
inline constexpr double kCaseBPenaltyNsPerDb = 10.0;

struct EvalResult {
  double fitness = 0.0;
  std::vector<double> rx_power_dbm;
  std::vector<double> rx_delay_spread_ns;
  double mean_power_dbm = kPowerFloorDbm;
  bool feasible = true;  // case B: all power constraints met
};

struct GaHistoryEntry {
  int generation = 0;
  double best_fitness = 0.0;
};

struct GaResult {
  Genome best_genome;
  double best_fitness = 0.0;
  EvalResult best_eval;
  std::vector<GaHistoryEntry> history;
  bool infeasible = false;  // case B budget exhausted with violations left
};

// Writes the genome onto the floorplan tiles (gene i configures flat tile i).
void deploy_genome(Floorplan* plan, const Genome& genome,
                   const std::vector<TileFunction>& repertoire,
                   bool allow_stacking = false);

// Pure fitness of one genome: deploys, traces, scores.
EvalResult evaluate(const Genome& genome, const Scene& scene, const Transmitter& tx,
                    const Objective& objective, const TraceParams& trace_params,
                    const std::vector<TileFunction>& repertoire);

// Seeded tournament/uniform-crossover/elitist GA. Identical seeds give
// identical results regardless of thread count.
GaResult run_ga(const Scene& scene, const Transmitter& tx, const Objective& objective,
                const TraceParams& trace_params, const GaParams& params,
                const std::vector<TileFunction>& repertoire);

struct HeatmapGrid {
  double x0 = 0.0, x1 = 1.0;
  int nx = 2;
  double y0 = 0.0, y1 = 1.0;
  int ny = 2;
  double z = 1.5;
};

// Received power sampled over a uniform x-y grid (rows: y index, cols: x
// index). Probes reuse the first receiver's antenna when one exists.
Eigen::MatrixXd heatmap(const Scene& scene, const Transmitter& tx,
                        const TraceParams& trace_params, const HeatmapGrid& grid);

// Bilinear upsampling of a heatmap by an integer factor per axis.
Eigen::MatrixXd bilinear_upsample(const Eigen::MatrixXd& m, int factor);

}  // namespace pwe
