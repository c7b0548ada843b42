// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "pwe/raytracer.hpp"
#include "pwe/tiles.hpp"
#include "pwe/types.hpp"

namespace pwe {

// Line-of-sight visibility graph over tiles plus the TX/RX terminals.
// Node 0 is the transmitter, node 1 the receiver, nodes 2.. map to flat tile
// indices in floorplan order.
struct TileGraph {
  struct Edge {
    int to = 0;
    double length_m = 0.0;
  };
  std::vector<std::vector<Edge>> adjacency;
  std::vector<int> node_tile_flat;  // -1 for the two terminals
  std::vector<Vec3> node_position;

  static constexpr int kTxNode = 0;
  static constexpr int kRxNode = 1;
  int node_count() const { return static_cast<int>(adjacency.size()); }
};

struct TileGraphOptions {
  // Minimum sine of the angle between an edge and a tile plane; rules out
  // in-plane hops a tile cannot physically redirect.
  double min_departure_sine = 0.02;
  // Terminals connect to every tile they see (devices re-aim their lobes at
  // the chosen routes); otherwise edges require positive pattern gain.
  bool assume_beamforming = true;
};

TileGraph build_tile_graph(const Scene& scene, const Transmitter& tx,
                           const Receiver& rx, const TileGraphOptions& options = {});

// Up to K tile-disjoint TX->RX paths (sharing only the terminals), computed
// as successive shortest augmentations of a unit-node-capacity flow. Fewer
// paths come back when the graph's max-flow is below K. Paths are node index
// sequences including both terminals.
std::vector<std::vector<int>> k_disjoint_paths(const TileGraph& graph, int k);

struct RoutePlan {
  std::vector<std::vector<int>> node_paths;
  std::vector<std::vector<TileId>> tile_routes;   // interior tiles per path
  std::vector<Vec3> launch_directions;            // tx -> first tile center
  std::vector<Vec3> arrival_directions;           // last tile -> rx
  int tiles_deployed = 0;
  int paths_requested = 0;
};

// Deploys STEER along each path (incident from the previous hop, outgoing
// toward the next) and COLLIMATE on first-impact tiles; untouched tiles stay
// passive. With a tile budget only the leading whole routes that fit are
// deployed. Returns the configured scene.
Scene deploy_secure_route(const Scene& scene, const Transmitter& tx,
                          const Receiver& rx, const TileGraph& graph,
                          const std::vector<std::vector<int>>& paths,
                          bool collimate_first = true,
                          std::optional<int> tile_budget = std::nullopt,
                          RoutePlan* plan_out = nullptr);

struct PhaseCancelOptions {
  double grid_step_rad = kPi / 16.0;
  double rx_budget_db = 0.5;  // max drop below the receiver's aligned maximum
  // Per-reflection phase increments are bounded by pi/2; with the flag on,
  // each path's total offset is capped at bounce_count * pi/2 (a default of
  // four bounces is assumed for paths without a count).
  bool enforce_intermediate_bound = false;
  double max_phase_per_bounce_rad = kPi / 2.0;
  std::map<int, int> bounce_counts;
};

struct PhaseCancelResult {
  std::vector<std::pair<int, double>> offsets;  // path id -> phase to add
  double eve_before_dbm = kPowerFloorDbm;
  double eve_after_dbm = kPowerFloorDbm;
  double rx_before_dbm = kPowerFloorDbm;
  double rx_after_dbm = kPowerFloorDbm;
  double rx_aligned_dbm = kPowerFloorDbm;
  bool cancellation_possible = true;
};

// Picks per-path phase offsets that minimize the eavesdropper's coherent
// power while keeping the intended receiver within rx_budget_db of its
// phase-aligned maximum. Offsets live on the discrete grid; the search
// aligns the receiver first and then descends on the eavesdropper power,
// pairing near-equal-power paths into opposite phases.
PhaseCancelResult phase_cancel(const PowerDelayProfile& pdp_eve,
                               const PowerDelayProfile& pdp_rx, double f_c_hz,
                               const PhaseCancelOptions& options = {});

}  // namespace pwe
