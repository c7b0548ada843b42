// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwe/raytracer.hpp"
#include "pwe/tiles.hpp"
#include "pwe/types.hpp"

namespace pwe {

// Configuration command addressed to one tile gateway.
struct Callback {
  TileId tile_id;
  TileAction action = TileAction::kSteer;
  TileFunction parameters;
  // Idempotence token: redelivery of the same token returns the recorded
  // outcome without re-applying the configuration.
  std::optional<uint64_t> token;
};

struct DispatchOutcome {
  bool ok = false;
  int hops = 0;
  ErrorCode error = ErrorCode::kInvalidArgument;
  std::string message;
  int diffusion_rounds = 0;  // controller-grid mode only
};

struct MonitorReport {
  TileId tile_id;
  SwitchConfig switch_states;
  std::optional<TileFunction> deployed_function;
  std::optional<double> impinging_power_dbm;  // set after sensing snapshots
};

enum class ControllerState { kIdle, kRelaying, kReporting, kFaulty };

// Wired gateway grid over the floorplan tiles. Gateways of tiles whose
// addresses differ by one in row or column are neighbors. In the default
// mode the gateway drives every switch element directly; the controller-grid
// mode additionally simulates per-tile packet diffusion through a grid of
// controller nodes in discrete rounds.
class TileNetwork {
 public:
  TileNetwork(const Floorplan& plan, std::vector<TileId> entry_points,
              ConfigTable table, bool controller_grid_mode = false,
              int controller_rows = 8, int controller_cols = 8);

  DispatchOutcome dispatch(const Callback& callback);

  // Throws NO_SUCH_TILE / UNREACHABLE.
  MonitorReport report(TileId tile_id) const;

  void inject_fault(TileId tile_id);
  void repair(TileId tile_id);
  void inject_controller_fault(TileId tile_id, int row, int col);

  // Neighbor liveness scan; in this fault-free-detector model the result
  // equals the injected set.
  std::vector<TileId> detect_faults() const;

  // Stores the latest per-tile impinging powers for report().
  void set_sensing(const Floorplan& plan, const TraceResult& traced);

  // BFS hop distance from the nearest entry point, fault-masked.
  std::optional<int> route_hops(TileId target) const;

  int apply_count(TileId tile_id) const;  // how often a config landed
  const std::vector<TileId>& tile_ids() const { return ids_; }

 private:
  struct Node {
    TileId id;
    bool faulty = false;
    std::optional<SwitchConfig> config;
    std::optional<TileFunction> deployed;
    std::optional<double> sensed_dbm;
    int applied = 0;
    // Tile-local rotation context for direction-form steers.
    Vec3 normal = Vec3::UnitZ();
    Vec3 vertical = Vec3::UnitZ();
    Vec3 horizontal = Vec3::UnitX();
    std::vector<ControllerState> controllers;  // grid mode
  };

  const Node* find(TileId id) const;
  Node* find(TileId id);
  std::optional<std::pair<int, int>> route(TileId target) const;  // entry idx, hops
  int diffuse(Node& node);

  std::vector<TileId> ids_;
  std::map<TileId, Node> nodes_;
  std::vector<TileId> entry_points_;
  ConfigTable table_;
  bool grid_mode_ = false;
  int ctrl_rows_ = 8;
  int ctrl_cols_ = 8;
  std::map<uint64_t, DispatchOutcome> token_cache_;
};

}  // namespace pwe
