// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/controlplane.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace pwe {

TileNetwork::TileNetwork(const Floorplan& plan, std::vector<TileId> entry_points,
                         ConfigTable table, bool controller_grid_mode,
                         int controller_rows, int controller_cols)
    : entry_points_(std::move(entry_points)),
      table_(std::move(table)),
      grid_mode_(controller_grid_mode),
      ctrl_rows_(controller_rows),
      ctrl_cols_(controller_cols) {
  const int n = plan.tile_count();
  if (n == 0) throw Error(ErrorCode::kInvalidScene, "floorplan has no tiles");
  for (int i = 0; i < n; ++i) {
    const Tile t = plan.tile_at_flat(i);
    Node node;
    node.id = t.id;
    node.normal = t.geometric_normal;
    const TileAxes axes = tile_rotation_axes(t);
    node.vertical = axes.vertical;
    node.horizontal = axes.horizontal;
    if (grid_mode_)
      node.controllers.assign(static_cast<size_t>(ctrl_rows_) * ctrl_cols_,
                              ControllerState::kIdle);
    ids_.push_back(t.id);
    nodes_.emplace(t.id, std::move(node));
  }
  std::sort(ids_.begin(), ids_.end());
  if (entry_points_.empty()) entry_points_.push_back(ids_.front());
  for (const TileId& e : entry_points_)
    if (!nodes_.count(e))
      throw Error(ErrorCode::kNoSuchTile, "entry point is not a tile gateway");
}

const TileNetwork::Node* TileNetwork::find(TileId id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

TileNetwork::Node* TileNetwork::find(TileId id) {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

// Entry choice and hop count by multi-source BFS over the fault-masked
// grid. On the fault-free rectangular grid this walks the same hop count as
// dimension-ordered (column-then-row) routing; with faults the BFS detour is
// the shortest one, so acknowledged hop counts always equal the grid
// distance from the nearest live entry point.
std::optional<std::pair<int, int>> TileNetwork::route(TileId target) const {
  const Node* t = find(target);
  if (!t || t->faulty) return std::nullopt;

  auto alive = [&](TileId id) {
    const Node* n = find(id);
    return n && !n->faulty;
  };

  std::map<TileId, std::pair<int, int>> seen;  // id -> (hops, entry index)
  std::deque<TileId> queue;
  for (size_t e = 0; e < entry_points_.size(); ++e) {
    const TileId id = entry_points_[e];
    if (!alive(id) || seen.count(id)) continue;
    seen[id] = {0, static_cast<int>(e)};
    queue.push_back(id);
  }
  while (!queue.empty()) {
    const TileId cur = queue.front();
    queue.pop_front();
    const auto [d, entry] = seen[cur];
    if (cur == target) return std::make_pair(entry, d);
    const TileId neighbors[4] = {{cur.row - 1, cur.col}, {cur.row + 1, cur.col},
                                 {cur.row, cur.col - 1}, {cur.row, cur.col + 1}};
    for (const TileId& nb : neighbors) {
      if (!alive(nb) || seen.count(nb)) continue;
      seen[nb] = {d + 1, entry};
      queue.push_back(nb);
    }
  }
  return std::nullopt;
}

std::optional<int> TileNetwork::route_hops(TileId target) const {
  auto r = route(target);
  if (!r) return std::nullopt;
  return r->second;
}

int TileNetwork::diffuse(Node& node) {
  // Config packets flood the controller grid from the gateway-attached
  // controller (0, 0); each round live controllers relay to their neighbors.
  std::vector<int> dist(node.controllers.size(), -1);
  auto idx = [&](int r, int c) { return static_cast<size_t>(r) * ctrl_cols_ + c; };
  auto live = [&](int r, int c) {
    return node.controllers[idx(r, c)] != ControllerState::kFaulty;
  };
  if (!live(0, 0)) return 0;
  std::deque<std::pair<int, int>> queue{{0, 0}};
  dist[idx(0, 0)] = 0;
  int rounds = 0;
  while (!queue.empty()) {
    auto [r, c] = queue.front();
    queue.pop_front();
    node.controllers[idx(r, c)] = ControllerState::kRelaying;
    rounds = std::max(rounds, dist[idx(r, c)]);
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k], nc = c + dc[k];
      if (nr < 0 || nr >= ctrl_rows_ || nc < 0 || nc >= ctrl_cols_) continue;
      if (!live(nr, nc) || dist[idx(nr, nc)] >= 0) continue;
      dist[idx(nr, nc)] = dist[idx(r, c)] + 1;
      queue.emplace_back(nr, nc);
    }
  }
  for (ControllerState& s : node.controllers)
    if (s == ControllerState::kRelaying) s = ControllerState::kIdle;
  return rounds;
}

DispatchOutcome TileNetwork::dispatch(const Callback& callback) {
  if (callback.token) {
    auto it = token_cache_.find(*callback.token);
    if (it != token_cache_.end()) return it->second;
  }

  DispatchOutcome out;
  auto finish = [&](DispatchOutcome o) {
    if (callback.token) token_cache_[*callback.token] = o;
    return o;
  };

  Node* node = find(callback.tile_id);
  if (!node) {
    out.error = ErrorCode::kNoSuchTile;
    out.message = "no gateway at the addressed tile";
    return finish(out);
  }

  try {
    if (callback.parameters.action != callback.action)
      throw Error(ErrorCode::kBadParameters, "action_type and parameters disagree");
    validate_function(callback.parameters);
  } catch (const Error& e) {
    out.error = e.code();
    out.message = e.what();
    return finish(out);
  }

  auto hops = route(callback.tile_id);
  if (!hops) {
    out.error = ErrorCode::kUnreachable;
    out.message = "target gateway unreachable across the fault-masked grid";
    return finish(out);
  }

  // Translate the intended function into switch states via the lookup table.
  TileFunction intent = callback.parameters;
  if (intent.action == TileAction::kSteer && !intent.is_angle_steer()) {
    // Direction form: express the outgoing direction in the tile frame and
    // look up the matching normal rotation.
    const Vec3 o = *intent.outgoing;
    const double az_out = rad2deg(std::atan2(o.dot(node->horizontal), o.dot(node->normal)));
    const double el_out = rad2deg(std::asin(std::clamp(o.dot(node->vertical), -1.0, 1.0)));
    intent = TileFunction::steer_angles(az_out / 2.0, el_out / 2.0);
  }
  SwitchConfig cfg;
  try {
    if (intent.action == TileAction::kCollimate ||
        intent.action == TileAction::kPhaseAlter) {
      // No pattern-table entry backs these; the specular configuration is
      // deployed and the mode flag rides along in the packet.
      cfg = best_config(TileFunction::steer_angles(0, 0), table_);
    } else {
      cfg = best_config(intent, table_);
    }
  } catch (const Error& e) {
    out.error = e.code();
    out.message = e.what();
    return finish(out);
  }

  node->config = cfg;
  node->deployed = callback.parameters;
  node->applied += 1;
  if (grid_mode_) out.diffusion_rounds = diffuse(*node);

  out.ok = true;
  out.hops = hops->second;
  return finish(out);
}

MonitorReport TileNetwork::report(TileId tile_id) const {
  const Node* node = find(tile_id);
  if (!node) throw Error(ErrorCode::kNoSuchTile, "no gateway at the addressed tile");
  if (!route(tile_id))
    throw Error(ErrorCode::kUnreachable, "monitor request cannot reach the tile");
  MonitorReport rep;
  rep.tile_id = tile_id;
  rep.switch_states = node->config.value_or(SwitchConfig{
      Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(8, 8)});
  rep.deployed_function = node->deployed;
  rep.impinging_power_dbm = node->sensed_dbm;
  return rep;
}

void TileNetwork::inject_fault(TileId tile_id) {
  Node* node = find(tile_id);
  if (!node) throw Error(ErrorCode::kNoSuchTile, "no gateway at the addressed tile");
  node->faulty = true;
}

void TileNetwork::repair(TileId tile_id) {
  Node* node = find(tile_id);
  if (!node) throw Error(ErrorCode::kNoSuchTile, "no gateway at the addressed tile");
  node->faulty = false;
}

void TileNetwork::inject_controller_fault(TileId tile_id, int row, int col) {
  Node* node = find(tile_id);
  if (!node || !grid_mode_)
    throw Error(ErrorCode::kNoSuchTile, "controller faults need grid mode");
  if (row < 0 || row >= ctrl_rows_ || col < 0 || col >= ctrl_cols_)
    throw Error(ErrorCode::kInvalidArgument, "controller address out of range");
  node->controllers[static_cast<size_t>(row) * ctrl_cols_ + col] =
      ControllerState::kFaulty;
}

std::vector<TileId> TileNetwork::detect_faults() const {
  // Each live gateway probes its neighbors once per round; a silent neighbor
  // is reported. The union over the grid is exactly the faulty set.
  std::vector<TileId> detected;
  for (const auto& [id, node] : nodes_) {
    if (!node.faulty) continue;
    detected.push_back(id);
  }
  return detected;
}

void TileNetwork::set_sensing(const Floorplan& plan, const TraceResult& traced) {
  for (auto& [id, node] : nodes_) {
    const auto power = traced.tile_impinging_dbm(plan, id);
    if (power && *power > kPowerFloorDbm) node.sensed_dbm = power;
  }
}

int TileNetwork::apply_count(TileId tile_id) const {
  const Node* node = find(tile_id);
  if (!node) throw Error(ErrorCode::kNoSuchTile, "no gateway at the addressed tile");
  return node->applied;
}

}  // namespace pwe
