// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <optional>
#include <vector>

#include "pwe/tile_function.hpp"
#include "pwe/types.hpp"

namespace pwe {

enum class Material { kPlainConcrete, kTile };

// Finite rectangle: origin plus two orthogonal edge vectors.
struct RectSurface {
  Vec3 origin = Vec3::Zero();
  Vec3 edge_u = Vec3::UnitX();
  Vec3 edge_v = Vec3::UnitY();
  Material material = Material::kPlainConcrete;

  RectSurface() = default;
  RectSurface(const Vec3& origin_, const Vec3& edge_u_, const Vec3& edge_v_,
              Material material_ = Material::kPlainConcrete);

  Vec3 geometric_normal() const { return normalized(edge_u.cross(edge_v)); }
  Vec3 center() const { return origin + 0.5 * edge_u + 0.5 * edge_v; }
};

// Grid address of a tile. Panels assign global addresses so that physically
// adjacent tiles differ by one in row or column wherever possible; the same
// addresses index the control-plane gateway grid.
struct TileId {
  int row = 0;
  int col = 0;

  friend bool operator==(const TileId&, const TileId&) = default;
  friend auto operator<=>(const TileId&, const TileId&) = default;
};

// Mutable electromagnetic state of one tile.
struct TileState {
  Vec3 virtual_normal = Vec3::UnitZ();  // defaults to the geometric normal
  bool absorbing = false;
  bool collimate_first_impact = false;
  double phase_offset_rad = 0.0;
  std::optional<TileFunction> deployed_function;
};

// A rectangular wall section carrying a rows x cols grid of square tiles.
// Grouping coplanar tiles keeps ray intersection O(1) per panel.
struct TilePanel {
  Vec3 origin = Vec3::Zero();  // corner of tile (0, 0)
  Vec3 u_dir = Vec3::UnitX();  // unit, along columns
  Vec3 v_dir = Vec3::UnitY();  // unit, along rows
  double tile_side = 1.0;
  int rows = 1;
  int cols = 1;
  int row_offset = 0;  // global address of local (0, 0)
  int col_offset = 0;
  double passive_loss_db = 6.0;  // reflection loss while no function deployed
  std::vector<TileState> states;

  TilePanel() = default;
  TilePanel(const Vec3& origin_, const Vec3& u_dir_, const Vec3& v_dir_,
            double tile_side_, int rows_, int cols_, int row_offset_ = 0,
            int col_offset_ = 0, double passive_loss_db_ = 6.0);

  Vec3 normal() const { return normalized(u_dir.cross(v_dir)); }
  int tile_count() const { return rows * cols; }
  TileState& state_at(int r, int c) { return states[static_cast<size_t>(r) * cols + c]; }
  const TileState& state_at(int r, int c) const {
    return states[static_cast<size_t>(r) * cols + c];
  }
  TileId id_at(int r, int c) const { return TileId{row_offset + r, col_offset + c}; }
  Vec3 tile_center(int r, int c) const {
    return origin + (c + 0.5) * tile_side * u_dir + (r + 0.5) * tile_side * v_dir;
  }
};

// Value view of a single tile, detached from its panel.
struct Tile {
  TileId id;
  Vec3 center = Vec3::Zero();
  Vec3 geometric_normal = Vec3::UnitZ();
  Vec3 u_dir = Vec3::UnitX();
  Vec3 v_dir = Vec3::UnitY();
  double side = 1.0;
  TileState state;

  RectSurface surface() const {
    return RectSurface(center - 0.5 * side * u_dir - 0.5 * side * v_dir,
                       side * u_dir, side * v_dir, Material::kTile);
  }
};

// Fully blocking body unless transparent (the eavesdropper's body lets all
// rays pass so that interception is measured unobstructed).
struct BlockingSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.5;
  bool transparent = false;

  BlockingSphere() = default;
  BlockingSphere(const Vec3& center_, double radius_, bool transparent_ = false);
};

struct Floorplan {
  std::vector<RectSurface> surfaces;
  std::vector<TilePanel> panels;
  std::vector<BlockingSphere> bodies;
  Eigen::AlignedBox3d bounds;

  int tile_count() const;
  // Flat tile ordering: panels in order, row-major inside each panel. This is
  // the genome gene order.
  Tile tile_at_flat(int flat_index) const;
  TileState& state_at_flat(int flat_index);
  const TileState& state_at_flat(int flat_index) const;
  std::optional<int> flat_index_of(TileId id) const;
  std::vector<TileId> all_tile_ids() const;
};

enum class HitKind { kSurface, kTile, kBody };

struct Hit {
  double distance = 0.0;
  Vec3 point = Vec3::Zero();
  HitKind kind = HitKind::kSurface;
  int index = 0;      // surface / panel / body index
  int tile_row = 0;   // panel-local, valid for kTile
  int tile_col = 0;
};

struct IntersectOptions {
  // Skip bodies whose sphere contains the ray origin (a ray leaving a user's
  // own body is not blocked by it).
  bool skip_bodies_containing_origin = false;
  double min_distance = 1e-6;  // self-hit guard, meters
};

// Specular mirror reflection of a unit direction about a unit normal.
Vec3 reflect(const Vec3& dir, const Vec3& normal);

// The normal n with reflect(incident, n) = outgoing. Errors with
// FORWARD_DIRECTION when outgoing equals incident (no mirror exists).
Vec3 virtual_normal(const Vec3& incident, const Vec3& outgoing);

// Tile normal rotated by azimuth about the tile's vertical axis (world z
// projected onto the tile plane) then by elevation about the tile's
// horizontal axis (vertical x normal).
Vec3 steer_normal_from_angles(const Tile& tile, double azimuth_deg,
                              double elevation_deg);

// Rotation axes used by steer_normal_from_angles, exposed for tests.
struct TileAxes {
  Vec3 vertical;
  Vec3 horizontal;
};
TileAxes tile_rotation_axes(const Tile& tile);

// Nearest intersection strictly ahead of the origin, or nullopt if the ray
// leaves the floorplan.
std::optional<Hit> intersect(const Vec3& origin, const Vec3& dir,
                             const Floorplan& plan,
                             const IntersectOptions& options = {});

}  // namespace pwe
