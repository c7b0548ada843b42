// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/geometry.hpp"

#include <cmath>

namespace pwe {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonpositiveInput: return "NONPOSITIVE_INPUT";
    case ErrorCode::kForwardDirection: return "FORWARD_DIRECTION";
    case ErrorCode::kEmptyTable: return "EMPTY_TABLE";
    case ErrorCode::kNotSteer: return "NOT_STEER";
    case ErrorCode::kInvalidScene: return "INVALID_SCENE";
    case ErrorCode::kNoLosTiles: return "NO_LOS_TILES";
    case ErrorCode::kNoPath: return "NO_PATH";
    case ErrorCode::kNoCommonPaths: return "NO_COMMON_PATHS";
    case ErrorCode::kNoSuchTile: return "NO_SUCH_TILE";
    case ErrorCode::kUnreachable: return "UNREACHABLE";
    case ErrorCode::kBadParameters: return "BAD_PARAMETERS";
    case ErrorCode::kZeroVector: return "ZERO_VECTOR";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

RectSurface::RectSurface(const Vec3& origin_, const Vec3& edge_u_,
                         const Vec3& edge_v_, Material material_)
    : origin(origin_), edge_u(edge_u_), edge_v(edge_v_), material(material_) {
  if (edge_u.norm() < 1e-12 || edge_v.norm() < 1e-12)
    throw Error(ErrorCode::kInvalidArgument, "degenerate surface edge");
  if (std::abs(normalized(edge_u).dot(normalized(edge_v))) > 1e-9)
    throw Error(ErrorCode::kInvalidArgument, "surface edges not orthogonal");
}

TilePanel::TilePanel(const Vec3& origin_, const Vec3& u_dir_, const Vec3& v_dir_,
                     double tile_side_, int rows_, int cols_, int row_offset_,
                     int col_offset_, double passive_loss_db_)
    : origin(origin_),
      u_dir(normalized(u_dir_)),
      v_dir(normalized(v_dir_)),
      tile_side(tile_side_),
      rows(rows_),
      cols(cols_),
      row_offset(row_offset_),
      col_offset(col_offset_),
      passive_loss_db(passive_loss_db_) {
  if (rows <= 0 || cols <= 0 || tile_side <= 0.0)
    throw Error(ErrorCode::kInvalidArgument, "bad tile panel dimensions");
  if (std::abs(u_dir.dot(v_dir)) > 1e-9)
    throw Error(ErrorCode::kInvalidArgument, "panel axes not orthogonal");
  TileState init;
  init.virtual_normal = normal();
  states.assign(static_cast<size_t>(rows) * cols, init);
}

BlockingSphere::BlockingSphere(const Vec3& center_, double radius_,
                               bool transparent_)
    : center(center_), radius(radius_), transparent(transparent_) {
  if (radius <= 0.0)
    throw Error(ErrorCode::kInvalidArgument, "sphere radius must be positive");
}

int Floorplan::tile_count() const {
  int n = 0;
  for (const auto& p : panels) n += p.tile_count();
  return n;
}

Tile Floorplan::tile_at_flat(int flat_index) const {
  int base = 0;
  for (const auto& p : panels) {
    if (flat_index < base + p.tile_count()) {
      int local = flat_index - base;
      int r = local / p.cols;
      int c = local % p.cols;
      Tile t;
      t.id = p.id_at(r, c);
      t.center = p.tile_center(r, c);
      t.geometric_normal = p.normal();
      t.u_dir = p.u_dir;
      t.v_dir = p.v_dir;
      t.side = p.tile_side;
      t.state = p.state_at(r, c);
      return t;
    }
    base += p.tile_count();
  }
  throw Error(ErrorCode::kNoSuchTile, "flat tile index out of range");
}

TileState& Floorplan::state_at_flat(int flat_index) {
  int base = 0;
  for (auto& p : panels) {
    if (flat_index < base + p.tile_count()) {
      int local = flat_index - base;
      return p.state_at(local / p.cols, local % p.cols);
    }
    base += p.tile_count();
  }
  throw Error(ErrorCode::kNoSuchTile, "flat tile index out of range");
}

const TileState& Floorplan::state_at_flat(int flat_index) const {
  return const_cast<Floorplan*>(this)->state_at_flat(flat_index);
}

std::optional<int> Floorplan::flat_index_of(TileId id) const {
  int base = 0;
  for (const auto& p : panels) {
    int r = id.row - p.row_offset;
    int c = id.col - p.col_offset;
    if (r >= 0 && r < p.rows && c >= 0 && c < p.cols) return base + r * p.cols + c;
    base += p.tile_count();
  }
  return std::nullopt;
}

std::vector<TileId> Floorplan::all_tile_ids() const {
  std::vector<TileId> out;
  out.reserve(static_cast<size_t>(tile_count()));
  for (const auto& p : panels)
    for (int r = 0; r < p.rows; ++r)
      for (int c = 0; c < p.cols; ++c) out.push_back(p.id_at(r, c));
  return out;
}

Vec3 reflect(const Vec3& dir, const Vec3& normal) {
  return dir - 2.0 * dir.dot(normal) * normal;
}

Vec3 virtual_normal(const Vec3& incident, const Vec3& outgoing) {
  Vec3 diff = outgoing - incident;
  if (diff.norm() < 1e-9) {
    throw Error(ErrorCode::kForwardDirection,
                "outgoing equals incident; no mirror normal exists");
  }
  return normalized(diff);
}

TileAxes tile_rotation_axes(const Tile& tile) {
  const Vec3 n = tile.geometric_normal;
  // World z projected onto the tile plane; for horizontal tiles (ceiling,
  // floor) that projection vanishes and the panel's v axis stands in.
  Vec3 vertical = Vec3::UnitZ() - Vec3::UnitZ().dot(n) * n;
  if (vertical.norm() < 1e-9) vertical = tile.v_dir;
  vertical = normalized(vertical);
  Vec3 horizontal = normalized(vertical.cross(n));
  return TileAxes{vertical, horizontal};
}

Vec3 steer_normal_from_angles(const Tile& tile, double azimuth_deg,
                              double elevation_deg) {
  const TileAxes axes = tile_rotation_axes(tile);
  Eigen::AngleAxisd az(deg2rad(azimuth_deg), axes.vertical);
  Eigen::AngleAxisd el(deg2rad(elevation_deg), axes.horizontal);
  return normalized(el * (az * tile.geometric_normal));
}

namespace {

// Ray vs rectangle spanned by (origin, u_len * u_dir, v_len * v_dir).
// Returns the ray parameter and the in-plane coordinates.
inline bool ray_rect(const Vec3& o, const Vec3& d, const Vec3& r0,
                     const Vec3& u_dir, const Vec3& v_dir, const Vec3& n,
                     double u_len, double v_len, double min_t, double* t_out,
                     double* u_out, double* v_out) {
  const double denom = d.dot(n);
  if (std::abs(denom) < 1e-12) return false;
  const double t = (r0 - o).dot(n) / denom;
  if (t <= min_t) return false;
  const Vec3 p = o + t * d;
  const Vec3 rel = p - r0;
  const double u = rel.dot(u_dir);
  if (u < 0.0 || u > u_len) return false;
  const double v = rel.dot(v_dir);
  if (v < 0.0 || v > v_len) return false;
  *t_out = t;
  *u_out = u;
  *v_out = v;
  return true;
}

}  // namespace

std::optional<Hit> intersect(const Vec3& origin, const Vec3& dir,
                             const Floorplan& plan,
                             const IntersectOptions& options) {
  std::optional<Hit> best;
  const double min_t = options.min_distance;

  double t, u, v;
  for (size_t i = 0; i < plan.surfaces.size(); ++i) {
    const RectSurface& s = plan.surfaces[i];
    const Vec3 u_dir = normalized(s.edge_u);
    const Vec3 v_dir = normalized(s.edge_v);
    const Vec3 n = u_dir.cross(v_dir);
    if (ray_rect(origin, dir, s.origin, u_dir, v_dir, n, s.edge_u.norm(),
                 s.edge_v.norm(), min_t, &t, &u, &v)) {
      if (!best || t < best->distance) {
        best = Hit{t, origin + t * dir, HitKind::kSurface, static_cast<int>(i), 0, 0};
      }
    }
  }

  for (size_t i = 0; i < plan.panels.size(); ++i) {
    const TilePanel& p = plan.panels[i];
    const Vec3 n = p.normal();
    const double u_len = p.cols * p.tile_side;
    const double v_len = p.rows * p.tile_side;
    if (ray_rect(origin, dir, p.origin, p.u_dir, p.v_dir, n, u_len, v_len,
                 min_t, &t, &u, &v)) {
      if (!best || t < best->distance) {
        int c = std::min(p.cols - 1, static_cast<int>(u / p.tile_side));
        int r = std::min(p.rows - 1, static_cast<int>(v / p.tile_side));
        best = Hit{t, origin + t * dir, HitKind::kTile, static_cast<int>(i), r, c};
      }
    }
  }

  for (size_t i = 0; i < plan.bodies.size(); ++i) {
    const BlockingSphere& b = plan.bodies[i];
    const Vec3 oc = origin - b.center;
    const bool inside = oc.norm() < b.radius;
    if (inside && options.skip_bodies_containing_origin) continue;
    const double half_b = oc.dot(dir);
    const double c_term = oc.squaredNorm() - b.radius * b.radius;
    const double disc = half_b * half_b - c_term;
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    double t_hit = -half_b - sq;
    if (t_hit <= min_t) t_hit = -half_b + sq;
    if (t_hit <= min_t) continue;
    if (!best || t_hit < best->distance) {
      best = Hit{t_hit, origin + t_hit * dir, HitKind::kBody, static_cast<int>(i), 0, 0};
    }
  }

  return best;
}

}  // namespace pwe
