// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <cmath>
#include <optional>
#include <random>

#include "pwe/geometry.hpp"
#include "pwe/raytracer.hpp"
#include "pwe/tiles.hpp"
#include "pwe/types.hpp"

namespace pwe::test {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vec3 v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-6) return v / v.norm();
  }
}

inline Vec3 random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vec3(u(rng), u(rng), u(rng));
}

// Independent nearest-hit oracle: tests every rectangle via the plane
// equation and in-plane projections, every sphere via the quadratic, and
// keeps the smallest parameter. Written apart from pwe::intersect on
// purpose; both must agree on nearest hits.
inline std::optional<double> oracle_nearest_distance(const Floorplan& plan,
                                                     const Vec3& o, const Vec3& d) {
  std::optional<double> best;
  auto consider = [&](double t) {
    if (t > 1e-6 && (!best || t < *best)) best = t;
  };

  auto check_rect = [&](const Vec3& r0, const Vec3& eu, const Vec3& ev) {
    const Vec3 n = eu.cross(ev);
    const double denom = d.dot(n);
    if (std::abs(denom) < 1e-12) return;
    const double t = (r0 - o).dot(n) / denom;
    if (t <= 1e-6) return;
    const Vec3 rel = o + t * d - r0;
    const double uu = rel.dot(eu) / eu.squaredNorm();
    const double vv = rel.dot(ev) / ev.squaredNorm();
    if (uu >= 0.0 && uu <= 1.0 && vv >= 0.0 && vv <= 1.0) consider(t);
  };

  for (const RectSurface& s : plan.surfaces) check_rect(s.origin, s.edge_u, s.edge_v);
  for (const TilePanel& p : plan.panels)
    check_rect(p.origin, p.cols * p.tile_side * p.u_dir, p.rows * p.tile_side * p.v_dir);
  for (const BlockingSphere& b : plan.bodies) {
    const Vec3 oc = o - b.center;
    const double bq = oc.dot(d);
    const double cq = oc.squaredNorm() - b.radius * b.radius;
    const double disc = bq * bq - cq;
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    consider(-bq - sq);
    consider(-bq + sq);
  }
  return best;
}

struct ToyScene {
  Scene scene;
  Transmitter tx;
};

// One wall tile plus a line-of-sight blocker, laid out so that exactly
// repertoire configuration 7 (azimuth -15, elevation 0) steers the beam onto
// the receiver: only genome {7} connects it.
inline ToyScene make_one_tile_scene() {
  ToyScene toy;
  Scene& scene = toy.scene;
  scene.plan.bounds = Eigen::AlignedBox3d(Vec3(-5, -5, -5), Vec3(25, 25, 10));
  // Tile on the wall x = 10, facing -x.
  scene.plan.panels.emplace_back(Vec3(10, 10.5, 1), Vec3(0, -1, 0), Vec3(0, 0, 1),
                                 1.0, 1, 1);
  toy.tx.position = Vec3(2, 10, 1.5);
  toy.tx.antenna = AntennaPattern::isotropic();
  toy.tx.power_dbm = 0.0;

  // Receiver on the axis reflected by configuration 7.
  const Vec3 tile_center(10, 10, 1.5);
  Tile tile = scene.plan.tile_at_flat(0);
  const auto repertoire = enumerate_repertoire();
  tile = apply_function(tile, repertoire[7]);
  const Vec3 incident = normalized(tile_center - toy.tx.position);
  const Vec3 outgoing = reflect(incident, tile.state.virtual_normal);
  Receiver rx;
  rx.id = 0;
  rx.position = tile_center + 4.0 * outgoing;
  rx.antenna = AntennaPattern::isotropic();
  rx.capture_radius_m = 0.05;
  scene.receivers.push_back(rx);

  // Blocker across the direct tx-rx segment only.
  const Vec3 mid = 0.5 * (toy.tx.position + rx.position);
  scene.plan.surfaces.emplace_back(Vec3(mid.x(), mid.y() - 0.8, 0), Vec3(0, 1.6, 0),
                                   Vec3(0, 0, 3));
  return toy;
}

inline TraceParams toy_trace_params() {
  TraceParams params;
  params.carrier_freq_hz = 2.4e9;
  params.max_bounces = 2;
  params.power_floor_dbm = -150.0;
  params.angular_resolution_deg = 1.5;
  params.adaptive_capture = true;
  return params;
}

// Two tiles: the one-tile layout plus a distant second tile whose strongest
// contribution stays under half a dB, so every genome with the first gene
// optimal is near-optimal.
inline ToyScene make_two_tile_scene() {
  ToyScene toy = make_one_tile_scene();
  toy.scene.plan.panels.emplace_back(Vec3(24.5, 20, 1), Vec3(-1, 0, 0), Vec3(0, 0, 1),
                                     1.0, 1, 1, 0, 1);
  return toy;
}

}  // namespace pwe::test
