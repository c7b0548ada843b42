// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "pwe/raytracer.hpp"
#include "pwe/tiles.hpp"
#include "test_util.hpp"

using namespace pwe;

namespace {

Scene open_scene(double extent = 40.0) {
  Scene s;
  s.plan.bounds = Eigen::AlignedBox3d(Vec3(0, 0, 0), Vec3(extent, extent, extent));
  return s;
}

Receiver iso_rx(int id, const Vec3& pos, double radius = 0.05) {
  Receiver rx;
  rx.id = id;
  rx.position = pos;
  rx.antenna = AntennaPattern::isotropic();
  rx.capture_radius_m = radius;
  return rx;
}

Transmitter iso_tx(const Vec3& pos, double power_dbm = 0.0) {
  Transmitter tx;
  tx.position = pos;
  tx.antenna = AntennaPattern::isotropic();
  tx.power_dbm = power_dbm;
  return tx;
}

RayPath synthetic_path(int rx_id, double power_dbm, double delay_ns, double phase = 0.0) {
  RayPath p;
  p.rx_id = rx_id;
  p.power_dbm = power_dbm;
  p.delay_s = delay_ns * 1e-9;
  p.phase_rad = phase;
  return p;
}

}  // namespace

TEST_CASE("line of sight matches the Friis anchor") {
  Scene scene = open_scene();
  scene.receivers.push_back(iso_rx(0, Vec3(11, 10, 1.5)));
  const Transmitter tx = iso_tx(Vec3(1, 10, 1.5), 0.0);
  TraceParams params;
  params.carrier_freq_hz = 2.4e9;
  params.max_bounces = 0;
  params.adaptive_capture = true;
  const TraceResult res = trace(scene, tx, params);
  REQUIRE(res.paths.size() == 1);
  CHECK(res.paths[0].power_dbm == doctest::Approx(-60.05).epsilon(0.01));
  CHECK(res.paths[0].delay_s == doctest::Approx(10.0 / kSpeedOfLight).epsilon(0.01));
  CHECK(power_at(scene.receivers[0], res.paths) ==
        doctest::Approx(-60.05).epsilon(0.01));
}

TEST_CASE("occlusion yields the floor") {
  Scene scene = open_scene();
  // Full-height wall between the endpoints.
  scene.plan.surfaces.emplace_back(Vec3(5, 0, 0), Vec3(0, 20, 0), Vec3(0, 0, 40));
  scene.receivers.push_back(iso_rx(0, Vec3(9, 10, 1.5)));
  const Transmitter tx = iso_tx(Vec3(1, 10, 1.5));
  TraceParams params;
  params.max_bounces = 0;
  params.adaptive_capture = true;
  const TraceResult res = trace(scene, tx, params);
  CHECK(res.paths.empty());
  CHECK(power_at(scene.receivers[0], res.paths) == kPowerFloorDbm);
}

TEST_CASE("single steered tile produces the analytic one-bounce path") {
  Scene scene = open_scene();
  // One-tile panel on the wall plane x = 10, normal -x.
  scene.plan.panels.emplace_back(Vec3(10, 10.5, 1), Vec3(0, -1, 0), Vec3(0, 0, 1),
                                 1.0, 1, 1);
  // Blocker between tx and rx so only the tile connects them.
  scene.plan.surfaces.emplace_back(Vec3(1, 8, 0), Vec3(3, 0, 0), Vec3(0, 0, 3));
  const Vec3 tile_center(10, 10, 1.5);
  const Transmitter tx = iso_tx(Vec3(2, 10, 1.5));
  const Vec3 rx_pos(3, 6, 1.5);
  scene.receivers.push_back(iso_rx(0, rx_pos));

  const Vec3 incident = normalized(tile_center - tx.position);
  const Vec3 outgoing = normalized(rx_pos - tile_center);
  Tile tile = scene.plan.tile_at_flat(0);
  tile = apply_function(tile, TileFunction::steer(incident, outgoing));
  scene.plan.state_at_flat(0) = tile.state;

  TraceParams params;
  params.carrier_freq_hz = 2.4e9;
  params.max_bounces = 3;
  params.adaptive_capture = true;
  const TraceResult res = trace(scene, tx, params);

  std::vector<const RayPath*> rx_paths;
  for (const RayPath& p : res.paths)
    if (p.rx_id == 0) rx_paths.push_back(&p);
  REQUIRE(rx_paths.size() == 1);  // exactly one merged geometric path
  const RayPath& path = *rx_paths[0];
  REQUIRE(path.bounce_count() == 1);
  REQUIRE(path.bounce_tiles[0].has_value());
  CHECK(*path.bounce_tiles[0] == TileId{0, 0});
  CHECK((path.bounce_points[0] - tile_center).norm() < 0.2);

  const double length = (tile_center - tx.position).norm() + (rx_pos - tile_center).norm();
  CHECK(path.delay_s == doctest::Approx(length / kSpeedOfLight).epsilon(0.01));
  // Steering reflects at full coefficient: only spreading applies.
  CHECK(path.power_dbm == doctest::Approx(-fspl_db(length, 2.4e9)).epsilon(0.01));
}

TEST_CASE("absorb attenuates the specular remainder by 35 dB") {
  // Ceiling as a single tile; compare passive and absorbing bounces.
  auto build = [](bool absorb) {
    Scene scene = open_scene();
    scene.plan.panels.emplace_back(Vec3(0, 8, 3), Vec3(1, 0, 0), Vec3(0, -1, 0),
                                   8.0, 1, 1, 0, 0, 6.0);
    if (absorb) {
      Tile t = scene.plan.tile_at_flat(0);
      t = apply_function(t, TileFunction::absorb());
      scene.plan.state_at_flat(0) = t.state;
    }
    scene.receivers.push_back(iso_rx(0, Vec3(6, 4, 1)));
    return scene;
  };
  const Transmitter tx = iso_tx(Vec3(2, 4, 1), -10.0);
  TraceParams params;
  params.carrier_freq_hz = 2.4e9;
  params.max_bounces = 1;
  params.adaptive_capture = true;

  auto bounce_power = [&](const Scene& s) {
    const TraceResult res = trace(s, tx, params);
    for (const RayPath& p : res.paths)
      if (p.bounce_count() == 1) return p.power_dbm;
    return kPowerFloorDbm;
  };
  Scene passive = build(false);
  Scene absorbing = build(true);
  const double p_passive = bounce_power(passive);
  const double p_absorb = bounce_power(absorbing);
  REQUIRE(p_passive > kPowerFloorDbm);
  REQUIRE(p_absorb > kPowerFloorDbm);
  // Passive bounce loses the 6 dB wall loss, the absorber exactly 35 dB.
  CHECK(p_passive - p_absorb == doctest::Approx(35.0 - 6.0).epsilon(1e-6));

  // The absorbing tile never increases ray power.
  const TraceResult res = trace(absorbing, tx, params);
  for (const RayPath& p : res.paths) CHECK(p.power_dbm <= tx.power_dbm);
}

TEST_CASE("collimation freezes spreading over tile-to-tile segments") {
  auto run = [&](double scale) {
    const double hop = 10.0 * scale;
    Scene scene = open_scene(200.0);
    // Tile A on the wall x = 10; tile B on a wall y = 9 + hop facing -y.
    scene.plan.panels.emplace_back(Vec3(10, 9.5, 1), Vec3(0, -1, 0), Vec3(0, 0, 1),
                                   1.0, 1, 1, 0, 0);
    scene.plan.panels.emplace_back(Vec3(7.5, 9.0 + hop, 1), Vec3(1, 0, 0),
                                   Vec3(0, 0, 1), 1.0, 1, 1, 0, 1);
    const Vec3 a_center(10, 9, 1.5);
    const Vec3 b_center(8, 9 + hop, 1.5);
    const Transmitter tx = iso_tx(Vec3(2, 9, 1.5));
    const Vec3 rx_pos(2, 6 + hop, 1.5);
    scene.receivers.push_back(iso_rx(0, rx_pos, 0.05));

    Tile a = scene.plan.tile_at_flat(0);
    a = apply_function(a, TileFunction::steer(normalized(a_center - tx.position),
                                              normalized(b_center - a_center)));
    a = apply_function(a, TileFunction::collimate(), true);
    scene.plan.state_at_flat(0) = a.state;
    Tile b = scene.plan.tile_at_flat(1);
    b = apply_function(b, TileFunction::steer(normalized(b_center - a_center),
                                              normalized(rx_pos - b_center)));
    scene.plan.state_at_flat(1) = b.state;

    TraceParams params;
    params.carrier_freq_hz = 2.4e9;
    params.max_bounces = 4;
    params.launch_directions = {normalized(a_center - tx.position)};
    const TraceResult res = trace(scene, tx, params);
    REQUIRE(res.paths.size() == 1);
    CHECK(res.paths[0].collimated_since.has_value());
    return std::make_pair(res.paths[0].power_dbm, res.paths[0].delay_s);
  };

  const auto [p1, d1] = run(1.0);
  const auto [p2, d2] = run(2.0);
  // Doubling the tile-to-tile hop leaves the power unchanged but lengthens
  // the delay.
  CHECK(p1 == doctest::Approx(p2).epsilon(1e-9));
  CHECK(d2 > d1 * 1.2);
}

TEST_CASE("phase alteration accumulates into the path phase") {
  Scene scene = open_scene();
  scene.plan.panels.emplace_back(Vec3(10, 12, 0), Vec3(0, -1, 0), Vec3(0, 0, 1),
                                 4.0, 1, 1);
  Tile t = scene.plan.tile_at_flat(0);
  t = apply_function(t, TileFunction::phase_alter(kPi));
  // Phase control stacks on a specular steer.
  t = apply_function(t, TileFunction::steer_angles(0, 0), true);
  scene.plan.state_at_flat(0) = t.state;
  scene.receivers.push_back(iso_rx(0, Vec3(2, 6, 2)));
  const Transmitter tx = iso_tx(Vec3(2, 14, 2));
  TraceParams params;
  params.max_bounces = 2;
  params.adaptive_capture = true;
  const TraceResult res = trace(scene, tx, params);
  bool found = false;
  for (const RayPath& p : res.paths) {
    if (p.bounce_count() == 1) {
      CHECK(p.phase_rad == doctest::Approx(kPi).epsilon(1e-9));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("blocking spheres terminate paths unless transparent") {
  Scene scene = open_scene();
  scene.receivers.push_back(iso_rx(0, Vec3(11, 10, 1.5)));
  const Transmitter tx = iso_tx(Vec3(1, 10, 1.5));
  TraceParams params;
  params.max_bounces = 0;
  params.adaptive_capture = true;

  scene.plan.bodies.emplace_back(Vec3(6, 10, 1.5), 0.5, false);
  CHECK(trace(scene, tx, params).paths.empty());

  scene.plan.bodies[0].transparent = true;
  CHECK(trace(scene, tx, params).paths.size() == 1);
}

TEST_CASE("devices are not blocked by their own body spheres") {
  Scene scene = open_scene();
  scene.receivers.push_back(iso_rx(0, Vec3(11, 10, 1.5)));
  scene.plan.bodies.emplace_back(Vec3(1, 10, 1.5), 0.5, false);   // tx body
  scene.plan.bodies.emplace_back(Vec3(11, 10, 1.5), 0.5, false);  // rx body
  const Transmitter tx = iso_tx(Vec3(1, 10, 1.5));
  TraceParams params;
  params.max_bounces = 0;
  params.adaptive_capture = true;
  const TraceResult res = trace(scene, tx, params);
  REQUIRE(res.paths.size() == 1);
  // The capture happens on the chord through the receiver's own sphere.
  CHECK(res.paths[0].power_dbm == doctest::Approx(-60.05).epsilon(0.01));
}

TEST_CASE("trace respects bounce and floor limits") {
  Scene scene = open_scene(12.0);
  // Closed box to force long bounce chains.
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 0), Vec3(12, 0, 0), Vec3(0, 12, 0));
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 3), Vec3(0, 12, 0), Vec3(12, 0, 0));
  scene.plan.surfaces.emplace_back(Vec3(12, 0, 0), Vec3(-12, 0, 0), Vec3(0, 0, 3));
  scene.plan.surfaces.emplace_back(Vec3(0, 12, 0), Vec3(12, 0, 0), Vec3(0, 0, 3));
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 0), Vec3(0, 12, 0), Vec3(0, 0, 3));
  scene.plan.surfaces.emplace_back(Vec3(12, 12, 0), Vec3(0, -12, 0), Vec3(0, 0, 3));
  scene.receivers.push_back(iso_rx(0, Vec3(9, 9, 1.5), 0.3));
  const Transmitter tx = iso_tx(Vec3(2, 2, 1.5), 0.0);
  TraceParams params;
  params.max_bounces = 5;
  params.power_floor_dbm = -95.0;
  params.angular_resolution_deg = 3.0;
  params.adaptive_capture = true;
  const TraceResult res = trace(scene, tx, params);
  REQUIRE(!res.paths.empty());
  for (const RayPath& p : res.paths) {
    CHECK(p.bounce_count() <= 5);
    CHECK(p.power_dbm >= -95.0);
  }
}

TEST_CASE("energy is non-increasing along a path") {
  Scene scene = open_scene(12.0);
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 0), Vec3(12, 0, 0), Vec3(0, 12, 0));
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 3), Vec3(0, 12, 0), Vec3(12, 0, 0));
  scene.plan.surfaces.emplace_back(Vec3(0, 12, 0), Vec3(12, 0, 0), Vec3(0, 0, 3));
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 0), Vec3(0, 12, 0), Vec3(0, 0, 3));
  scene.receivers.push_back(iso_rx(0, Vec3(9, 9, 1.5), 0.3));
  const Transmitter tx = iso_tx(Vec3(2, 2, 1.5));
  TraceParams params;
  params.max_bounces = 6;
  params.power_floor_dbm = -150.0;
  params.angular_resolution_deg = 3.0;
  params.adaptive_capture = true;
  params.record_bounce_powers = true;
  const TraceResult res = trace(scene, tx, params);
  REQUIRE(!res.paths.empty());
  for (const RayPath& p : res.paths) {
    for (size_t b = 1; b < p.bounce_impinging_dbm.size(); ++b)
      CHECK(p.bounce_impinging_dbm[b] <= p.bounce_impinging_dbm[b - 1] + 1e-9);
    if (!p.bounce_impinging_dbm.empty())
      CHECK(p.power_dbm <= p.bounce_impinging_dbm.back() + 1e-9);
  }
}

TEST_CASE("trace is deterministic and thread-count independent") {
  Scene scene = open_scene(12.0);
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 0), Vec3(12, 0, 0), Vec3(0, 12, 0));
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 3), Vec3(0, 12, 0), Vec3(12, 0, 0));
  scene.plan.panels.emplace_back(Vec3(0, 12, 0), Vec3(1, 0, 0), Vec3(0, 0, 1), 1.0, 3, 12);
  scene.receivers.push_back(iso_rx(0, Vec3(9, 9, 1.5), 0.2));
  scene.receivers.push_back(iso_rx(1, Vec3(4, 8, 1.0), 0.2));
  const Transmitter tx = iso_tx(Vec3(2, 2, 1.5));
  TraceParams params;
  params.max_bounces = 6;
  params.power_floor_dbm = -140.0;
  params.angular_resolution_deg = 2.0;
  params.adaptive_capture = true;

  params.n_threads = 1;
  const TraceResult a = trace(scene, tx, params);
  params.n_threads = 2;
  const TraceResult b = trace(scene, tx, params);
  const TraceResult c = trace(scene, tx, params);

  auto same = [](const TraceResult& x, const TraceResult& y) {
    if (x.paths.size() != y.paths.size()) return false;
    for (size_t i = 0; i < x.paths.size(); ++i) {
      const RayPath& p = x.paths[i];
      const RayPath& q = y.paths[i];
      if (p.rx_id != q.rx_id || p.launch_index != q.launch_index) return false;
      if (p.power_dbm != q.power_dbm || p.delay_s != q.delay_s) return false;
    }
    return true;
  };
  CHECK(same(a, b));
  CHECK(same(b, c));
}

TEST_CASE("reciprocity of path length multisets on a specular box") {
  Scene scene = open_scene(8.0);
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 0), Vec3(8, 0, 0), Vec3(0, 8, 0));
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 3), Vec3(0, 8, 0), Vec3(8, 0, 0));
  scene.plan.surfaces.emplace_back(Vec3(8, 0, 0), Vec3(-8, 0, 0), Vec3(0, 0, 3));
  scene.plan.surfaces.emplace_back(Vec3(0, 8, 0), Vec3(8, 0, 0), Vec3(0, 0, 3));
  scene.plan.surfaces.emplace_back(Vec3(0, 0, 0), Vec3(0, 8, 0), Vec3(0, 0, 3));
  scene.plan.surfaces.emplace_back(Vec3(8, 8, 0), Vec3(0, -8, 0), Vec3(0, 0, 3));
  const Vec3 a(2, 4, 1.5), b(6, 4, 1.5);

  auto delays = [&](const Vec3& from, const Vec3& to) {
    Scene s = scene;
    s.receivers.push_back(iso_rx(0, to, 0.05));
    TraceParams params;
    params.max_bounces = 2;
    params.power_floor_dbm = -120.0;
    params.angular_resolution_deg = 0.5;
    params.adaptive_capture = true;
    const TraceResult res = trace(s, iso_tx(from), params);
    std::vector<long> bins;
    for (const RayPath& p : res.paths)
      bins.push_back(std::lround(p.delay_s * 1e9 / 0.05));
    std::sort(bins.begin(), bins.end());
    return bins;
  };
  CHECK(delays(a, b) == delays(b, a));
}

TEST_CASE("power_at on synthetic paths") {
  Receiver rx = iso_rx(0, Vec3::Zero());
  CHECK(power_at(rx, {}) == kPowerFloorDbm);
  std::vector<RayPath> one{synthetic_path(0, -83.0, 10)};
  CHECK(power_at(rx, one) == -83.0);
  std::vector<RayPath> two{synthetic_path(0, -50.0, 10), synthetic_path(0, -50.0, 12)};
  CHECK(power_at(rx, two) == doctest::Approx(-46.99).epsilon(1e-4));
  std::vector<RayPath> other{synthetic_path(1, -20.0, 10)};
  CHECK(power_at(rx, other) == kPowerFloorDbm);
}

TEST_CASE("pdp and modulo-period folding") {
  Receiver rx = iso_rx(0, Vec3::Zero());
  std::vector<RayPath> paths{synthetic_path(0, -40.0, 5.0),
                             synthetic_path(0, -42.0, 1.0)};
  const PowerDelayProfile pdp = pdp_at(rx, paths);
  REQUIRE(pdp.entries.size() == 2);
  CHECK(pdp.entries[0].delay_s < pdp.entries[1].delay_s);

  // Delay gap of one carrier period plus 0.1 ns folds to 0.1 ns.
  const double period_ns = 1e9 / 2.4e9;
  std::vector<RayPath> folded{synthetic_path(0, -40.0, 0.0),
                              synthetic_path(0, -41.0, period_ns + 0.1)};
  const auto mods = pdp_delays_mod_period(pdp_at(rx, folded), 2.4e9);
  REQUIRE(mods.size() == 2);
  CHECK(mods[0] == 0.0);
  CHECK(mods[1] * 1e9 == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("delay spread definition") {
  Receiver rx = iso_rx(0, Vec3::Zero());
  CHECK(delay_spread(rx, {synthetic_path(0, -50, 10)}) == 0.0);
  std::vector<RayPath> three{synthetic_path(0, -50, 10), synthetic_path(0, -50, 12),
                             synthetic_path(0, -50, 13.6)};
  CHECK(delay_spread(rx, three) * 1e9 == doctest::Approx(3.6).epsilon(1e-9));
  // A path 40 dB below the strongest is outside the 30 dB gate.
  std::vector<RayPath> gated{synthetic_path(0, -50, 10), synthetic_path(0, -52, 12),
                             synthetic_path(0, -90, 50)};
  CHECK(delay_spread(rx, gated) * 1e9 == doctest::Approx(2.0).epsilon(1e-9));
}
