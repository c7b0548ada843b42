// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/scenario.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pwe {

using nlohmann::json;

AntennaPattern AntennaSpec::build() const {
  if (kind == "isotropic") return AntennaPattern::isotropic();
  if (kind == "half-dipole") return AntennaPattern::half_dipole(boresight);
  if (kind == "single-lobe")
    return AntennaPattern::single_lobe(boresight, half_power_angle_deg);
  throw Error(ErrorCode::kInvalidArgument, "unknown antenna kind '" + kind + "'");
}

namespace {

void add_box_shell(Floorplan* plan, double sx, double sy, double h) {
  // Floor and ceiling with inward normals.
  plan->surfaces.emplace_back(Vec3(0, 0, 0), Vec3(sx, 0, 0), Vec3(0, sy, 0),
                              Material::kPlainConcrete);
  plan->surfaces.emplace_back(Vec3(0, 0, h), Vec3(0, sy, 0), Vec3(sx, 0, 0),
                              Material::kPlainConcrete);
}

void add_plain_walls(Floorplan* plan, double sx, double sy, double z0, double z1) {
  const double dz = z1 - z0;
  if (dz <= 0.0) return;
  plan->surfaces.emplace_back(Vec3(sx, 0, z0), Vec3(-sx, 0, 0), Vec3(0, 0, dz),
                              Material::kPlainConcrete);  // y = 0, normal +y
  plan->surfaces.emplace_back(Vec3(0, sy, z0), Vec3(sx, 0, 0), Vec3(0, 0, dz),
                              Material::kPlainConcrete);  // y = sy, normal -y
  plan->surfaces.emplace_back(Vec3(0, 0, z0), Vec3(0, sy, 0), Vec3(0, 0, dz),
                              Material::kPlainConcrete);  // x = 0, normal +x
  plan->surfaces.emplace_back(Vec3(sx, sy, z0), Vec3(0, -sy, 0), Vec3(0, 0, dz),
                              Material::kPlainConcrete);  // x = sx, normal -x
}

Floorplan build_corridor(const FloorplanSpec& spec) {
  Floorplan plan;
  const double sx = spec.size_x;
  const double sy = spec.size_y;
  const double h = spec.height;
  const double side = spec.tile_side;
  const double loss = spec.wall_passive_loss_db;
  const int rows = static_cast<int>(std::lround(h / side));

  add_box_shell(&plan, sx, sy, h);

  // Outer walls, tiled full height, addresses forming one ring of columns.
  int col = 0;
  auto wall_cols = [&](double len) { return static_cast<int>(std::lround(len / side)); };
  // x = 0 wall, normal +x, columns along +y.
  plan.panels.emplace_back(Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), side, rows,
                           wall_cols(sy), 0, col, loss);
  col += wall_cols(sy);
  // y = sy wall, normal -y, columns along +x.
  plan.panels.emplace_back(Vec3(0, sy, 0), Vec3(1, 0, 0), Vec3(0, 0, 1), side, rows,
                           wall_cols(sx), 0, col, loss);
  col += wall_cols(sx);
  // x = sx wall, normal -x, columns along -y.
  plan.panels.emplace_back(Vec3(sx, sy, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), side, rows,
                           wall_cols(sy), 0, col, loss);
  col += wall_cols(sy);
  // y = 0 wall, normal +y, columns along -x.
  plan.panels.emplace_back(Vec3(sx, 0, 0), Vec3(-1, 0, 0), Vec3(0, 0, 1), side, rows,
                           wall_cols(sx), 0, col, loss);
  col += wall_cols(sx);

  // Middle wall slab: both long faces tiled, short ends plain.
  const double x0 = spec.middle_wall_center_x - 0.5 * spec.middle_wall_thickness;
  const double x1 = spec.middle_wall_center_x + 0.5 * spec.middle_wall_thickness;
  const double y0 = spec.middle_wall_center_y - 0.5 * spec.middle_wall_length;
  const double y1 = spec.middle_wall_center_y + 0.5 * spec.middle_wall_length;
  const int wall_len = wall_cols(spec.middle_wall_length);
  // Face toward x < x0, normal -x, columns along -y.
  plan.panels.emplace_back(Vec3(x0, y1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), side, rows,
                           wall_len, 0, col, loss);
  col += wall_len;
  // Face toward x > x1, normal +x, columns along +y.
  plan.panels.emplace_back(Vec3(x1, y0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), side, rows,
                           wall_len, 0, col, loss);
  col += wall_len;
  // Untiled short ends.
  plan.surfaces.emplace_back(Vec3(x0, y0, 0), Vec3(x1 - x0, 0, 0), Vec3(0, 0, h),
                             Material::kPlainConcrete);  // y = y0 end, normal -y
  plan.surfaces.emplace_back(Vec3(x1, y1, 0), Vec3(-(x1 - x0), 0, 0), Vec3(0, 0, h),
                             Material::kPlainConcrete);  // y = y1 end, normal +y

  plan.bounds = Eigen::AlignedBox3d(Vec3(0, 0, 0), Vec3(sx, sy, h));
  return plan;
}

Floorplan build_security_room(const FloorplanSpec& spec) {
  Floorplan plan;
  const double sx = spec.size_x;
  const double sy = spec.size_y;
  const double h = spec.height;
  const double side = spec.tile_side;
  const double loss = spec.wall_passive_loss_db;
  const double z_lo = spec.tile_min_z;

  // Plain floor.
  plan.surfaces.emplace_back(Vec3(0, 0, 0), Vec3(sx, 0, 0), Vec3(0, sy, 0),
                             Material::kPlainConcrete);
  // Plain lower wall bands.
  add_plain_walls(&plan, sx, sy, 0.0, z_lo);

  const int cx = static_cast<int>(std::lround(sx / side));
  const int cy = static_cast<int>(std::lround(sy / side));
  const int wall_rows = static_cast<int>(std::lround((h - z_lo) / side));

  // Tiled ceiling, normal -z; rows advance along +x so addresses stay unique.
  plan.panels.emplace_back(Vec3(0, 0, h), Vec3(0, 1, 0), Vec3(1, 0, 0), side, cx, cy,
                           0, 0, loss);
  int row = cx;
  // Upper wall strips, inward normals.
  plan.panels.emplace_back(Vec3(sx, 0, z_lo), Vec3(-1, 0, 0), Vec3(0, 0, 1), side,
                           wall_rows, cx, row, 0, loss);  // y = 0, +y
  row += wall_rows;
  plan.panels.emplace_back(Vec3(sx, sy, z_lo), Vec3(0, -1, 0), Vec3(0, 0, 1), side,
                           wall_rows, cy, row, 0, loss);  // x = sx, -x
  row += wall_rows;
  plan.panels.emplace_back(Vec3(0, sy, z_lo), Vec3(1, 0, 0), Vec3(0, 0, 1), side,
                           wall_rows, cx, row, 0, loss);  // y = sy, -y
  row += wall_rows;
  plan.panels.emplace_back(Vec3(0, 0, z_lo), Vec3(0, 1, 0), Vec3(0, 0, 1), side,
                           wall_rows, cy, row, 0, loss);  // x = 0, +x

  plan.bounds = Eigen::AlignedBox3d(Vec3(0, 0, 0), Vec3(sx, sy, h));
  return plan;
}

Floorplan build_box(const FloorplanSpec& spec) {
  Floorplan plan;
  const double sx = spec.size_x;
  const double sy = spec.size_y;
  const double h = spec.height;
  add_box_shell(&plan, sx, sy, h);
  if (spec.tile_coverage == "walls") {
    const double side = spec.tile_side;
    const int rows = static_cast<int>(std::lround(h / side));
    int col = 0;
    auto ncols = [&](double len) { return static_cast<int>(std::lround(len / side)); };
    plan.panels.emplace_back(Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), side, rows,
                             ncols(sy), 0, col, spec.wall_passive_loss_db);
    col += ncols(sy);
    plan.panels.emplace_back(Vec3(0, sy, 0), Vec3(1, 0, 0), Vec3(0, 0, 1), side, rows,
                             ncols(sx), 0, col, spec.wall_passive_loss_db);
    col += ncols(sx);
    plan.panels.emplace_back(Vec3(sx, sy, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), side, rows,
                             ncols(sy), 0, col, spec.wall_passive_loss_db);
    col += ncols(sy);
    plan.panels.emplace_back(Vec3(sx, 0, 0), Vec3(-1, 0, 0), Vec3(0, 0, 1), side, rows,
                             ncols(sx), 0, col, spec.wall_passive_loss_db);
  } else {
    add_plain_walls(&plan, sx, sy, 0.0, h);
  }
  plan.bounds = Eigen::AlignedBox3d(Vec3(0, 0, 0), Vec3(sx, sy, h));
  return plan;
}

}  // namespace

Floorplan build_floorplan(const FloorplanSpec& spec) {
  if (spec.kind == "corridor") return build_corridor(spec);
  if (spec.kind == "security-room") return build_security_room(spec);
  if (spec.kind == "box") return build_box(spec);
  throw Error(ErrorCode::kInvalidArgument, "unknown floorplan kind '" + spec.kind + "'");
}

Scene build_scene(const Scenario& scenario) {
  Scene scene;
  scene.plan = build_floorplan(scenario.floorplan);
  for (const BodySpec& b : scenario.bodies)
    scene.plan.bodies.emplace_back(b.center, b.radius, b.transparent);
  for (const ReceiverSpec& r : scenario.receivers) {
    Receiver rx;
    rx.id = r.id;
    rx.position = r.position;
    rx.antenna = r.antenna.build();
    rx.capture_radius_m = r.capture_radius_m;
    scene.receivers.push_back(rx);
  }
  return scene;
}

Transmitter build_transmitter(const Scenario& scenario) {
  Transmitter tx;
  tx.position = scenario.tx.position;
  tx.antenna = scenario.tx.antenna.build();
  tx.power_dbm = scenario.tx.power_dbm;
  return tx;
}

TraceParams build_trace_params(const Scenario& scenario) {
  TraceParams p;
  p.max_bounces = scenario.trace.max_bounces;
  p.power_floor_dbm = scenario.trace.power_floor_dbm;
  p.angular_resolution_deg = scenario.trace.angular_resolution_deg;
  p.carrier_freq_hz = scenario.frequency_hz;
  p.tile_bounce_loss_fraction = scenario.trace.tile_bounce_loss_fraction;
  p.wall_reflection_loss_db = scenario.trace.wall_reflection_loss_db;
  p.adaptive_capture = scenario.trace.adaptive_capture;
  return p;
}

Scenario make_corridor_scenario(double frequency_hz) {
  Scenario s;
  s.name = frequency_hz >= 1e10 ? "corridor-60ghz" : "corridor-2.4ghz";
  s.frequency_hz = frequency_hz;
  s.bandwidth_hz = 25e6;
  s.floorplan.kind = "corridor";
  s.floorplan.size_x = 10.0;
  s.floorplan.size_y = 15.0;
  s.floorplan.height = 3.0;
  s.floorplan.tile_side = 1.0;
  s.floorplan.tile_coverage = "walls";

  s.tx.position = Vec3(7, 12, 2);
  s.tx.antenna.kind = "half-dipole";
  s.tx.antenna.boresight = Vec3::UnitZ();
  s.tx.power_dbm = 100.0;

  // 2x6 receiver grid, 2.5 m spacing, centered in the NLOS strip
  // x in [0, 4], y in [0, 15] at z = 1.5.
  int id = 0;
  for (int iy = 0; iy < 6; ++iy) {
    for (int ix = 0; ix < 2; ++ix) {
      ReceiverSpec r;
      r.id = id++;
      r.position = Vec3(0.75 + 2.5 * ix, 1.25 + 2.5 * iy, 1.5);
      r.antenna.kind = "half-dipole";
      r.antenna.boresight = Vec3::UnitZ();
      r.capture_radius_m = 0.05;
      s.receivers.push_back(r);
    }
  }

  // Reflection depth 6 reproduces the study's plain-setup phenomenology
  // (disconnected NLOS receivers, nanosecond-scale delay spreads); deeper
  // tracing floods the corridor through the end gaps.
  s.trace.max_bounces = 6;
  s.trace.power_floor_dbm = kPowerFloorDbm;
  s.trace.angular_resolution_deg = 1.0;
  s.trace.tile_bounce_loss_fraction = 0.0;
  s.trace.wall_reflection_loss_db = 6.0;

  s.objective.kind = "case-a";
  s.objective.power_threshold_dbm = frequency_hz >= 1e10 ? 1.0 : 30.0;
  s.seed = 1;
  return s;
}

Scenario make_security_scenario() {
  Scenario s;
  s.name = "security-room";
  s.frequency_hz = 2.4e9;
  s.bandwidth_hz = 25e6;
  s.floorplan.kind = "security-room";
  s.floorplan.size_x = 20.25;
  s.floorplan.size_y = 8.25;
  s.floorplan.height = 3.0;
  s.floorplan.tile_side = 0.75;
  s.floorplan.tile_coverage = "ceiling-upper-walls";
  s.floorplan.tile_min_z = 1.5;

  s.tx.position = Vec3(2.5, 1, 1);
  s.tx.antenna.kind = "single-lobe";
  s.tx.antenna.boresight = Vec3::UnitY();  // natural-propagation pose
  s.tx.antenna.half_power_angle_deg = 30.0;
  s.tx.power_dbm = -30.0;

  ReceiverSpec intended;
  intended.id = 0;
  intended.position = Vec3(17.5, 1, 1);
  intended.antenna.kind = "single-lobe";
  intended.antenna.boresight = Vec3::UnitY();
  intended.antenna.half_power_angle_deg = 30.0;
  intended.capture_radius_m = 0.3;
  s.receivers.push_back(intended);

  ReceiverSpec eve;
  eve.id = 1;
  eve.position = Vec3(10, 7, 1);
  eve.antenna.kind = "isotropic";
  eve.capture_radius_m = 0.3;
  eve.eavesdropper = true;
  s.receivers.push_back(eve);

  s.bodies.push_back(BodySpec{Vec3(2.5, 1, 1), 0.5, false});
  s.bodies.push_back(BodySpec{Vec3(17.5, 1, 1), 0.5, false});
  s.bodies.push_back(BodySpec{Vec3(10, 7, 1), 0.5, true});  // rays pass the eavesdropper

  s.trace.max_bounces = 50;
  s.trace.power_floor_dbm = kPowerFloorDbm;
  s.trace.angular_resolution_deg = 1.0;
  s.trace.tile_bounce_loss_fraction = 0.01;
  s.trace.wall_reflection_loss_db = 6.0;
  s.trace.adaptive_capture = true;

  s.allow_function_stacking = true;
  s.seed = 1;
  return s;
}

Scenario make_box_scenario() {
  Scenario s;
  s.name = "smoke-box";
  s.frequency_hz = 2.4e9;
  s.floorplan.kind = "box";
  s.floorplan.size_x = 6.0;
  s.floorplan.size_y = 6.0;
  s.floorplan.height = 3.0;
  s.floorplan.tile_coverage = "none";
  s.tx.position = Vec3(1, 3, 1.5);
  s.tx.antenna.kind = "isotropic";
  s.tx.power_dbm = 0.0;
  for (int i = 0; i < 2; ++i) {
    ReceiverSpec r;
    r.id = i;
    r.position = Vec3(3.0 + 1.5 * i, 3, 1.5);
    r.antenna.kind = "isotropic";
    r.capture_radius_m = 0.05;
    s.receivers.push_back(r);
  }
  s.trace.max_bounces = 4;
  s.trace.power_floor_dbm = -150.0;
  s.trace.angular_resolution_deg = 1.0;
  s.trace.adaptive_capture = true;
  s.seed = 1;
  return s;
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::kInvalidArgument, where + ": expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json antenna_to_json(const AntennaSpec& a) {
  json j;
  j["kind"] = a.kind;
  j["boresight"] = vec3_to_json(a.boresight);
  j["half_power_angle_deg"] = a.half_power_angle_deg;
  return j;
}

AntennaSpec antenna_from_json(const json& j, const std::string& where) {
  AntennaSpec a;
  a.kind = j.at("kind").get<std::string>();
  if (j.contains("boresight")) a.boresight = vec3_from_json(j["boresight"], where);
  if (j.contains("half_power_angle_deg"))
    a.half_power_angle_deg = j["half_power_angle_deg"].get<double>();
  return a;
}

}  // namespace

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["frequency_hz"] = s.frequency_hz;
  j["bandwidth_hz"] = s.bandwidth_hz;
  j["seed"] = s.seed;
  j["allow_function_stacking"] = s.allow_function_stacking;

  json f;
  f["kind"] = s.floorplan.kind;
  f["size_x"] = s.floorplan.size_x;
  f["size_y"] = s.floorplan.size_y;
  f["height"] = s.floorplan.height;
  f["tile_side"] = s.floorplan.tile_side;
  f["tile_coverage"] = s.floorplan.tile_coverage;
  f["tile_min_z"] = s.floorplan.tile_min_z;
  f["middle_wall_length"] = s.floorplan.middle_wall_length;
  f["middle_wall_thickness"] = s.floorplan.middle_wall_thickness;
  f["middle_wall_center_x"] = s.floorplan.middle_wall_center_x;
  f["middle_wall_center_y"] = s.floorplan.middle_wall_center_y;
  f["wall_passive_loss_db"] = s.floorplan.wall_passive_loss_db;
  j["floorplan"] = f;

  json tx;
  tx["position"] = vec3_to_json(s.tx.position);
  tx["antenna"] = antenna_to_json(s.tx.antenna);
  tx["power_dbm"] = s.tx.power_dbm;
  j["tx"] = tx;

  j["receivers"] = json::array();
  for (const ReceiverSpec& r : s.receivers) {
    json rj;
    rj["id"] = r.id;
    rj["position"] = vec3_to_json(r.position);
    rj["antenna"] = antenna_to_json(r.antenna);
    rj["capture_radius_m"] = r.capture_radius_m;
    rj["eavesdropper"] = r.eavesdropper;
    j["receivers"].push_back(rj);
  }

  j["bodies"] = json::array();
  for (const BodySpec& b : s.bodies) {
    json bj;
    bj["center"] = vec3_to_json(b.center);
    bj["radius"] = b.radius;
    bj["transparent"] = b.transparent;
    j["bodies"].push_back(bj);
  }

  json t;
  t["max_bounces"] = s.trace.max_bounces;
  t["power_floor_dbm"] = s.trace.power_floor_dbm;
  t["angular_resolution_deg"] = s.trace.angular_resolution_deg;
  t["tile_bounce_loss_fraction"] = s.trace.tile_bounce_loss_fraction;
  t["wall_reflection_loss_db"] = s.trace.wall_reflection_loss_db;
  t["adaptive_capture"] = s.trace.adaptive_capture;
  j["trace"] = t;

  json o;
  o["kind"] = s.objective.kind;
  if (s.objective.power_threshold_dbm)
    o["power_threshold_dbm"] = *s.objective.power_threshold_dbm;
  o["weights"] = s.objective.weights;
  o["power_split"] = s.objective.power_split;
  o["tile_partitions"] = s.objective.tile_partitions;
  j["objective"] = o;

  json g;
  g["population"] = s.ga.population;
  g["generations"] = s.ga.generations;
  g["tournament_k"] = s.ga.tournament_k;
  g["crossover_rate"] = s.ga.crossover_rate;
  if (s.ga.mutation_rate_per_gene) g["mutation_rate_per_gene"] = *s.ga.mutation_rate_per_gene;
  g["elitism"] = s.ga.elitism;
  j["ga"] = g;
  return j;
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  try {
    s.name = j.at("name").get<std::string>();
    s.frequency_hz = j.at("frequency_hz").get<double>();
    if (s.frequency_hz <= 0.0)
      throw Error(ErrorCode::kInvalidArgument, "frequency_hz must be positive");
    if (j.contains("bandwidth_hz")) s.bandwidth_hz = j["bandwidth_hz"].get<double>();
    if (j.contains("seed")) s.seed = j["seed"].get<uint64_t>();
    if (j.contains("allow_function_stacking"))
      s.allow_function_stacking = j["allow_function_stacking"].get<bool>();

    const json& f = j.at("floorplan");
    s.floorplan.kind = f.at("kind").get<std::string>();
    auto getf = [&](const char* key, double* out) {
      if (f.contains(key)) *out = f[key].get<double>();
    };
    getf("size_x", &s.floorplan.size_x);
    getf("size_y", &s.floorplan.size_y);
    getf("height", &s.floorplan.height);
    getf("tile_side", &s.floorplan.tile_side);
    if (f.contains("tile_coverage"))
      s.floorplan.tile_coverage = f["tile_coverage"].get<std::string>();
    getf("tile_min_z", &s.floorplan.tile_min_z);
    getf("middle_wall_length", &s.floorplan.middle_wall_length);
    getf("middle_wall_thickness", &s.floorplan.middle_wall_thickness);
    getf("middle_wall_center_x", &s.floorplan.middle_wall_center_x);
    getf("middle_wall_center_y", &s.floorplan.middle_wall_center_y);
    getf("wall_passive_loss_db", &s.floorplan.wall_passive_loss_db);

    const json& tx = j.at("tx");
    s.tx.position = vec3_from_json(tx.at("position"), "tx.position");
    s.tx.antenna = antenna_from_json(tx.at("antenna"), "tx.antenna");
    s.tx.power_dbm = tx.at("power_dbm").get<double>();

    for (const json& rj : j.at("receivers")) {
      ReceiverSpec r;
      r.id = rj.at("id").get<int>();
      r.position = vec3_from_json(rj.at("position"), "receiver.position");
      r.antenna = antenna_from_json(rj.at("antenna"), "receiver.antenna");
      if (rj.contains("capture_radius_m"))
        r.capture_radius_m = rj["capture_radius_m"].get<double>();
      if (r.capture_radius_m <= 0.0)
        throw Error(ErrorCode::kInvalidArgument, "capture_radius_m must be positive");
      if (rj.contains("eavesdropper")) r.eavesdropper = rj["eavesdropper"].get<bool>();
      s.receivers.push_back(r);
    }

    if (j.contains("bodies")) {
      for (const json& bj : j["bodies"]) {
        BodySpec b;
        b.center = vec3_from_json(bj.at("center"), "body.center");
        b.radius = bj.at("radius").get<double>();
        if (bj.contains("transparent")) b.transparent = bj["transparent"].get<bool>();
        s.bodies.push_back(b);
      }
    }

    if (j.contains("trace")) {
      const json& t = j["trace"];
      if (t.contains("max_bounces")) s.trace.max_bounces = t["max_bounces"].get<int>();
      if (t.contains("power_floor_dbm"))
        s.trace.power_floor_dbm = t["power_floor_dbm"].get<double>();
      if (t.contains("angular_resolution_deg"))
        s.trace.angular_resolution_deg = t["angular_resolution_deg"].get<double>();
      if (t.contains("tile_bounce_loss_fraction"))
        s.trace.tile_bounce_loss_fraction = t["tile_bounce_loss_fraction"].get<double>();
      if (t.contains("wall_reflection_loss_db"))
        s.trace.wall_reflection_loss_db = t["wall_reflection_loss_db"].get<double>();
      if (t.contains("adaptive_capture"))
        s.trace.adaptive_capture = t["adaptive_capture"].get<bool>();
    }

    if (j.contains("objective")) {
      const json& o = j["objective"];
      s.objective.kind = o.at("kind").get<std::string>();
      if (o.contains("power_threshold_dbm"))
        s.objective.power_threshold_dbm = o["power_threshold_dbm"].get<double>();
      if (o.contains("weights")) s.objective.weights = o["weights"].get<std::vector<double>>();
      if (o.contains("power_split"))
        s.objective.power_split = o["power_split"].get<std::vector<double>>();
      if (o.contains("tile_partitions"))
        s.objective.tile_partitions =
            o["tile_partitions"].get<std::vector<std::vector<int>>>();
    }

    if (j.contains("ga")) {
      const json& g = j["ga"];
      if (g.contains("population")) s.ga.population = g["population"].get<int>();
      if (g.contains("generations")) s.ga.generations = g["generations"].get<int>();
      if (g.contains("tournament_k")) s.ga.tournament_k = g["tournament_k"].get<int>();
      if (g.contains("crossover_rate"))
        s.ga.crossover_rate = g["crossover_rate"].get<double>();
      if (g.contains("mutation_rate_per_gene"))
        s.ga.mutation_rate_per_gene = g["mutation_rate_per_gene"].get<double>();
      if (g.contains("elitism")) s.ga.elitism = g["elitism"].get<int>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("scenario schema: ") + e.what());
  }
  return s;
}

std::string scenario_dump(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

Scenario scenario_parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a line number for the diagnostic.
    size_t line = 1;
    for (size_t i = 0; i < std::min(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw Error(ErrorCode::kInvalidArgument,
                "line " + std::to_string(line) + ": " + e.what());
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::string& preset_or_path) {
  if (preset_or_path == "corridor-60ghz") return make_corridor_scenario(60e9);
  if (preset_or_path == "corridor-2.4ghz") return make_corridor_scenario(2.4e9);
  if (preset_or_path == "security-room") return make_security_scenario();
  if (preset_or_path == "smoke-box") return make_box_scenario();
  std::ifstream in(preset_or_path);
  if (!in)
    throw Error(ErrorCode::kInvalidArgument,
                "no such preset or scenario file: " + preset_or_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_parse(buf.str());
}

}  // namespace pwe
