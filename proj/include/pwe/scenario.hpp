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
#include <string>
#include <vector>

#include "pwe/raytracer.hpp"
#include "pwe/types.hpp"

#include <nlohmann/json_fwd.hpp>

namespace pwe {

struct AntennaSpec {
  std::string kind = "isotropic";  // isotropic | half-dipole | single-lobe
  Vec3 boresight = Vec3::UnitZ();  // dipole axis for half-dipole
  double half_power_angle_deg = 30.0;

  AntennaPattern build() const;
};

struct TransmitterSpec {
  Vec3 position = Vec3::Zero();
  AntennaSpec antenna;
  double power_dbm = 0.0;
};

struct ReceiverSpec {
  int id = 0;
  Vec3 position = Vec3::Zero();
  AntennaSpec antenna;
  double capture_radius_m = 0.05;
  bool eavesdropper = false;
};

struct BodySpec {
  Vec3 center = Vec3::Zero();
  double radius = 0.5;
  bool transparent = false;
};

// Floorplan generator settings. `kind` selects the construction:
//   corridor       two parallel corridors separated by a tiled middle wall,
//                  every wall coated with tiles
//   security-room  open room, tiles on the ceiling and wall strips above
//                  tile_min_z only
//   box            plain rectangular room, optional full wall tiling
struct FloorplanSpec {
  std::string kind = "box";
  double size_x = 10.0;
  double size_y = 15.0;
  double height = 3.0;
  double tile_side = 1.0;
  std::string tile_coverage = "none";  // none | walls | ceiling-upper-walls
  double tile_min_z = 1.5;             // ceiling-upper-walls coverage
  double middle_wall_length = 12.0;
  double middle_wall_thickness = 0.5;
  double middle_wall_center_x = 4.75;
  double middle_wall_center_y = 7.5;
  double wall_passive_loss_db = 6.0;
};

struct TraceSpec {
  int max_bounces = 50;
  double power_floor_dbm = kPowerFloorDbm;
  double angular_resolution_deg = 1.0;
  double tile_bounce_loss_fraction = 0.0;
  double wall_reflection_loss_db = 6.0;
  bool adaptive_capture = false;
};

struct ObjectiveSpec {
  std::string kind = "case-a";  // case-a | case-b | multiuser
  std::optional<double> power_threshold_dbm;
  std::vector<double> weights;                   // multiuser d_j
  std::vector<double> power_split;               // multiuser P_t shares
  std::vector<std::vector<int>> tile_partitions; // multiuser flat tile indices per user
};

struct GaSpec {
  int population = 32;
  int generations = 60;
  int tournament_k = 3;
  double crossover_rate = 0.9;
  std::optional<double> mutation_rate_per_gene;  // default 1/num_tiles
  int elitism = 2;
};

struct Scenario {
  std::string name = "scenario";
  double frequency_hz = 2.4e9;
  double bandwidth_hz = 25e6;
  FloorplanSpec floorplan;
  TransmitterSpec tx;
  std::vector<ReceiverSpec> receivers;
  std::vector<BodySpec> bodies;
  TraceSpec trace;
  ObjectiveSpec objective;
  GaSpec ga;
  uint64_t seed = 1;
  bool allow_function_stacking = false;
};

// Corridor study preset: 10 x 15 x 3 m outer box, 12 x 0.5 m full-height
// middle wall, 222 one-meter tiles on all walls, Tx at (7, 12, 2) with
// 100 dBm, 12-receiver 2x6 NLOS grid at 2.5 m spacing, z = 1.5.
Scenario make_corridor_scenario(double frequency_hz);

// Security study preset: 20.25 x 8.25 x 3 m room, 75 cm tiles on the ceiling
// and wall strips above 1.5 m, users at (2.5, 1, 1) / (17.5, 1, 1), an
// isotropic eavesdropper at (10, 7, 1), 2.4 GHz, -30 dBm, 1% tile bounce
// loss, single-lobe (30 deg) user antennas, blocking body spheres.
Scenario make_security_scenario();

// Empty-room smoke preset with line-of-sight receivers.
Scenario make_box_scenario();

// Resolves a CLI --scenario argument: a known preset name
// (corridor-60ghz, corridor-2.4ghz, security-room, smoke-box) or a JSON file.
Scenario load_scenario(const std::string& preset_or_path);

Floorplan build_floorplan(const FloorplanSpec& spec);
Scene build_scene(const Scenario& scenario);
Transmitter build_transmitter(const Scenario& scenario);
TraceParams build_trace_params(const Scenario& scenario);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
std::string scenario_dump(const Scenario& scenario);  // canonical, 2-space indent
Scenario scenario_parse(const std::string& text);     // throws with line info

}  // namespace pwe
