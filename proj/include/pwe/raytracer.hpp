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

#include "pwe/em.hpp"
#include "pwe/geometry.hpp"
#include "pwe/types.hpp"

namespace pwe {

struct Transmitter {
  Vec3 position = Vec3::Zero();
  AntennaPattern antenna = AntennaPattern::isotropic();
  double power_dbm = 0.0;
};

struct Receiver {
  int id = 0;
  Vec3 position = Vec3::Zero();
  AntennaPattern antenna = AntennaPattern::isotropic();
  double capture_radius_m = 0.05;
};

struct Scene {
  Floorplan plan;
  std::vector<Receiver> receivers;
};

struct TraceParams {
  int max_bounces = 50;
  double power_floor_dbm = kPowerFloorDbm;
  double angular_resolution_deg = 1.0;
  double carrier_freq_hz = 2.4e9;
  // Fraction of carried power lost per tile bounce (0.01 keeps 99%).
  double tile_bounce_loss_fraction = 0.0;
  // Specular reflection loss of plain concrete, dB per bounce.
  double wall_reflection_loss_db = 6.0;
  // Grow the capture sphere with unfolded distance to keep pace with ray
  // divergence (off by default: fixed, sampling-limited capture).
  bool adaptive_capture = false;
  // Non-empty: launch exactly these directions instead of the full sphere.
  std::vector<Vec3> launch_directions;
  int n_threads = 0;  // 0: hardware concurrency
  bool record_bounce_powers = false;
};

// One multipath arrival delivered to a receiver. `power_dbm` already includes
// both antenna gains; `phase_rad` is the accumulated reflection phase offset
// (propagation phase lives in delay_s).
struct RayPath {
  int rx_id = 0;
  int launch_index = 0;
  // Smallest launch index merged into this arrival's bundle; rays present in
  // two receivers' bundles prove the geometric path reaches both, so this is
  // the cross-receiver path identity.
  int bundle_min_launch = 0;
  std::vector<Vec3> bounce_points;
  std::vector<std::optional<TileId>> bounce_tiles;
  Vec3 capture_point = Vec3::Zero();
  Vec3 arrival_dir = Vec3::UnitX();
  double power_dbm = kPowerFloorDbm;
  double delay_s = 0.0;
  double phase_rad = 0.0;
  std::optional<int> collimated_since;
  double miss_distance_m = 0.0;
  std::vector<double> bounce_impinging_dbm;  // filled when requested

  int bounce_count() const { return static_cast<int>(bounce_points.size()); }
};

struct TraceResult {
  std::vector<RayPath> paths;  // ordered by (rx_id, launch_index, delay)
  // Strongest impinging power seen by each tile, panel-parallel flat arrays
  // (kPowerFloorDbm where nothing arrived).
  std::vector<std::vector<double>> panel_impinging_dbm;

  std::optional<double> tile_impinging_dbm(const Floorplan& plan, TileId id) const;
};

// Power/delay profile entry at a receiver.
struct PdpEntry {
  int path_id = 0;
  double delay_s = 0.0;
  double power_dbm = kPowerFloorDbm;
  double phase_rad = 0.0;
};

struct PowerDelayProfile {
  int rx_id = 0;
  std::vector<PdpEntry> entries;  // sorted by delay
};

// Shooting-and-bouncing trace of the whole scene. Deterministic: identical
// scene and params give identical results, independent of thread count.
TraceResult trace(const Scene& scene, const Transmitter& tx, const TraceParams& params);

// Total received power at `rx`: incoherent sum over its arrivals (their
// powers already carry the antenna weighting); floor when none.
double power_at(const Receiver& rx, const std::vector<RayPath>& paths);

PowerDelayProfile pdp_at(const Receiver& rx, const std::vector<RayPath>& paths);

// Delays folded modulo the carrier period, relative to the earliest arrival.
std::vector<double> pdp_delays_mod_period(const PowerDelayProfile& pdp, double f_c_hz);

// Maximum excess delay among arrivals within 30 dB of the strongest; zero
// with one arrival or none.
double delay_spread(const Receiver& rx, const std::vector<RayPath>& paths);

inline constexpr double kDelaySpreadGateDb = 30.0;

// Coherent received power at `rx` per the superposition model, with optional
// per-path phase offsets (by path_id) added on top of traced phases.
CoherentSum coherent_power_at(const Receiver& rx, const std::vector<RayPath>& paths,
                              double f_c_hz,
                              const std::vector<std::pair<int, double>>* extra_offsets = nullptr);

}  // namespace pwe
