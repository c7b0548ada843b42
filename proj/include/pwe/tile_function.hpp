// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <optional>

#include "pwe/types.hpp"

namespace pwe {

enum class TileAction { kSteer, kAbsorb, kCollimate, kPhaseAlter };

const char* tile_action_name(TileAction action);

// A deployable tile function. STEER is parameterized either by an
// (incident, outgoing) direction pair or by azimuth/elevation rotation
// angles of the tile normal (the repertoire form).
struct TileFunction {
  TileAction action = TileAction::kSteer;
  std::optional<Vec3> incident;      // STEER / ABSORB direction of arrival
  std::optional<Vec3> outgoing;      // STEER only
  std::optional<double> azimuth_deg;    // STEER angle form
  std::optional<double> elevation_deg;  // STEER angle form
  std::optional<double> wavelength_m;
  double phase_offset_rad = 0.0;  // PHASE_ALTER

  static TileFunction steer(const Vec3& incident, const Vec3& outgoing);
  static TileFunction steer_angles(double azimuth_deg, double elevation_deg);
  static TileFunction absorb(std::optional<Vec3> incident = std::nullopt);
  static TileFunction collimate();
  static TileFunction phase_alter(double phase_offset_rad);

  bool is_angle_steer() const {
    return action == TileAction::kSteer && azimuth_deg.has_value();
  }

  friend bool operator==(const TileFunction& a, const TileFunction& b);
};

// Validates the action/parameter pairing (STEER needs incident and outgoing
// or the angle pair; ABSORB takes no outgoing). Throws BAD_PARAMETERS.
void validate_function(const TileFunction& fn);

}  // namespace pwe
