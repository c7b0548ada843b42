// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <cstdint>
#include <vector>

#include "pwe/geometry.hpp"
#include "pwe/tile_function.hpp"
#include "pwe/types.hpp"

namespace pwe {

// Binary switch-element states of one tile configuration, one entry per
// controller in the tile's controller grid.
struct SwitchConfig {
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> states;

  static SwitchConfig from_seed(uint64_t seed, int rows = 8, int cols = 8);
  friend bool operator==(const SwitchConfig& a, const SwitchConfig& b) {
    return a.states == b.states;
  }
};

// Far-field power reflection pattern of a configured tile, gridded over
// tile-local azimuth x elevation, in dB relative to the incident power.
struct ReflectionPattern {
  double az_min_deg = -90.0;
  double az_max_deg = 90.0;
  double el_min_deg = -90.0;
  double el_max_deg = 90.0;
  double step_deg = 5.0;
  Eigen::MatrixXd gain_db;  // rows: elevation, cols: azimuth

  int az_cells() const { return static_cast<int>(gain_db.cols()); }
  int el_cells() const { return static_cast<int>(gain_db.rows()); }
  double az_of(int col) const { return az_min_deg + col * step_deg; }
  double el_of(int row) const { return el_min_deg + row * step_deg; }
  double max_gain_db() const { return gain_db.maxCoeff(); }
  double sample(double az_deg, double el_deg) const;
};

// Lookup table mapping intended functions to switch configurations via their
// measured (here: synthesized) reflection patterns.
struct ConfigTable {
  struct Entry {
    SwitchConfig config;
    ReflectionPattern pattern;
    // Design direction of the entry's main lobe, tile-local degrees.
    double design_az_deg = 0.0;
    double design_el_deg = 0.0;
    bool absorbing = false;
  };
  std::vector<Entry> entries;
};

// The steer/absorb repertoire: 25 azimuth x elevation steer pairs over
// {-30, -15, 0, 15, 30} degrees plus one absorb, 26 functions total.
std::vector<TileFunction> enumerate_repertoire();

// Index of a repertoire function; throws INVALID_ARGUMENT when `fn` is not a
// repertoire member.
int repertoire_index_of(const TileFunction& fn);

// Deterministic synthetic table with one entry per repertoire function:
// a cos-power main lobe around the entry's design direction over a uniform
// sidelobe floor; the absorb entry is a uniform -35 dB pattern.
ConfigTable generate_config_table(uint64_t seed = 0x9e3779b97f4a7c15ull);

// Configuration best matching the intended function. ABSORB minimizes the
// worst-case reflected lobe (argmin over entries of the pattern maximum);
// STEER maximizes gain toward the outgoing direction penalized by the
// strongest off-target lobe. Ties break to the lowest entry index.
int best_config_index(const TileFunction& intended, const ConfigTable& table);
SwitchConfig best_config(const TileFunction& intended, const ConfigTable& table);

// Returns a copy of `tile` with the function deployed: STEER rotates the
// virtual normal, ABSORB marks 35 dB attenuation with a specular remainder,
// COLLIMATE marks first-impact collimation, PHASE_ALTER records the offset.
// Without `allow_stacking` a new function replaces the previous state.
Tile apply_function(const Tile& tile, const TileFunction& fn,
                    bool allow_stacking = false);

// In-place variant used when deploying onto a floorplan panel.
void apply_function_to_state(TileState& state, const Vec3& geometric_normal,
                             const TileFunction& fn, bool allow_stacking);

// The reversed steer STEER(-O, -I); both deploy the same virtual normal.
TileFunction steer_symmetry_check(const TileFunction& fn);

// Versioned JSON artifacts for test fixtures.
std::string repertoire_dump();
std::string config_table_dump(const ConfigTable& table);
ConfigTable config_table_parse(const std::string& text);

// Attenuation applied by an absorbing tile to the specular remainder.
inline constexpr double kAbsorbLossDb = 35.0;

}  // namespace pwe
