// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <span>
#include <vector>

#include "pwe/types.hpp"

namespace pwe {

enum class AntennaKind { kIsotropic, kHalfDipole, kSingleLobeSinusoid };

// Antenna gain pattern. For the half-dipole, `boresight` holds the dipole
// axis; for the single-lobe pattern it is the lobe direction.
struct AntennaPattern {
  AntennaKind kind = AntennaKind::kIsotropic;
  Vec3 boresight = Vec3::UnitZ();
  double half_power_angle_deg = 30.0;  // single lobe only

  static AntennaPattern isotropic();
  static AntennaPattern half_dipole(const Vec3& axis);
  static AntennaPattern single_lobe(const Vec3& boresight, double half_power_angle_deg);

  double peak_gain() const;
};

// One multipath arrival used in the coherent superposition. `amplitude` is a
// linear field amplitude relative to the 1 mW reference (power = amplitude^2).
struct PathContribution {
  double amplitude = 0.0;
  double delay_s = 0.0;
  double phase_rad = 0.0;  // reflection-induced phase (offsets), not propagation
  int path_id = 0;
};

struct CoherentSum {
  double power_linear = 0.0;
  double power_dbm = kPowerFloorDbm;
  double resultant_phase_rad = 0.0;
};

// Free-space path loss 20*log10(4*pi*d*f/c) in dB.
double fspl_db(double distance_m, double freq_hz);

// Linear gain toward unit direction `dir`.
double antenna_gain(const AntennaPattern& pattern, const Vec3& dir);

// Coherent superposition of the arrivals at carrier f_c:
// r = sum_i a_i * exp(j*(2*pi*f_c*tau_i - theta_i)); power = |r|^2.
CoherentSum coherent_sum(std::span<const PathContribution> contributions,
                         double f_c_hz);

// Power sum of dBm terms; empty input reports the disconnected floor.
double incoherent_sum_dbm(std::span<const double> powers_dbm);

}  // namespace pwe
