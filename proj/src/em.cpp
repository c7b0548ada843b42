// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/em.hpp"

#include <cmath>
#include <complex>

namespace pwe {

AntennaPattern AntennaPattern::isotropic() {
  AntennaPattern p;
  p.kind = AntennaKind::kIsotropic;
  return p;
}

AntennaPattern AntennaPattern::half_dipole(const Vec3& axis) {
  AntennaPattern p;
  p.kind = AntennaKind::kHalfDipole;
  p.boresight = normalized(axis);
  return p;
}

AntennaPattern AntennaPattern::single_lobe(const Vec3& boresight,
                                           double half_power_angle_deg) {
  AntennaPattern p;
  p.kind = AntennaKind::kSingleLobeSinusoid;
  p.boresight = normalized(boresight);
  p.half_power_angle_deg = half_power_angle_deg;
  return p;
}

double AntennaPattern::peak_gain() const {
  switch (kind) {
    case AntennaKind::kIsotropic: return 1.0;
    case AntennaKind::kHalfDipole: return 1.643;
    case AntennaKind::kSingleLobeSinusoid: return 1.0;
  }
  return 1.0;
}

double fspl_db(double distance_m, double freq_hz) {
  if (distance_m <= 0.0 || freq_hz <= 0.0)
    throw Error(ErrorCode::kNonpositiveInput, "fspl_db needs d > 0 and f > 0");
  return 20.0 * std::log10(4.0 * kPi * distance_m * freq_hz / kSpeedOfLight);
}

double antenna_gain(const AntennaPattern& pattern, const Vec3& dir) {
  switch (pattern.kind) {
    case AntennaKind::kIsotropic:
      return 1.0;
    case AntennaKind::kHalfDipole: {
      // 1.643 * (cos(pi/2 * cos psi) / sin psi)^2, psi from the dipole axis.
      const double cos_psi = std::clamp(pattern.boresight.dot(dir), -1.0, 1.0);
      const double sin_psi = std::sqrt(std::max(0.0, 1.0 - cos_psi * cos_psi));
      if (sin_psi < 1e-9) return 0.0;  // on-axis null
      const double num = std::cos(0.5 * kPi * cos_psi);
      return 1.643 * (num * num) / (sin_psi * sin_psi);
    }
    case AntennaKind::kSingleLobeSinusoid: {
      // Peak-normalized cos^m lobe, half power at the configured angle,
      // zero behind the boresight hemisphere.
      const double cos_psi = std::clamp(pattern.boresight.dot(dir), -1.0, 1.0);
      if (cos_psi <= 0.0) return 0.0;
      const double cos_alpha = std::cos(deg2rad(pattern.half_power_angle_deg));
      const double m = std::log(0.5) / std::log(cos_alpha);
      return std::pow(cos_psi, m);
    }
  }
  return 1.0;
}

CoherentSum coherent_sum(std::span<const PathContribution> contributions,
                         double f_c_hz) {
  std::complex<double> resultant(0.0, 0.0);
  for (const PathContribution& c : contributions) {
    const double angle = 2.0 * kPi * f_c_hz * c.delay_s - c.phase_rad;
    resultant += c.amplitude * std::polar(1.0, angle);
  }
  CoherentSum out;
  out.power_linear = std::norm(resultant);
  out.power_dbm = out.power_linear > 0.0
                      ? std::max(kPowerFloorDbm, linear_to_db(out.power_linear))
                      : kPowerFloorDbm;
  out.resultant_phase_rad = out.power_linear > 0.0 ? std::arg(resultant) : 0.0;
  return out;
}

double incoherent_sum_dbm(std::span<const double> powers_dbm) {
  if (powers_dbm.empty()) return kPowerFloorDbm;
  if (powers_dbm.size() == 1) return powers_dbm[0];
  double sum = 0.0;
  for (double p : powers_dbm) sum += db_to_linear(p);
  if (sum <= 0.0) return kPowerFloorDbm;
  return std::max(kPowerFloorDbm, linear_to_db(sum));
}

}  // namespace pwe
