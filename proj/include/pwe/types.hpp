// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pwe {

using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Received power reported for a disconnected receiver; also the default
// minimum considered ray power during tracing.
inline constexpr double kPowerFloorDbm = -250.0;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorCode {
  kNonpositiveInput,
  kForwardDirection,
  kEmptyTable,
  kNotSteer,
  kInvalidScene,
  kNoLosTiles,
  kNoPath,
  kNoCommonPaths,
  kNoSuchTile,
  kUnreachable,
  kBadParameters,
  kZeroVector,
  kInvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle to [0, 2*pi).
inline double wrap_angle(double rad) {
  double w = std::fmod(rad, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  if (w >= 2.0 * kPi) w = 0.0;
  return w;
}

// Unit-norm copy of v; normalizing the zero vector is an error.
inline Vec3 normalized(const Vec3& v) {
  double n = v.norm();
  if (n < 1e-30) throw Error(ErrorCode::kZeroVector, "cannot normalize zero vector");
  return v / n;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace pwe
