// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/tiles.hpp"

#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

namespace pwe {

const char* tile_action_name(TileAction action) {
  switch (action) {
    case TileAction::kSteer: return "STEER";
    case TileAction::kAbsorb: return "ABSORB";
    case TileAction::kCollimate: return "COLLIMATE";
    case TileAction::kPhaseAlter: return "PHASE_ALTER";
  }
  return "UNKNOWN";
}

TileFunction TileFunction::steer(const Vec3& incident, const Vec3& outgoing) {
  TileFunction fn;
  fn.action = TileAction::kSteer;
  fn.incident = normalized(incident);
  fn.outgoing = normalized(outgoing);
  return fn;
}

TileFunction TileFunction::steer_angles(double azimuth_deg, double elevation_deg) {
  TileFunction fn;
  fn.action = TileAction::kSteer;
  fn.azimuth_deg = azimuth_deg;
  fn.elevation_deg = elevation_deg;
  return fn;
}

TileFunction TileFunction::absorb(std::optional<Vec3> incident) {
  TileFunction fn;
  fn.action = TileAction::kAbsorb;
  if (incident) fn.incident = normalized(*incident);
  return fn;
}

TileFunction TileFunction::collimate() {
  TileFunction fn;
  fn.action = TileAction::kCollimate;
  return fn;
}

TileFunction TileFunction::phase_alter(double phase_offset_rad) {
  TileFunction fn;
  fn.action = TileAction::kPhaseAlter;
  fn.phase_offset_rad = wrap_angle(phase_offset_rad);
  return fn;
}

bool operator==(const TileFunction& a, const TileFunction& b) {
  auto vec_eq = [](const std::optional<Vec3>& x, const std::optional<Vec3>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (*x - *y).norm() < 1e-12;
  };
  return a.action == b.action && vec_eq(a.incident, b.incident) &&
         vec_eq(a.outgoing, b.outgoing) && a.azimuth_deg == b.azimuth_deg &&
         a.elevation_deg == b.elevation_deg &&
         a.phase_offset_rad == b.phase_offset_rad;
}

void validate_function(const TileFunction& fn) {
  switch (fn.action) {
    case TileAction::kSteer:
      if (fn.azimuth_deg.has_value() != fn.elevation_deg.has_value())
        throw Error(ErrorCode::kBadParameters, "STEER angle form needs both angles");
      if (!fn.azimuth_deg && (!fn.incident || !fn.outgoing))
        throw Error(ErrorCode::kBadParameters, "STEER requires incident and outgoing");
      break;
    case TileAction::kAbsorb:
      if (fn.outgoing)
        throw Error(ErrorCode::kBadParameters, "ABSORB takes no outgoing direction");
      break;
    case TileAction::kCollimate:
    case TileAction::kPhaseAlter:
      break;
  }
}

SwitchConfig SwitchConfig::from_seed(uint64_t seed, int rows, int cols) {
  SwitchConfig cfg;
  cfg.states.resize(rows, cols);
  uint64_t x = seed ? seed : 0x853c49e6748fea9bull;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      // xorshift64
      x ^= x << 13;
      x ^= x >> 7;
      x ^= x << 17;
      cfg.states(r, c) = static_cast<uint8_t>(x & 1u);
    }
  }
  return cfg;
}

double ReflectionPattern::sample(double az_deg, double el_deg) const {
  const int col = std::clamp(
      static_cast<int>(std::lround((az_deg - az_min_deg) / step_deg)), 0,
      az_cells() - 1);
  const int row = std::clamp(
      static_cast<int>(std::lround((el_deg - el_min_deg) / step_deg)), 0,
      el_cells() - 1);
  return gain_db(row, col);
}

namespace {

constexpr std::array<double, 5> kRepertoireAngles = {-30.0, -15.0, 0.0, 15.0, 30.0};

ReflectionPattern make_lobe_pattern(double design_az_deg, double design_el_deg,
                                    double peak_db, double floor_db,
                                    double lobe_width_deg) {
  ReflectionPattern p;
  const int az_n = static_cast<int>((p.az_max_deg - p.az_min_deg) / p.step_deg) + 1;
  const int el_n = static_cast<int>((p.el_max_deg - p.el_min_deg) / p.step_deg) + 1;
  p.gain_db.resize(el_n, az_n);
  for (int r = 0; r < el_n; ++r) {
    for (int c = 0; c < az_n; ++c) {
      const double daz = p.az_of(c) - design_az_deg;
      const double del = p.el_of(r) - design_el_deg;
      const double dist2 = daz * daz + del * del;
      const double lobe = peak_db - dist2 / (lobe_width_deg * lobe_width_deg) * 10.0;
      p.gain_db(r, c) = std::max(floor_db, lobe);
    }
  }
  return p;
}

}  // namespace

std::vector<TileFunction> enumerate_repertoire() {
  std::vector<TileFunction> out;
  out.reserve(26);
  for (double az : kRepertoireAngles)
    for (double el : kRepertoireAngles) out.push_back(TileFunction::steer_angles(az, el));
  out.push_back(TileFunction::absorb());
  return out;
}

int repertoire_index_of(const TileFunction& fn) {
  if (fn.action == TileAction::kAbsorb) return 25;
  if (fn.action == TileAction::kSteer && fn.azimuth_deg && fn.elevation_deg) {
    int ai = -1, ei = -1;
    for (size_t i = 0; i < kRepertoireAngles.size(); ++i) {
      if (std::abs(*fn.azimuth_deg - kRepertoireAngles[i]) < 1e-9) ai = static_cast<int>(i);
      if (std::abs(*fn.elevation_deg - kRepertoireAngles[i]) < 1e-9) ei = static_cast<int>(i);
    }
    if (ai >= 0 && ei >= 0) return ai * 5 + ei;
  }
  throw Error(ErrorCode::kInvalidArgument, "function is not a repertoire member");
}

ConfigTable generate_config_table(uint64_t seed) {
  ConfigTable table;
  const auto repertoire = enumerate_repertoire();
  table.entries.reserve(repertoire.size());
  for (size_t i = 0; i < repertoire.size(); ++i) {
    ConfigTable::Entry e;
    e.config = SwitchConfig::from_seed(seed + i);
    const TileFunction& fn = repertoire[i];
    if (fn.action == TileAction::kAbsorb) {
      e.absorbing = true;
      e.pattern = make_lobe_pattern(0.0, 0.0, -kAbsorbLossDb, -kAbsorbLossDb, 20.0);
    } else {
      // A mirror rotated by (az, el) moves the reflected lobe by twice that.
      e.design_az_deg = 2.0 * *fn.azimuth_deg;
      e.design_el_deg = 2.0 * *fn.elevation_deg;
      e.pattern = make_lobe_pattern(e.design_az_deg, e.design_el_deg, 0.0, -40.0, 20.0);
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

int best_config_index(const TileFunction& intended, const ConfigTable& table) {
  if (table.entries.empty())
    throw Error(ErrorCode::kEmptyTable, "config table has no entries");
  validate_function(intended);

  int best = 0;
  double best_score = 0.0;
  bool first = true;
  for (size_t i = 0; i < table.entries.size(); ++i) {
    const ConfigTable::Entry& e = table.entries[i];
    double score;
    if (intended.action == TileAction::kAbsorb) {
      // argmin over entries of the worst reflected lobe.
      score = -e.pattern.max_gain_db();
    } else if (intended.action == TileAction::kSteer) {
      double az = 0.0, el = 0.0;
      if (intended.azimuth_deg) {
        az = 2.0 * *intended.azimuth_deg;
        el = 2.0 * *intended.elevation_deg;
      }
      const double target = e.pattern.sample(az, el);
      // Strongest lobe farther than 15 degrees from the target direction.
      double off = -1e300;
      for (int r = 0; r < e.pattern.el_cells(); ++r) {
        for (int c = 0; c < e.pattern.az_cells(); ++c) {
          const double daz = e.pattern.az_of(c) - az;
          const double del = e.pattern.el_of(r) - el;
          if (daz * daz + del * del > 15.0 * 15.0)
            off = std::max(off, e.pattern.gain_db(r, c));
        }
      }
      score = target - std::max(off, -200.0);
    } else {
      throw Error(ErrorCode::kBadParameters,
                  "best_config supports STEER and ABSORB intents");
    }
    if (first || score > best_score) {
      best = static_cast<int>(i);
      best_score = score;
      first = false;
    }
  }
  return best;
}

SwitchConfig best_config(const TileFunction& intended, const ConfigTable& table) {
  return table.entries[static_cast<size_t>(best_config_index(intended, table))].config;
}

void apply_function_to_state(TileState& state, const Vec3& geometric_normal,
                             const TileFunction& fn, bool allow_stacking) {
  validate_function(fn);
  if (!allow_stacking) {
    TileState fresh;
    fresh.virtual_normal = geometric_normal;
    state = fresh;
  }
  switch (fn.action) {
    case TileAction::kSteer:
      if (fn.azimuth_deg) {
        // Angle form resolved by the caller (needs tile axes); handled in
        // apply_function below. Direction form:
        throw Error(ErrorCode::kInvalidArgument,
                    "angle-form STEER needs tile geometry; use apply_function");
      }
      state.virtual_normal = virtual_normal(*fn.incident, *fn.outgoing);
      break;
    case TileAction::kAbsorb:
      state.absorbing = true;
      state.virtual_normal = geometric_normal;  // specular remainder
      break;
    case TileAction::kCollimate:
      state.collimate_first_impact = true;
      break;
    case TileAction::kPhaseAlter:
      state.phase_offset_rad = wrap_angle(fn.phase_offset_rad);
      break;
  }
  state.deployed_function = fn;
}

Tile apply_function(const Tile& tile, const TileFunction& fn, bool allow_stacking) {
  validate_function(fn);
  Tile out = tile;
  if (fn.action == TileAction::kSteer && fn.azimuth_deg) {
    if (!allow_stacking) {
      TileState fresh;
      fresh.virtual_normal = tile.geometric_normal;
      out.state = fresh;
    }
    out.state.virtual_normal =
        steer_normal_from_angles(tile, *fn.azimuth_deg, *fn.elevation_deg);
    out.state.deployed_function = fn;
    return out;
  }
  apply_function_to_state(out.state, tile.geometric_normal, fn, allow_stacking);
  return out;
}

TileFunction steer_symmetry_check(const TileFunction& fn) {
  if (fn.action != TileAction::kSteer || !fn.incident || !fn.outgoing)
    throw Error(ErrorCode::kNotSteer, "symmetry check needs a direction-form STEER");
  return TileFunction::steer(-*fn.outgoing, -*fn.incident);
}

namespace {

constexpr int kArtifactVersion = 1;

}  // namespace

std::string repertoire_dump() {
  nlohmann::json j;
  j["version"] = kArtifactVersion;
  j["functions"] = nlohmann::json::array();
  for (const TileFunction& fn : enumerate_repertoire()) {
    nlohmann::json f;
    f["action"] = tile_action_name(fn.action);
    if (fn.azimuth_deg) {
      f["azimuth_deg"] = *fn.azimuth_deg;
      f["elevation_deg"] = *fn.elevation_deg;
    }
    j["functions"].push_back(f);
  }
  return j.dump(2) + "\n";
}

std::string config_table_dump(const ConfigTable& table) {
  nlohmann::json j;
  j["version"] = kArtifactVersion;
  j["entries"] = nlohmann::json::array();
  for (const ConfigTable::Entry& e : table.entries) {
    nlohmann::json ej;
    std::string bits;
    bits.reserve(static_cast<size_t>(e.config.states.size()));
    for (int r = 0; r < e.config.states.rows(); ++r)
      for (int c = 0; c < e.config.states.cols(); ++c)
        bits += e.config.states(r, c) ? '1' : '0';
    ej["switch_rows"] = e.config.states.rows();
    ej["switch_states"] = bits;
    ej["design_az_deg"] = e.design_az_deg;
    ej["design_el_deg"] = e.design_el_deg;
    ej["absorbing"] = e.absorbing;
    nlohmann::json pj;
    pj["az_min_deg"] = e.pattern.az_min_deg;
    pj["el_min_deg"] = e.pattern.el_min_deg;
    pj["step_deg"] = e.pattern.step_deg;
    pj["gain_db"] = nlohmann::json::array();
    for (int r = 0; r < e.pattern.gain_db.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < e.pattern.gain_db.cols(); ++c)
        row.push_back(e.pattern.gain_db(r, c));
      pj["gain_db"].push_back(row);
    }
    ej["pattern"] = pj;
    j["entries"].push_back(ej);
  }
  return j.dump() + "\n";
}

ConfigTable config_table_parse(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != kArtifactVersion)
    throw Error(ErrorCode::kInvalidArgument, "unsupported config table version");
  ConfigTable table;
  for (const nlohmann::json& ej : j.at("entries")) {
    ConfigTable::Entry e;
    const std::string bits = ej.at("switch_states").get<std::string>();
    const int rows = ej.at("switch_rows").get<int>();
    const int cols = rows > 0 ? static_cast<int>(bits.size()) / rows : 0;
    e.config.states.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        e.config.states(r, c) = bits[static_cast<size_t>(r) * cols + c] == '1';
    e.design_az_deg = ej.at("design_az_deg").get<double>();
    e.design_el_deg = ej.at("design_el_deg").get<double>();
    e.absorbing = ej.at("absorbing").get<bool>();
    const nlohmann::json& pj = ej.at("pattern");
    e.pattern.az_min_deg = pj.at("az_min_deg").get<double>();
    e.pattern.el_min_deg = pj.at("el_min_deg").get<double>();
    e.pattern.step_deg = pj.at("step_deg").get<double>();
    const auto& rowsj = pj.at("gain_db");
    const int el_n = static_cast<int>(rowsj.size());
    const int az_n = el_n ? static_cast<int>(rowsj[0].size()) : 0;
    e.pattern.gain_db.resize(el_n, az_n);
    for (int r = 0; r < el_n; ++r)
      for (int c = 0; c < az_n; ++c)
        e.pattern.gain_db(r, c) = rowsj[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
    table.entries.push_back(std::move(e));
  }
  return table;
}

}  // namespace pwe
