// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/raytracer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "pwe/tiles.hpp"

namespace pwe {

namespace {

constexpr double kMinSpreadDistance = 1e-3;  // near-field clamp, meters
constexpr double kGrazingEps = 1e-9;

// Near-uniform deterministic sphere sampling (Fibonacci spiral).
std::vector<Vec3> fibonacci_sphere(double angular_resolution_deg) {
  const double step = deg2rad(angular_resolution_deg);
  const int n = std::max(16, static_cast<int>(std::lround(4.0 * kPi / (step * step))));
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<size_t>(n));
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return dirs;
}

struct Candidate {
  int rx_id;
  int launch_index;
  int bundle_min_launch;
  std::vector<Vec3> bounce_points;
  std::vector<std::optional<TileId>> bounce_tiles;
  Vec3 capture_point;
  Vec3 arrival_dir;
  double power_dbm;
  double delay_s;
  double phase_rad;
  std::optional<int> collimated_since;
  double miss_distance;
  std::vector<double> bounce_impinging_dbm;
  // Bounce signature for merging adjacent rays of the same geometric path.
  std::vector<int32_t> signature;
};

double exit_distance(const Eigen::AlignedBox3d& box, const Vec3& o, const Vec3& d) {
  if (box.isEmpty()) return 1e4;
  double t_exit = 1e4;
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(d[axis]) < 1e-15) continue;
    const double t1 = (box.min()[axis] - o[axis]) / d[axis];
    const double t2 = (box.max()[axis] - o[axis]) / d[axis];
    const double t_far = std::max(t1, t2);
    t_exit = std::min(t_exit, t_far);
  }
  return std::max(t_exit, 0.0);
}

struct RayTracerCore {
  const Scene& scene;
  const Transmitter& tx;
  const TraceParams& params;
  double max_rx_gain_db = 0.0;
  double tile_loss_db = 0.0;
  double tan_resolution = 0.0;

  RayTracerCore(const Scene& s, const Transmitter& t, const TraceParams& p)
      : scene(s), tx(t), params(p) {
    double peak = 1.0;
    for (const Receiver& r : s.receivers) peak = std::max(peak, r.antenna.peak_gain());
    max_rx_gain_db = linear_to_db(peak);
    tile_loss_db =
        params.tile_bounce_loss_fraction > 0.0
            ? -linear_to_db(1.0 - params.tile_bounce_loss_fraction)
            : 0.0;
    tan_resolution = std::tan(deg2rad(params.angular_resolution_deg));
  }

  // Strongest impinging power per tile, one flat array per panel.
  using Ledger = std::vector<std::vector<double>>;

  Ledger make_ledger() const {
    Ledger ledger(scene.plan.panels.size());
    for (size_t i = 0; i < scene.plan.panels.size(); ++i)
      ledger[i].assign(static_cast<size_t>(scene.plan.panels[i].tile_count()),
                       kPowerFloorDbm);
    return ledger;
  }

  void trace_one(int launch_index, const Vec3& launch_dir,
                 std::vector<Candidate>* out, Ledger* ledger) const {
    const double gtx = antenna_gain(tx.antenna, launch_dir);
    if (gtx <= 0.0) return;
    const double gtx_db = linear_to_db(gtx);

    Vec3 pos = tx.position;
    Vec3 dir = launch_dir;
    double total_len = 0.0;
    double spread_len = 0.0;
    double loss_db = 0.0;
    double phase = 0.0;
    std::optional<int> collimated;

    std::vector<Vec3> bounce_points;
    std::vector<std::optional<TileId>> bounce_tiles;
    std::vector<double> bounce_impinging;
    std::vector<int32_t> signature;

    IntersectOptions opts;
    opts.skip_bodies_containing_origin = true;

    for (int bounce = 0; bounce <= params.max_bounces; ++bounce) {
      std::optional<Hit> hit;
      // Transparent bodies never block; retry past them.
      Vec3 probe_origin = pos;
      double consumed = 0.0;
      for (;;) {
        hit = intersect(probe_origin, dir, scene.plan, opts);
        if (!hit) break;
        if (hit->kind == HitKind::kBody &&
            scene.plan.bodies[static_cast<size_t>(hit->index)].transparent) {
          consumed += hit->distance;
          probe_origin = hit->point;
          continue;
        }
        hit->distance += consumed;
        break;
      }

      double t_end = hit ? hit->distance : exit_distance(scene.plan.bounds, pos, dir);
      double t_capture_end = t_end;
      if (hit && hit->kind == HitKind::kBody) {
        // A receiver standing inside the blocking body (its own) still hears
        // the wave: extend capture tests through the sphere chord.
        const BlockingSphere& b = scene.plan.bodies[static_cast<size_t>(hit->index)];
        const Vec3 oc = pos - b.center;
        const double half_b = oc.dot(dir);
        const double disc = half_b * half_b - (oc.squaredNorm() - b.radius * b.radius);
        if (disc >= 0.0) t_capture_end = std::max(t_end, -half_b + std::sqrt(disc));
      }

      for (const Receiver& rx : scene.receivers) {
        const double t_star =
            std::clamp((rx.position - pos).dot(dir), 0.0, t_capture_end);
        const Vec3 closest = pos + t_star * dir;
        const double miss = (closest - rx.position).norm();
        double r_eff = rx.capture_radius_m;
        if (params.adaptive_capture) {
          r_eff = std::max(r_eff, (total_len + t_star) * tan_resolution * 0.75);
        }
        if (miss > r_eff) continue;
        const double grx = antenna_gain(rx.antenna, -dir);
        if (grx <= 0.0) continue;
        const double spreading =
            std::max(kMinSpreadDistance, spread_len + (collimated ? 0.0 : t_star));
        const double power = tx.power_dbm + gtx_db + linear_to_db(grx) -
                             fspl_db(spreading, params.carrier_freq_hz) - loss_db;
        if (power < params.power_floor_dbm) continue;
        Candidate c;
        c.rx_id = rx.id;
        c.launch_index = launch_index;
        c.bundle_min_launch = launch_index;
        c.bounce_points = bounce_points;
        c.bounce_tiles = bounce_tiles;
        c.capture_point = closest;
        c.arrival_dir = dir;
        c.power_dbm = power;
        c.delay_s = (total_len + t_star) / kSpeedOfLight;
        c.phase_rad = wrap_angle(phase);
        c.collimated_since = collimated;
        c.miss_distance = miss;
        if (params.record_bounce_powers) c.bounce_impinging_dbm = bounce_impinging;
        c.signature = signature;
        c.signature.push_back(-1 - rx.id);
        out->push_back(std::move(c));
      }

      if (!hit || bounce == params.max_bounces) break;
      if (hit->kind == HitKind::kBody) break;  // fully blocking

      // Prune once even a zero-length future leg cannot reach the floor.
      const double spread_at_hit =
          std::max(kMinSpreadDistance, collimated ? spread_len : spread_len + t_end);
      const double optimistic = tx.power_dbm + gtx_db + max_rx_gain_db -
                                fspl_db(spread_at_hit, params.carrier_freq_hz) -
                                loss_db;
      if (optimistic < params.power_floor_dbm) break;

      total_len += t_end;
      if (!collimated) spread_len += t_end;

      // Power arriving at this bounce, before the bounce's own loss.
      const double impinging = tx.power_dbm + gtx_db -
                               fspl_db(spread_at_hit, params.carrier_freq_hz) -
                               loss_db;

      Vec3 next_dir;
      std::optional<TileId> tile_id;
      if (hit->kind == HitKind::kSurface) {
        const RectSurface& s = scene.plan.surfaces[static_cast<size_t>(hit->index)];
        next_dir = reflect(dir, s.geometric_normal());
        loss_db += params.wall_reflection_loss_db;
        signature.push_back(hit->index);
      } else {
        const TilePanel& panel = scene.plan.panels[static_cast<size_t>(hit->index)];
        const TileState& state = panel.state_at(hit->tile_row, hit->tile_col);
        const Vec3 geom_n = panel.normal();
        const bool back_hit = dir.dot(geom_n) > 0.0;
        tile_id = panel.id_at(hit->tile_row, hit->tile_col);
        signature.push_back(1000000 + hit->index * 100000 +
                            hit->tile_row * 1000 + hit->tile_col);

        if (!back_hit) {
          auto& cell = (*ledger)[static_cast<size_t>(hit->index)]
                                [static_cast<size_t>(hit->tile_row) * panel.cols +
                                 hit->tile_col];
          cell = std::max(cell, impinging);
        }

        if (back_hit || !state.deployed_function) {
          // Passive tile: regular propagation off the structural surface.
          next_dir = reflect(dir, geom_n);
          loss_db += panel.passive_loss_db;
        } else {
          if (state.absorbing) {
            next_dir = reflect(dir, geom_n);  // specular remainder
            loss_db += kAbsorbLossDb;
          } else {
            next_dir = reflect(dir, state.virtual_normal);
          }
          loss_db += tile_loss_db;
          if (state.collimate_first_impact && !collimated) collimated = bounce;
          phase += state.phase_offset_rad;
        }
      }

      // A reflection steered into the surface carries no further.
      const Vec3 hit_normal =
          hit->kind == HitKind::kSurface
              ? scene.plan.surfaces[static_cast<size_t>(hit->index)].geometric_normal()
              : scene.plan.panels[static_cast<size_t>(hit->index)].normal();
      const Vec3 outward = dir.dot(hit_normal) < 0.0 ? hit_normal : Vec3(-hit_normal);
      if (next_dir.dot(outward) <= kGrazingEps) break;

      if (params.record_bounce_powers) bounce_impinging.push_back(impinging);
      bounce_points.push_back(hit->point);
      bounce_tiles.push_back(tile_id);
      pos = hit->point;
      dir = normalized(next_dir);
    }
  }
};

}  // namespace

std::optional<double> TraceResult::tile_impinging_dbm(const Floorplan& plan,
                                                      TileId id) const {
  for (size_t i = 0; i < plan.panels.size(); ++i) {
    const TilePanel& p = plan.panels[i];
    const int r = id.row - p.row_offset;
    const int c = id.col - p.col_offset;
    if (r >= 0 && r < p.rows && c >= 0 && c < p.cols) {
      if (i >= panel_impinging_dbm.size()) return std::nullopt;
      return panel_impinging_dbm[i][static_cast<size_t>(r) * p.cols + c];
    }
  }
  return std::nullopt;
}

TraceResult trace(const Scene& scene, const Transmitter& tx, const TraceParams& params) {
  if (!scene.plan.bounds.isEmpty() && !scene.plan.bounds.contains(tx.position))
    throw Error(ErrorCode::kInvalidScene, "transmitter outside floorplan bounds");
  if (params.max_bounces < 0 || params.angular_resolution_deg <= 0.0)
    throw Error(ErrorCode::kInvalidScene, "bad trace parameters");
  if (params.tile_bounce_loss_fraction < 0.0 || params.tile_bounce_loss_fraction >= 1.0)
    throw Error(ErrorCode::kInvalidScene, "tile bounce loss fraction out of range");

  std::vector<Vec3> dirs = params.launch_directions;
  if (dirs.empty()) {
    dirs = fibonacci_sphere(params.angular_resolution_deg);
  } else {
    for (Vec3& d : dirs) d = normalized(d);
  }

  RayTracerCore core(scene, tx, params);

  const int n = static_cast<int>(dirs.size());
  int n_threads = params.n_threads > 0
                      ? params.n_threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, std::max(1, n));

  std::vector<std::vector<Candidate>> per_index(static_cast<size_t>(n));
  std::vector<RayTracerCore::Ledger> ledgers(static_cast<size_t>(n_threads),
                                             core.make_ledger());

  auto worker = [&](int thread_id) {
    for (int i = thread_id; i < n; i += n_threads) {
      core.trace_one(i, dirs[static_cast<size_t>(i)], &per_index[static_cast<size_t>(i)],
                     &ledgers[static_cast<size_t>(thread_id)]);
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  TraceResult result;
  result.panel_impinging_dbm = core.make_ledger();
  for (const auto& ledger : ledgers)
    for (size_t p = 0; p < ledger.size(); ++p)
      for (size_t i = 0; i < ledger[p].size(); ++i)
        result.panel_impinging_dbm[p][i] =
            std::max(result.panel_impinging_dbm[p][i], ledger[p][i]);

  // Merge adjacent rays of the same geometric path per receiver, keeping the
  // best-aligned representative.
  std::map<std::pair<int, std::vector<int32_t>>, Candidate> merged;
  for (auto& bucket : per_index) {
    for (auto& c : bucket) {
      auto key = std::make_pair(c.rx_id, c.signature);
      auto it = merged.find(key);
      if (it == merged.end()) {
        merged.emplace(std::move(key), std::move(c));
      } else {
        const int bundle =
            std::min(it->second.bundle_min_launch, c.bundle_min_launch);
        if (c.miss_distance < it->second.miss_distance ||
            (c.miss_distance == it->second.miss_distance &&
             c.launch_index < it->second.launch_index)) {
          it->second = std::move(c);
        }
        it->second.bundle_min_launch = bundle;
      }
    }
  }

  result.paths.reserve(merged.size());
  for (auto& [key, c] : merged) {
    RayPath p;
    p.rx_id = c.rx_id;
    p.launch_index = c.launch_index;
    p.bundle_min_launch = c.bundle_min_launch;
    p.bounce_points = std::move(c.bounce_points);
    p.bounce_tiles = std::move(c.bounce_tiles);
    p.capture_point = c.capture_point;
    p.arrival_dir = c.arrival_dir;
    p.power_dbm = c.power_dbm;
    p.delay_s = c.delay_s;
    p.phase_rad = c.phase_rad;
    p.collimated_since = c.collimated_since;
    p.miss_distance_m = c.miss_distance;
    p.bounce_impinging_dbm = std::move(c.bounce_impinging_dbm);
    result.paths.push_back(std::move(p));
  }
  std::sort(result.paths.begin(), result.paths.end(),
            [](const RayPath& a, const RayPath& b) {
              if (a.rx_id != b.rx_id) return a.rx_id < b.rx_id;
              if (a.launch_index != b.launch_index) return a.launch_index < b.launch_index;
              return a.delay_s < b.delay_s;
            });
  return result;
}

double power_at(const Receiver& rx, const std::vector<RayPath>& paths) {
  std::vector<double> powers;
  for (const RayPath& p : paths)
    if (p.rx_id == rx.id) powers.push_back(p.power_dbm);
  return incoherent_sum_dbm(powers);
}

PowerDelayProfile pdp_at(const Receiver& rx, const std::vector<RayPath>& paths) {
  PowerDelayProfile pdp;
  pdp.rx_id = rx.id;
  for (const RayPath& p : paths) {
    if (p.rx_id != rx.id) continue;
    pdp.entries.push_back(
        PdpEntry{p.bundle_min_launch, p.delay_s, p.power_dbm, p.phase_rad});
  }
  std::sort(pdp.entries.begin(), pdp.entries.end(),
            [](const PdpEntry& a, const PdpEntry& b) {
              if (a.delay_s != b.delay_s) return a.delay_s < b.delay_s;
              return a.path_id < b.path_id;
            });
  return pdp;
}

std::vector<double> pdp_delays_mod_period(const PowerDelayProfile& pdp, double f_c_hz) {
  std::vector<double> out;
  if (pdp.entries.empty()) return out;
  const double period = 1.0 / f_c_hz;
  const double t0 = pdp.entries.front().delay_s;
  out.reserve(pdp.entries.size());
  for (const PdpEntry& e : pdp.entries) {
    double dt = std::fmod(e.delay_s - t0, period);
    if (dt < 0.0) dt += period;
    out.push_back(dt);
  }
  return out;
}

double delay_spread(const Receiver& rx, const std::vector<RayPath>& paths) {
  std::vector<const RayPath*> mine;
  for (const RayPath& p : paths)
    if (p.rx_id == rx.id) mine.push_back(&p);
  if (mine.size() <= 1) return 0.0;
  double strongest = kPowerFloorDbm;
  for (const RayPath* p : mine) strongest = std::max(strongest, p->power_dbm);
  double t_min = 1e300, t_max = -1e300;
  for (const RayPath* p : mine) {
    if (p->power_dbm < strongest - kDelaySpreadGateDb) continue;
    t_min = std::min(t_min, p->delay_s);
    t_max = std::max(t_max, p->delay_s);
  }
  return t_max > t_min ? t_max - t_min : 0.0;
}

CoherentSum coherent_power_at(const Receiver& rx, const std::vector<RayPath>& paths,
                              double f_c_hz,
                              const std::vector<std::pair<int, double>>* extra_offsets) {
  std::vector<PathContribution> contributions;
  for (const RayPath& p : paths) {
    if (p.rx_id != rx.id) continue;
    PathContribution c;
    c.amplitude = std::pow(10.0, p.power_dbm / 20.0);
    c.delay_s = p.delay_s;
    c.phase_rad = p.phase_rad;
    c.path_id = p.bundle_min_launch;
    if (extra_offsets) {
      for (const auto& [id, off] : *extra_offsets)
        if (id == c.path_id) c.phase_rad = wrap_angle(c.phase_rad + off);
    }
    contributions.push_back(c);
  }
  return coherent_sum(contributions, f_c_hz);
}

}  // namespace pwe
