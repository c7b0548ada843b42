// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/security.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <set>

namespace pwe {

namespace {

// True when the open segment (a, b) crosses no opaque surface, tile or body.
// Bodies containing either endpoint are ignored (a device is not shadowed by
// its own holder's body).
bool segment_clear(const Floorplan& plan, const Vec3& a, const Vec3& b) {
  const double len = (b - a).norm();
  if (len < 1e-9) return false;
  const Vec3 dir = (b - a) / len;

  Vec3 origin = a;
  double consumed = 0.0;
  IntersectOptions opts;
  opts.skip_bodies_containing_origin = true;
  for (;;) {
    auto hit = intersect(origin, dir, plan, opts);
    if (!hit) return true;
    const double t = consumed + hit->distance;
    if (t >= len - 1e-6) return true;
    if (hit->kind == HitKind::kBody) {
      const BlockingSphere& body = plan.bodies[static_cast<size_t>(hit->index)];
      if (body.transparent || (body.center - b).norm() < body.radius) {
        consumed = t;
        origin = hit->point;
        continue;
      }
    }
    return false;
  }
}

}  // namespace

TileGraph build_tile_graph(const Scene& scene, const Transmitter& tx,
                           const Receiver& rx, const TileGraphOptions& options) {
  const Floorplan& plan = scene.plan;
  const int n_tiles = plan.tile_count();
  if (n_tiles == 0) throw Error(ErrorCode::kInvalidScene, "scene has no tiles");

  TileGraph g;
  g.adjacency.assign(static_cast<size_t>(n_tiles) + 2, {});
  g.node_tile_flat.assign(static_cast<size_t>(n_tiles) + 2, -1);
  g.node_position.assign(static_cast<size_t>(n_tiles) + 2, Vec3::Zero());
  g.node_position[TileGraph::kTxNode] = tx.position;
  g.node_position[TileGraph::kRxNode] = rx.position;

  std::vector<Vec3> centers(static_cast<size_t>(n_tiles));
  std::vector<Vec3> normals(static_cast<size_t>(n_tiles));
  for (int i = 0; i < n_tiles; ++i) {
    const Tile t = plan.tile_at_flat(i);
    centers[static_cast<size_t>(i)] = t.center;
    normals[static_cast<size_t>(i)] = t.geometric_normal;
    g.node_tile_flat[static_cast<size_t>(i) + 2] = i;
    g.node_position[static_cast<size_t>(i) + 2] = t.center;
  }

  auto add_edge = [&](int u, int v, double len) {
    g.adjacency[static_cast<size_t>(u)].push_back(TileGraph::Edge{v, len});
    g.adjacency[static_cast<size_t>(v)].push_back(TileGraph::Edge{u, len});
  };

  const double s_min = options.min_departure_sine;

  // Terminal edges.
  for (int i = 0; i < n_tiles; ++i) {
    const Vec3& c = centers[static_cast<size_t>(i)];
    const Vec3& n = normals[static_cast<size_t>(i)];
    {
      const Vec3 d = c - tx.position;
      const double len = d.norm();
      if (len > 1e-9) {
        const Vec3 u = d / len;
        const bool front = u.dot(n) <= -s_min;
        const bool in_lobe =
            options.assume_beamforming || antenna_gain(tx.antenna, u) > 0.0;
        if (front && in_lobe && segment_clear(plan, tx.position, c))
          add_edge(TileGraph::kTxNode, i + 2, len);
      }
    }
    {
      const Vec3 d = rx.position - c;
      const double len = d.norm();
      if (len > 1e-9) {
        const Vec3 u = d / len;
        const bool front = u.dot(n) >= s_min;
        const bool in_lobe =
            options.assume_beamforming || antenna_gain(rx.antenna, -u) > 0.0;
        if (front && in_lobe && segment_clear(plan, c, rx.position))
          add_edge(TileGraph::kRxNode, i + 2, len);
      }
    }
  }

  if (g.adjacency[TileGraph::kTxNode].empty())
    throw Error(ErrorCode::kNoLosTiles, "transmitter sees no usable tile");
  if (g.adjacency[TileGraph::kRxNode].empty())
    throw Error(ErrorCode::kNoLosTiles, "receiver sees no usable tile");

  // Tile-tile edges.
  for (int i = 0; i < n_tiles; ++i) {
    for (int j = i + 1; j < n_tiles; ++j) {
      const Vec3 d = centers[static_cast<size_t>(j)] - centers[static_cast<size_t>(i)];
      const double len = d.norm();
      if (len < 1e-9) continue;
      const Vec3 u = d / len;
      // The hop must leave tile i's front halfspace and arrive at tile j's.
      if (u.dot(normals[static_cast<size_t>(i)]) < s_min) continue;
      if (-u.dot(normals[static_cast<size_t>(j)]) < s_min) continue;
      if (!segment_clear(plan, centers[static_cast<size_t>(i)],
                         centers[static_cast<size_t>(j)]))
        continue;
      add_edge(i + 2, j + 2, len);
    }
  }

  for (auto& edges : g.adjacency)
    std::sort(edges.begin(), edges.end(),
              [](const TileGraph::Edge& a, const TileGraph::Edge& b) {
                return a.to < b.to;
              });
  return g;
}

namespace {

// Min-cost unit flow on the node-split graph; tile-disjointness is node
// capacity one. Successive shortest augmenting paths with potentials.
struct FlowGraph {
  struct Arc {
    int to;
    int rev;
    int cap;
    double cost;
  };
  std::vector<std::vector<Arc>> arcs;

  explicit FlowGraph(int n) : arcs(static_cast<size_t>(n)) {}

  void add(int u, int v, int cap, double cost) {
    arcs[static_cast<size_t>(u)].push_back(
        Arc{v, static_cast<int>(arcs[static_cast<size_t>(v)].size()), cap, cost});
    arcs[static_cast<size_t>(v)].push_back(
        Arc{u, static_cast<int>(arcs[static_cast<size_t>(u)].size()) - 1, 0, -cost});
  }
};

}  // namespace

std::vector<std::vector<int>> k_disjoint_paths(const TileGraph& graph, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  const int n = graph.node_count();
  // Split every tile node v into v_in (2v) and v_out (2v+1), capacity 1.
  // Terminals keep capacity k.
  const int N = 2 * n;
  FlowGraph fg(N);
  auto node_in = [](int v) { return 2 * v; };
  auto node_out = [](int v) { return 2 * v + 1; };
  for (int v = 0; v < n; ++v) {
    const bool terminal = v == TileGraph::kTxNode || v == TileGraph::kRxNode;
    fg.add(node_in(v), node_out(v), terminal ? k : 1, 0.0);
  }
  for (int v = 0; v < n; ++v)
    for (const TileGraph::Edge& e : graph.adjacency[static_cast<size_t>(v)])
      fg.add(node_out(v), node_in(e.to), 1, e.length_m);

  const int src = node_in(TileGraph::kTxNode);
  const int dst = node_out(TileGraph::kRxNode);

  std::vector<double> potential(static_cast<size_t>(N), 0.0);
  int found = 0;
  for (int iter = 0; iter < k; ++iter) {
    // Dijkstra over reduced costs; deterministic tie-break on node index.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(N), inf);
    std::vector<std::pair<int, int>> parent(static_cast<size_t>(N), {-1, -1});
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<size_t>(src)] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[static_cast<size_t>(u)] + 1e-12) continue;
      for (size_t ai = 0; ai < fg.arcs[static_cast<size_t>(u)].size(); ++ai) {
        const FlowGraph::Arc& a = fg.arcs[static_cast<size_t>(u)][ai];
        if (a.cap <= 0) continue;
        const double nd = dist[static_cast<size_t>(u)] + a.cost +
                          potential[static_cast<size_t>(u)] -
                          potential[static_cast<size_t>(a.to)];
        if (nd < dist[static_cast<size_t>(a.to)] - 1e-12) {
          dist[static_cast<size_t>(a.to)] = nd;
          parent[static_cast<size_t>(a.to)] = {u, static_cast<int>(ai)};
          pq.emplace(nd, a.to);
        }
      }
    }
    if (dist[static_cast<size_t>(dst)] == inf) break;
    for (int v = 0; v < N; ++v)
      if (dist[static_cast<size_t>(v)] < inf) potential[static_cast<size_t>(v)] += dist[static_cast<size_t>(v)];
    for (int v = dst; v != src;) {
      auto [u, ai] = parent[static_cast<size_t>(v)];
      FlowGraph::Arc& a = fg.arcs[static_cast<size_t>(u)][static_cast<size_t>(ai)];
      a.cap -= 1;
      fg.arcs[static_cast<size_t>(a.to)][static_cast<size_t>(a.rev)].cap += 1;
      v = u;
    }
    ++found;
  }

  if (found == 0) throw Error(ErrorCode::kNoPath, "no tile route exists");

  // Saturated edge arcs (positive cost, capacity exhausted) carry the flow;
  // walk them from the transmitter to decompose it into node paths.
  std::vector<std::vector<int>> used(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v)
    for (const FlowGraph::Arc& a : fg.arcs[static_cast<size_t>(node_out(v))])
      if (a.cost > 0.0 && a.cap == 0) used[static_cast<size_t>(v)].push_back(a.to / 2);
  for (auto& targets : used) std::sort(targets.begin(), targets.end());

  std::vector<std::vector<int>> paths;
  for (int p = 0; p < found; ++p) {
    std::vector<int> path{TileGraph::kTxNode};
    int v = TileGraph::kTxNode;
    int guard = 0;
    while (v != TileGraph::kRxNode && guard++ < N) {
      auto& targets = used[static_cast<size_t>(v)];
      if (targets.empty()) break;
      const int next = targets.front();
      targets.erase(targets.begin());
      path.push_back(next);
      v = next;
    }
    if (path.back() == TileGraph::kRxNode) paths.push_back(std::move(path));
  }

  std::sort(paths.begin(), paths.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  return paths;
}

Scene deploy_secure_route(const Scene& scene, const Transmitter& tx,
                          const Receiver& rx, const TileGraph& graph,
                          const std::vector<std::vector<int>>& paths,
                          bool collimate_first, std::optional<int> tile_budget,
                          RoutePlan* plan_out) {
  Scene out = scene;
  RoutePlan plan;
  plan.paths_requested = static_cast<int>(paths.size());

  int budget = tile_budget.value_or(std::numeric_limits<int>::max());
  for (const std::vector<int>& path : paths) {
    if (path.size() < 3 || path.front() != TileGraph::kTxNode ||
        path.back() != TileGraph::kRxNode)
      throw Error(ErrorCode::kInvalidArgument, "route must run TX -> tiles -> RX");
    const int interior = static_cast<int>(path.size()) - 2;
    if (interior > budget) continue;  // whole routes only
    budget -= interior;

    std::vector<TileId> route_tiles;
    Vec3 prev = tx.position;
    for (size_t i = 1; i + 1 < path.size(); ++i) {
      const int node = path[i];
      const int flat = graph.node_tile_flat[static_cast<size_t>(node)];
      if (flat < 0) throw Error(ErrorCode::kInvalidArgument, "interior node is not a tile");
      const Tile tile = out.plan.tile_at_flat(flat);
      const Vec3 next_pos = i + 2 < path.size()
                                ? graph.node_position[static_cast<size_t>(path[i + 1])]
                                : rx.position;
      const Vec3 in_dir = normalized(tile.center - prev);
      const Vec3 out_dir = normalized(next_pos - tile.center);
      // FORWARD_DIRECTION propagates when a hop is collinear pass-through.
      TileState& state = out.plan.state_at_flat(flat);
      Tile configured = apply_function(tile, TileFunction::steer(in_dir, out_dir), false);
      state = configured.state;
      if (collimate_first && i == 1) {
        Tile t2 = out.plan.tile_at_flat(flat);
        t2 = apply_function(t2, TileFunction::collimate(), true);
        state = t2.state;
      }
      route_tiles.push_back(tile.id);
      prev = tile.center;
      ++plan.tiles_deployed;
    }
    const Vec3 first_center =
        graph.node_position[static_cast<size_t>(path[1])];
    const Vec3 last_center =
        graph.node_position[static_cast<size_t>(path[path.size() - 2])];
    plan.launch_directions.push_back(normalized(first_center - tx.position));
    plan.arrival_directions.push_back(normalized(rx.position - last_center));
    plan.tile_routes.push_back(std::move(route_tiles));
    plan.node_paths.push_back(path);
  }

  if (plan_out) *plan_out = plan;
  return out;
}

namespace {

struct CommonPath {
  int id;
  double amp_eve;
  double amp_rx;
  double phase_eve;  // contribution angle at the eavesdropper before offsets
  double phase_rx;
};

double eve_power(const std::vector<CommonPath>& paths, const std::vector<double>& delta) {
  std::complex<double> sum(0.0, 0.0);
  for (size_t i = 0; i < paths.size(); ++i)
    sum += paths[i].amp_eve * std::polar(1.0, paths[i].phase_eve - delta[i]);
  return std::norm(sum);
}

double rx_power(const std::vector<CommonPath>& paths, const std::vector<double>& delta) {
  std::complex<double> sum(0.0, 0.0);
  for (size_t i = 0; i < paths.size(); ++i)
    sum += paths[i].amp_rx * std::polar(1.0, paths[i].phase_rx - delta[i]);
  return std::norm(sum);
}

}  // namespace

PhaseCancelResult phase_cancel(const PowerDelayProfile& pdp_eve,
                               const PowerDelayProfile& pdp_rx, double f_c_hz,
                               const PhaseCancelOptions& options) {
  // Entries present in both profiles, matched by path id.
  std::vector<CommonPath> common;
  for (const PdpEntry& e : pdp_eve.entries) {
    for (const PdpEntry& r : pdp_rx.entries) {
      if (r.path_id != e.path_id) continue;
      CommonPath c;
      c.id = e.path_id;
      c.amp_eve = std::pow(10.0, e.power_dbm / 20.0);
      c.amp_rx = std::pow(10.0, r.power_dbm / 20.0);
      c.phase_eve = wrap_angle(2.0 * kPi * f_c_hz * e.delay_s - e.phase_rad);
      c.phase_rx = wrap_angle(2.0 * kPi * f_c_hz * r.delay_s - r.phase_rad);
      common.push_back(c);
      break;
    }
  }
  if (common.empty())
    throw Error(ErrorCode::kNoCommonPaths, "profiles share no path ids");

  PhaseCancelResult result;
  const size_t n = common.size();
  std::vector<double> zero(n, 0.0);
  result.eve_before_dbm = linear_to_db(std::max(1e-300, eve_power(common, zero)));
  result.rx_before_dbm = linear_to_db(std::max(1e-300, rx_power(common, zero)));
  double aligned_amp = 0.0;
  for (const CommonPath& c : common) aligned_amp += c.amp_rx;
  const double aligned_lin = aligned_amp * aligned_amp;
  result.rx_aligned_dbm = linear_to_db(aligned_lin);

  if (n == 1) {
    result.offsets = {{common[0].id, 0.0}};
    result.eve_after_dbm = result.eve_before_dbm;
    result.rx_after_dbm = result.rx_before_dbm;
    result.cancellation_possible = false;
    return result;
  }

  const double step = options.grid_step_rad;
  const int n_steps = std::max(1, static_cast<int>(std::lround(2.0 * kPi / step)));
  const double rx_floor_lin = aligned_lin * db_to_linear(-options.rx_budget_db);

  auto max_offset = [&](size_t i) {
    if (!options.enforce_intermediate_bound) return 2.0 * kPi;
    int bounces = 4;
    auto it = options.bounce_counts.find(common[i].id);
    if (it != options.bounce_counts.end()) bounces = it->second;
    return std::min(2.0 * kPi, options.max_phase_per_bounce_rad * bounces);
  };

  auto snap = [&](double angle) {
    return wrap_angle(std::round(wrap_angle(angle) / step) * step);
  };

  // Receiver-aligning base: delta_i = phase_rx_i puts every arrival at angle
  // zero at the receiver.
  std::vector<double> base(n);
  for (size_t i = 0; i < n; ++i) base[i] = snap(common[i].phase_rx);

  // Near-equal-power paths are grouped (1 dB clusters, strongest first);
  // the search space is one grid rotation per group plus an antiphase flip
  // per path on top of the aligned base.
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (common[a].amp_eve != common[b].amp_eve) return common[a].amp_eve > common[b].amp_eve;
    return a < b;
  });
  std::vector<std::vector<size_t>> groups;
  for (size_t idx : order) {
    if (!groups.empty() && common[groups.back().front()].amp_eve /
                                   common[idx].amp_eve <=
                               std::pow(10.0, 1.0 / 20.0)) {
      groups.back().push_back(idx);
    } else {
      groups.push_back({idx});
    }
  }
  const size_t n_groups = groups.size();

  auto delta_of = [&](size_t path, double alpha, bool flip) {
    return snap(base[path] + alpha + (flip ? kPi : 0.0));
  };
  auto assemble = [&](const std::vector<double>& alpha,
                      const std::vector<uint32_t>& flips) {
    std::vector<double> delta(n);
    for (size_t g = 0; g < n_groups; ++g)
      for (size_t k = 0; k < groups[g].size(); ++k)
        delta[groups[g][k]] = delta_of(groups[g][k], alpha[g], (flips[g] >> k) & 1u);
    return delta;
  };
  auto feasible = [&](const std::vector<double>& delta) {
    for (size_t i = 0; i < n; ++i)
      if (delta[i] > max_offset(i)) return false;
    return rx_power(common, delta) >= rx_floor_lin;
  };

  double combos = 1.0;
  for (const auto& g : groups) combos *= n_steps * std::pow(2.0, double(g.size()));

  std::vector<double> best_delta = base;
  double best_eve = feasible(base) ? eve_power(common, base) : 1e300;

  if (combos <= 1.6e7) {
    // Exhaustive scan of the grouped space with per-group partial phasors.
    struct Option {
      std::complex<double> eve, rx;
      double alpha;
      uint32_t flips;
      bool bounded;
    };
    std::vector<std::vector<Option>> tables(n_groups);
    for (size_t g = 0; g < n_groups; ++g) {
      const auto& members = groups[g];
      for (int a = 0; a < n_steps; ++a) {
        for (uint32_t flips = 0; flips < (1u << members.size()); ++flips) {
          Option o{{0, 0}, {0, 0}, a * step, flips, true};
          for (size_t k = 0; k < members.size(); ++k) {
            const size_t i = members[k];
            const double d = delta_of(i, o.alpha, (flips >> k) & 1u);
            if (d > max_offset(i)) o.bounded = false;
            o.eve += common[i].amp_eve * std::polar(1.0, common[i].phase_eve - d);
            o.rx += common[i].amp_rx * std::polar(1.0, common[i].phase_rx - d);
          }
          if (o.bounded) tables[g].push_back(o);
        }
      }
    }
    std::vector<size_t> pick(n_groups, 0);
    std::vector<std::complex<double>> eve_pre(n_groups + 1, {0, 0});
    std::vector<std::complex<double>> rx_pre(n_groups + 1, {0, 0});
    size_t level = 0;
    while (true) {
      if (pick[level] == tables[level].size()) {
        if (level == 0) break;
        pick[level] = 0;
        --level;
        ++pick[level];
        continue;
      }
      eve_pre[level + 1] = eve_pre[level] + tables[level][pick[level]].eve;
      rx_pre[level + 1] = rx_pre[level] + tables[level][pick[level]].rx;
      if (level + 1 == n_groups) {
        if (std::norm(rx_pre[level + 1]) >= rx_floor_lin &&
            std::norm(eve_pre[level + 1]) < best_eve - 1e-18) {
          best_eve = std::norm(eve_pre[level + 1]);
          std::vector<double> alpha(n_groups);
          std::vector<uint32_t> flips(n_groups);
          for (size_t g = 0; g < n_groups; ++g) {
            alpha[g] = tables[g][pick[g]].alpha;
            flips[g] = tables[g][pick[g]].flips;
          }
          best_delta = assemble(alpha, flips);
        }
        ++pick[level];
      } else {
        ++level;
      }
    }
  } else {
    // Large profiles: coordinate descent over the group variables.
    std::vector<double> alpha(n_groups, 0.0);
    std::vector<uint32_t> flips(n_groups, 0);
    auto try_assign = [&](const std::vector<double>& a,
                          const std::vector<uint32_t>& f) {
      const std::vector<double> delta = assemble(a, f);
      if (!feasible(delta)) return;
      const double e = eve_power(common, delta);
      if (e < best_eve - 1e-18) {
        best_eve = e;
        best_delta = delta;
        alpha = a;
        flips = f;
      }
    };
    try_assign(alpha, flips);
    for (int pass = 0; pass < 8; ++pass) {
      const double before_pass = best_eve;
      for (size_t g = 0; g < n_groups; ++g) {
        std::vector<double> a = alpha;
        for (int st = 0; st < n_steps; ++st) {
          a[g] = st * step;
          try_assign(a, flips);
        }
        std::vector<uint32_t> f = flips;
        for (size_t k = 0; k < groups[g].size(); ++k) {
          f = flips;
          f[g] ^= (1u << k);
          try_assign(alpha, f);
        }
      }
      if (best_eve >= before_pass - 1e-18) break;
    }
  }

  if (best_eve > 1e299) {
    // Not even the aligned base satisfied the budget; fall back to no-op.
    best_delta = zero;
    best_eve = eve_power(common, zero);
    result.cancellation_possible = false;
  }

  result.offsets.reserve(n);
  for (size_t i = 0; i < n; ++i)
    result.offsets.emplace_back(common[i].id, best_delta[i]);
  result.eve_after_dbm = linear_to_db(std::max(1e-300, best_eve));
  result.rx_after_dbm =
      linear_to_db(std::max(1e-300, rx_power(common, best_delta)));
  return result;
}

}  // namespace pwe
