// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <thread>

namespace pwe {

namespace {

uint64_t rand_below(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

// Selection order: fitness first, then mean receiver power. The secondary
// key only matters when fitness ties exactly, which happens on the flat
// region where some receiver sits at the disconnection floor; it steers the
// search toward genomes that power more of the grid.
bool better(const EvalResult& a, const EvalResult& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.mean_power_dbm > b.mean_power_dbm;
}

}  // namespace

void deploy_genome(Floorplan* plan, const Genome& genome,
                   const std::vector<TileFunction>& repertoire, bool allow_stacking) {
  const int n = plan->tile_count();
  if (static_cast<int>(genome.genes.size()) != n)
    throw Error(ErrorCode::kInvalidArgument, "genome length != tile count");
  for (int i = 0; i < n; ++i) {
    const int gene = genome.genes[static_cast<size_t>(i)];
    if (gene < 0 || gene >= static_cast<int>(repertoire.size()))
      throw Error(ErrorCode::kInvalidArgument, "gene index out of repertoire range");
    Tile tile = plan->tile_at_flat(i);
    tile = apply_function(tile, repertoire[static_cast<size_t>(gene)], allow_stacking);
    plan->state_at_flat(i) = tile.state;
  }
}

namespace {

EvalResult score(const Scene& scene, const Objective& objective,
                 const TraceResult& traced) {
  EvalResult out;
  const size_t n_rx = scene.receivers.size();
  out.rx_power_dbm.resize(n_rx);
  out.rx_delay_spread_ns.resize(n_rx);
  for (size_t i = 0; i < n_rx; ++i) {
    out.rx_power_dbm[i] = power_at(scene.receivers[i], traced.paths);
    out.rx_delay_spread_ns[i] = delay_spread(scene.receivers[i], traced.paths) * 1e9;
  }
  double mean = 0.0;
  for (double p : out.rx_power_dbm) mean += p;
  out.mean_power_dbm = n_rx ? mean / static_cast<double>(n_rx) : kPowerFloorDbm;

  switch (objective.kind) {
    case ObjectiveKind::kCaseAMaxMinPower: {
      double min_p = n_rx ? 1e300 : kPowerFloorDbm;
      for (double p : out.rx_power_dbm) min_p = std::min(min_p, p);
      out.fitness = min_p;
      break;
    }
    case ObjectiveKind::kCaseBMinMaxDelaySpread: {
      if (!objective.power_threshold_dbm)
        throw Error(ErrorCode::kBadParameters, "case B needs power_threshold_dbm");
      double max_ds = 0.0;
      double penalty = 0.0;
      for (size_t i = 0; i < n_rx; ++i) {
        max_ds = std::max(max_ds, out.rx_delay_spread_ns[i]);
        penalty += std::max(0.0, *objective.power_threshold_dbm - out.rx_power_dbm[i]);
      }
      out.feasible = penalty == 0.0;
      out.fitness = -max_ds - kCaseBPenaltyNsPerDb * penalty;
      break;
    }
    case ObjectiveKind::kMultiuserWeightedPower: {
      if (objective.weights.size() != n_rx)
        throw Error(ErrorCode::kBadParameters, "multiuser needs one weight per receiver");
      if (!objective.tile_partitions.empty()) {
        if (objective.tile_partitions.size() != n_rx)
          throw Error(ErrorCode::kBadParameters, "one tile partition per receiver");
        std::set<int> seen;
        size_t total = 0;
        for (const auto& part : objective.tile_partitions) {
          for (int t : part) {
            if (!seen.insert(t).second)
              throw Error(ErrorCode::kBadParameters, "tile partitions must be disjoint");
          }
          total += part.size();
        }
        if (total > static_cast<size_t>(scene.plan.tile_count()))
          throw Error(ErrorCode::kBadParameters, "tile allocations exceed the budget");
      }
      // Transmit-power split, projected onto the simplex sum <= 1.
      std::vector<double> split = objective.power_split;
      if (split.empty()) split.assign(n_rx, 1.0 / static_cast<double>(n_rx));
      if (split.size() != n_rx)
        throw Error(ErrorCode::kBadParameters, "power_split size mismatch");
      double ssum = 0.0;
      for (double w : split) ssum += std::max(0.0, w);
      if (ssum > 1.0)
        for (double& w : split) w = std::max(0.0, w) / ssum;

      double total = 0.0;
      for (size_t i = 0; i < n_rx; ++i) {
        const Receiver& rx = scene.receivers[i];
        double lin = 0.0;
        for (const RayPath& p : traced.paths) {
          if (p.rx_id != rx.id) continue;
          if (!objective.tile_partitions.empty()) {
            // Paths are attributed to the user owning their first tile
            // bounce; pure line-of-sight arrivals count for everyone.
            std::optional<int> first_tile;
            for (size_t b = 0; b < p.bounce_tiles.size() && !first_tile; ++b)
              if (p.bounce_tiles[b])
                first_tile = scene.plan.flat_index_of(*p.bounce_tiles[b]).value_or(-1);
            if (first_tile) {
              const auto& mine = objective.tile_partitions[i];
              if (std::find(mine.begin(), mine.end(), *first_tile) == mine.end())
                continue;
            }
          }
          lin += db_to_linear(p.power_dbm);
        }
        total += objective.weights[i] * split[i] * lin;
      }
      out.fitness = total;
      break;
    }
  }
  return out;
}

}  // namespace

EvalResult evaluate(const Genome& genome, const Scene& scene, const Transmitter& tx,
                    const Objective& objective, const TraceParams& trace_params,
                    const std::vector<TileFunction>& repertoire) {
  Scene work = scene;
  const bool stacking = false;
  deploy_genome(&work.plan, genome, repertoire, stacking);
  TraceResult traced = trace(work, tx, trace_params);
  return score(work, objective, traced);
}

GaResult run_ga(const Scene& scene, const Transmitter& tx, const Objective& objective,
                const TraceParams& trace_params, const GaParams& params,
                const std::vector<TileFunction>& repertoire) {
  if (params.population_size < 2)
    throw Error(ErrorCode::kInvalidArgument, "population must be at least 2");
  if (params.crossover_rate < 0.0 || params.crossover_rate > 1.0)
    throw Error(ErrorCode::kInvalidArgument, "crossover_rate out of [0, 1]");
  const int n_tiles = scene.plan.tile_count();
  if (n_tiles == 0) throw Error(ErrorCode::kInvalidScene, "scene has no tiles");
  const int n_cfg = static_cast<int>(repertoire.size());
  const double mutation_rate =
      params.mutation_rate_per_gene.value_or(1.0 / static_cast<double>(n_tiles));
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw Error(ErrorCode::kInvalidArgument, "mutation rate out of [0, 1]");

  std::mt19937_64 rng(params.rng_seed);
  const int pop_n = params.population_size;

  struct Individual {
    Genome genome;
    EvalResult eval;
    bool evaluated = false;
  };
  std::vector<Individual> pop(static_cast<size_t>(pop_n));
  for (Individual& ind : pop) {
    ind.genome.genes.resize(static_cast<size_t>(n_tiles));
    for (int g = 0; g < n_tiles; ++g)
      ind.genome.genes[static_cast<size_t>(g)] =
          static_cast<int>(rand_below(rng, static_cast<uint64_t>(n_cfg)));
  }

  // Population fitness in parallel over a read-only scene; each worker keeps
  // its own floorplan copy, results land by index.
  int n_threads = params.n_threads > 0
                      ? params.n_threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, pop_n);
  TraceParams eval_params = trace_params;
  eval_params.n_threads = 1;  // parallelism lives at the population level

  auto evaluate_population = [&](std::vector<Individual>& people) {
    auto worker = [&](int tid) {
      for (int i = tid; i < static_cast<int>(people.size()); i += n_threads) {
        Individual& ind = people[static_cast<size_t>(i)];
        if (ind.evaluated) continue;
        ind.eval = evaluate(ind.genome, scene, tx, objective, eval_params, repertoire);
        ind.evaluated = true;
      }
    };
    if (n_threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
  };

  GaResult result;
  evaluate_population(pop);

  auto rank = [&](const std::vector<Individual>& people) {
    std::vector<int> order(people.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return better(people[static_cast<size_t>(a)].eval,
                    people[static_cast<size_t>(b)].eval);
    });
    return order;
  };

  auto record_best = [&](int generation) {
    const std::vector<int> order = rank(pop);
    const Individual& best = pop[static_cast<size_t>(order[0])];
    result.history.push_back(GaHistoryEntry{generation, best.eval.fitness});
    if (result.history.size() == 1 || better(best.eval, result.best_eval)) {
      result.best_genome = best.genome;
      result.best_fitness = best.eval.fitness;
      result.best_eval = best.eval;
    }
  };

  record_best(0);

  for (int gen = 1; gen <= params.generations; ++gen) {
    const std::vector<int> order = rank(pop);
    std::vector<Individual> next;
    next.reserve(static_cast<size_t>(pop_n));
    const int elites = std::clamp(params.elitism_count, 0, pop_n);
    for (int e = 0; e < elites; ++e)
      next.push_back(pop[static_cast<size_t>(order[static_cast<size_t>(e)])]);

    auto tournament = [&]() -> const Individual& {
      int best_idx = static_cast<int>(rand_below(rng, static_cast<uint64_t>(pop_n)));
      for (int k = 1; k < params.tournament_k; ++k) {
        const int idx = static_cast<int>(rand_below(rng, static_cast<uint64_t>(pop_n)));
        if (better(pop[static_cast<size_t>(idx)].eval, pop[static_cast<size_t>(best_idx)].eval))
          best_idx = idx;
      }
      return pop[static_cast<size_t>(best_idx)];
    };

    while (static_cast<int>(next.size()) < pop_n) {
      const Individual& p1 = tournament();
      const Individual& p2 = tournament();
      Individual child;
      child.genome = p1.genome;
      const double cross_draw =
          static_cast<double>(rng()) / static_cast<double>(std::mt19937_64::max());
      if (cross_draw < params.crossover_rate) {
        for (size_t g = 0; g < child.genome.genes.size(); ++g)
          if (rng() & 1u) child.genome.genes[g] = p2.genome.genes[g];
      }
      for (size_t g = 0; g < child.genome.genes.size(); ++g) {
        const double mut_draw =
            static_cast<double>(rng()) / static_cast<double>(std::mt19937_64::max());
        if (mut_draw < mutation_rate)
          child.genome.genes[g] =
              static_cast<int>(rand_below(rng, static_cast<uint64_t>(n_cfg)));
      }
      next.push_back(std::move(child));
    }

    pop = std::move(next);
    evaluate_population(pop);
    record_best(gen);
  }

  if (objective.kind == ObjectiveKind::kCaseBMinMaxDelaySpread)
    result.infeasible = !result.best_eval.feasible;
  return result;
}

Eigen::MatrixXd heatmap(const Scene& scene, const Transmitter& tx,
                        const TraceParams& trace_params, const HeatmapGrid& grid) {
  if (grid.nx < 1 || grid.ny < 1)
    throw Error(ErrorCode::kInvalidArgument, "heatmap grid needs nx, ny >= 1");
  Scene probe_scene = scene;
  probe_scene.receivers.clear();
  AntennaPattern pattern = scene.receivers.empty() ? AntennaPattern::isotropic()
                                                   : scene.receivers.front().antenna;
  const double radius =
      scene.receivers.empty() ? 0.05 : scene.receivers.front().capture_radius_m;
  int id = 0;
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      Receiver rx;
      rx.id = id++;
      const double fx = grid.nx > 1 ? static_cast<double>(ix) / (grid.nx - 1) : 0.0;
      const double fy = grid.ny > 1 ? static_cast<double>(iy) / (grid.ny - 1) : 0.0;
      rx.position = Vec3(grid.x0 + fx * (grid.x1 - grid.x0),
                         grid.y0 + fy * (grid.y1 - grid.y0), grid.z);
      rx.antenna = pattern;
      rx.capture_radius_m = radius;
      probe_scene.receivers.push_back(rx);
    }
  }
  const TraceResult traced = trace(probe_scene, tx, trace_params);
  Eigen::MatrixXd out(grid.ny, grid.nx);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      out(iy, ix) = power_at(probe_scene.receivers[static_cast<size_t>(iy * grid.nx + ix)],
                             traced.paths);
  return out;
}

Eigen::MatrixXd bilinear_upsample(const Eigen::MatrixXd& m, int factor) {
  if (factor <= 1) return m;
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const int out_rows = (rows - 1) * factor + 1;
  const int out_cols = (cols - 1) * factor + 1;
  Eigen::MatrixXd out(std::max(out_rows, 1), std::max(out_cols, 1));
  for (int r = 0; r < out.rows(); ++r) {
    const double fr = static_cast<double>(r) / factor;
    const int r0 = std::min(static_cast<int>(fr), rows - 1);
    const int r1 = std::min(r0 + 1, rows - 1);
    const double wr = fr - r0;
    for (int c = 0; c < out.cols(); ++c) {
      const double fc = static_cast<double>(c) / factor;
      const int c0 = std::min(static_cast<int>(fc), cols - 1);
      const int c1 = std::min(c0 + 1, cols - 1);
      const double wc = fc - c0;
      out(r, c) = (1 - wr) * ((1 - wc) * m(r0, c0) + wc * m(r0, c1)) +
                  wr * ((1 - wc) * m(r1, c0) + wc * m(r1, c1));
    }
  }
  return out;
}

}  // namespace pwe
