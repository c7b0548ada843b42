// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#include "pwe/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "pwe/controlplane.hpp"
#include "pwe/optimizer.hpp"
#include "pwe/security.hpp"

namespace pwe {

using nlohmann::json;

namespace {

std::string fmt(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + dir + "/" + name);
  out << content;
}

std::string tile_list(const RayPath& path) {
  std::string s;
  for (size_t i = 0; i < path.bounce_tiles.size(); ++i) {
    if (i) s += ';';
    if (path.bounce_tiles[i])
      s += std::to_string(path.bounce_tiles[i]->row) + ':' +
           std::to_string(path.bounce_tiles[i]->col);
    else
      s += '.';
  }
  return s;
}

std::string paths_csv(const TraceResult& traced) {
  std::string csv = "rx_id,power_dbm,delay_ns,phase_rad,n_bounces,bounce_tiles\n";
  for (const RayPath& p : traced.paths) {
    csv += std::to_string(p.rx_id) + ',' + fmt(p.power_dbm, 2) + ',' +
           fmt(p.delay_s * 1e9, 4) + ',' + fmt(p.phase_rad, 6) + ',' +
           std::to_string(p.bounce_count()) + ',' + tile_list(p) + '\n';
  }
  return csv;
}

std::string powers_csv(const Scene& scene, const TraceResult& traced) {
  std::string csv = "rx_id,power_dbm,disconnected\n";
  for (const Receiver& rx : scene.receivers) {
    const double p = power_at(rx, traced.paths);
    const bool off = p <= kPowerFloorDbm;
    csv += std::to_string(rx.id) + ',' + fmt(off ? kPowerFloorDbm : p, 2) + ',' +
           (off ? "true" : "false") + '\n';
  }
  return csv;
}

std::string pdp_csv(const Scene& scene, const TraceResult& traced, double f_c) {
  std::string csv = "rx_id,path_id,delay_ns,power_dbm,phase_rad,delay_mod_period_ns\n";
  for (const Receiver& rx : scene.receivers) {
    const PowerDelayProfile pdp = pdp_at(rx, traced.paths);
    const std::vector<double> folded = pdp_delays_mod_period(pdp, f_c);
    for (size_t i = 0; i < pdp.entries.size(); ++i) {
      const PdpEntry& e = pdp.entries[i];
      csv += std::to_string(rx.id) + ',' + std::to_string(e.path_id) + ',' +
             fmt(e.delay_s * 1e9, 4) + ',' + fmt(e.power_dbm, 2) + ',' +
             fmt(e.phase_rad, 6) + ',' + fmt(folded[i] * 1e9, 4) + '\n';
    }
  }
  return csv;
}

Objective build_objective(const Scenario& scenario, const CommandOptions& options) {
  Objective obj;
  const std::string kind = options.objective.value_or(scenario.objective.kind);
  if (kind == "case-a") {
    obj.kind = ObjectiveKind::kCaseAMaxMinPower;
  } else if (kind == "case-b") {
    obj.kind = ObjectiveKind::kCaseBMinMaxDelaySpread;
  } else if (kind == "multiuser") {
    obj.kind = ObjectiveKind::kMultiuserWeightedPower;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown objective '" + kind + "'");
  }
  obj.power_threshold_dbm = options.threshold_dbm ? options.threshold_dbm
                                                  : scenario.objective.power_threshold_dbm;
  obj.weights = scenario.objective.weights;
  obj.power_split = scenario.objective.power_split;
  obj.tile_partitions = scenario.objective.tile_partitions;
  return obj;
}

TraceParams trace_params_for(const Scenario& scenario, const CommandOptions& options) {
  TraceParams p = build_trace_params(scenario);
  if (options.angular_resolution_deg) p.angular_resolution_deg = *options.angular_resolution_deg;
  p.n_threads = options.n_threads;
  return p;
}

Genome load_genome(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read genome file " + path);
  json j;
  in >> j;
  Genome g;
  g.genes = j.at("genome").get<std::vector<int>>();
  return g;
}

}  // namespace

int cmd_trace(const Scenario& scenario, const CommandOptions& options) {
  Scene scene = build_scene(scenario);
  const Transmitter tx = build_transmitter(scenario);
  TraceParams params = trace_params_for(scenario, options);

  if (options.genome_path) {
    const Genome genome = load_genome(*options.genome_path);
    deploy_genome(&scene.plan, genome, enumerate_repertoire(),
                  scenario.allow_function_stacking);
  }

  const TraceResult traced = trace(scene, tx, params);
  write_file(options.out_dir, "paths.csv", paths_csv(traced));
  write_file(options.out_dir, "powers.csv", powers_csv(scene, traced));
  write_file(options.out_dir, "pdp.csv", pdp_csv(scene, traced, params.carrier_freq_hz));
  return 0;
}

int cmd_optimize(const Scenario& scenario, const CommandOptions& options) {
  Scene scene = build_scene(scenario);
  const Transmitter tx = build_transmitter(scenario);
  const TraceParams params = trace_params_for(scenario, options);
  const Objective objective = build_objective(scenario, options);

  GaParams ga;
  ga.population_size = options.ga_population.value_or(scenario.ga.population);
  ga.generations = options.ga_generations.value_or(scenario.ga.generations);
  ga.tournament_k = scenario.ga.tournament_k;
  ga.crossover_rate = scenario.ga.crossover_rate;
  ga.mutation_rate_per_gene = scenario.ga.mutation_rate_per_gene;
  ga.rng_seed = options.seed.value_or(scenario.seed);
  ga.elitism_count = scenario.ga.elitism;
  ga.n_threads = options.n_threads;

  const auto repertoire = enumerate_repertoire();
  const GaResult result = run_ga(scene, tx, objective, params, ga, repertoire);

  json best;
  best["objective"] = options.objective.value_or(scenario.objective.kind);
  best["seed"] = ga.rng_seed;
  best["fitness"] = result.best_fitness;
  best["genome"] = result.best_genome.genes;
  best["rx_power_dbm"] = result.best_eval.rx_power_dbm;
  best["rx_delay_spread_ns"] = result.best_eval.rx_delay_spread_ns;
  best["feasible"] = result.best_eval.feasible;
  best["infeasible"] = result.infeasible;
  write_file(options.out_dir, "best.json", best.dump(2) + "\n");

  std::string history = "generation,best_fitness\n";
  for (const GaHistoryEntry& h : result.history)
    history += std::to_string(h.generation) + ',' + fmt(h.best_fitness, 4) + '\n';
  write_file(options.out_dir, "history.csv", history);

  // Heatmap over the receiver plane of the optimized configuration.
  Scene deployed = scene;
  deploy_genome(&deployed.plan, result.best_genome, repertoire,
                scenario.allow_function_stacking);
  double z = scene.receivers.empty() ? 1.5 : scene.receivers.front().position.z();
  HeatmapGrid grid;
  const Vec3 lo = scene.plan.bounds.min();
  const Vec3 hi = scene.plan.bounds.max();
  grid.x0 = lo.x() + 0.5;
  grid.x1 = hi.x() - 0.5;
  grid.nx = std::max(2, static_cast<int>(hi.x() - lo.x()));
  grid.y0 = lo.y() + 0.5;
  grid.y1 = hi.y() - 0.5;
  grid.ny = std::max(2, static_cast<int>(hi.y() - lo.y()));
  grid.z = z;
  const Eigen::MatrixXd map = heatmap(deployed, tx, params, grid);
  std::string hm = "x,y,z,power_dbm,disconnected\n";
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double fx = grid.nx > 1 ? static_cast<double>(ix) / (grid.nx - 1) : 0.0;
      const double fy = grid.ny > 1 ? static_cast<double>(iy) / (grid.ny - 1) : 0.0;
      const double x = grid.x0 + fx * (grid.x1 - grid.x0);
      const double y = grid.y0 + fy * (grid.y1 - grid.y0);
      const double p = map(iy, ix);
      const bool off = p <= kPowerFloorDbm;
      hm += fmt(x, 2) + ',' + fmt(y, 2) + ',' + fmt(grid.z, 2) + ',' +
            fmt(off ? kPowerFloorDbm : p, 2) + ',' + (off ? "true" : "false") + '\n';
    }
  }
  write_file(options.out_dir, "heatmap.csv", hm);

  if (result.infeasible) {
    std::cerr << "INFEASIBLE: best genome violates the power threshold\n";
    return 3;
  }
  return 0;
}

namespace {

json vec3j(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string secure_results_csv(const Scene& scene, const TraceResult& traced,
                               double f_c, int eve_id) {
  std::string csv = "rx_id,kind,power_dbm,coherent_power_dbm,disconnected\n";
  for (const Receiver& rx : scene.receivers) {
    const double p = power_at(rx, traced.paths);
    const CoherentSum coh = coherent_power_at(rx, traced.paths, f_c);
    const bool off = p <= kPowerFloorDbm;
    csv += std::to_string(rx.id) + ',' +
           (rx.id == eve_id ? "eavesdropper" : "intended") + ',' +
           fmt(off ? kPowerFloorDbm : p, 2) + ',' + fmt(coh.power_dbm, 2) + ',' +
           (off ? "true" : "false") + '\n';
  }
  return csv;
}

}  // namespace

int cmd_secure(const Scenario& scenario, const CommandOptions& options) {
  Scene scene = build_scene(scenario);
  const Transmitter tx = build_transmitter(scenario);
  TraceParams params = trace_params_for(scenario, options);

  // Intended receiver: first non-eavesdropper; eavesdropper: first flagged.
  int rx_idx = -1, eve_idx = -1;
  for (size_t i = 0; i < scenario.receivers.size(); ++i) {
    if (scenario.receivers[i].eavesdropper) {
      if (eve_idx < 0) eve_idx = static_cast<int>(i);
    } else if (rx_idx < 0) {
      rx_idx = static_cast<int>(i);
    }
  }
  if (rx_idx < 0 || eve_idx < 0)
    throw Error(ErrorCode::kInvalidScene,
                "secure mode needs an intended receiver and an eavesdropper");
  const Receiver& intended = scene.receivers[static_cast<size_t>(rx_idx)];
  const Receiver& eve = scene.receivers[static_cast<size_t>(eve_idx)];

  if (options.secure_mode == "route") {
    const TileGraph graph = build_tile_graph(scene, tx, intended);
    std::vector<std::vector<int>> paths;
    try {
      paths = k_disjoint_paths(graph, options.k_paths);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoPath) {
        std::cerr << "NO_PATH: " << e.what() << "\n";
        return 1;
      }
      throw;
    }
    if (static_cast<int>(paths.size()) < options.k_paths)
      std::cerr << "warning: graph max-flow " << paths.size() << " < requested k "
                << options.k_paths << "\n";

    RoutePlan plan;
    Scene routed = deploy_secure_route(scene, tx, intended, graph, paths, true,
                                       std::nullopt, &plan);

    // Devices beamform at their routes: the transmitter launches exactly one
    // collimated beam axis per route, the receiver re-aims at the last hop.
    Transmitter routed_tx = tx;
    Vec3 tx_aim = Vec3::Zero();
    for (const Vec3& d : plan.launch_directions) tx_aim += d;
    if (tx_aim.norm() > 1e-9 && routed_tx.antenna.kind != AntennaKind::kIsotropic)
      routed_tx.antenna.boresight = normalized(tx_aim);
    Vec3 rx_aim = Vec3::Zero();
    for (const Vec3& d : plan.arrival_directions) rx_aim += d;
    if (rx_aim.norm() > 1e-9) {
      Receiver& r = routed.receivers[static_cast<size_t>(rx_idx)];
      if (r.antenna.kind != AntennaKind::kIsotropic)
        r.antenna.boresight = normalized(-rx_aim);
    }

    TraceParams routed_params = params;
    routed_params.launch_directions = plan.launch_directions;
    routed_params.adaptive_capture = false;
    const TraceResult traced = trace(routed, routed_tx, routed_params);

    json plan_json;
    plan_json["mode"] = "route";
    plan_json["k_requested"] = options.k_paths;
    plan_json["k_found"] = plan.tile_routes.size();
    plan_json["tiles_deployed"] = plan.tiles_deployed;
    plan_json["routes"] = json::array();
    for (const auto& route : plan.tile_routes) {
      json r = json::array();
      for (const TileId& id : route) r.push_back(json::array({id.row, id.col}));
      plan_json["routes"].push_back(r);
    }
    plan_json["launch_directions"] = json::array();
    for (const Vec3& d : plan.launch_directions)
      plan_json["launch_directions"].push_back(vec3j(d));
    write_file(options.out_dir, "plan.json", plan_json.dump(2) + "\n");
    write_file(options.out_dir, "results.csv",
               secure_results_csv(routed, traced, params.carrier_freq_hz, eve.id));
    return 0;
  }

  if (options.secure_mode == "phase") {
    const TraceResult traced = trace(scene, tx, params);
    PowerDelayProfile pdp_eve = pdp_at(eve, traced.paths);
    PowerDelayProfile pdp_rx = pdp_at(intended, traced.paths);

    // Phase control works on the significant shared rays; keep the strongest
    // common arrivals (by eavesdropped power) and drop the long tail.
    {
      std::vector<std::pair<double, int>> ranked;
      for (const PdpEntry& e : pdp_eve.entries)
        for (const PdpEntry& r : pdp_rx.entries)
          if (r.path_id == e.path_id) {
            ranked.emplace_back(-e.power_dbm, e.path_id);
            break;
          }
      std::sort(ranked.begin(), ranked.end());
      if (ranked.size() > 32) ranked.resize(32);
      auto keep = [&](const PdpEntry& e) {
        for (const auto& [neg, id] : ranked)
          if (id == e.path_id) return true;
        return false;
      };
      auto filter = [&](PowerDelayProfile& pdp) {
        std::vector<PdpEntry> kept;
        for (const PdpEntry& e : pdp.entries)
          if (keep(e)) kept.push_back(e);
        pdp.entries = std::move(kept);
      };
      filter(pdp_eve);
      filter(pdp_rx);
    }

    json plan_json;
    plan_json["mode"] = "phase";
    std::string results = "rx_id,kind,stage,coherent_power_dbm\n";
    try {
      const PhaseCancelResult res =
          phase_cancel(pdp_eve, pdp_rx, params.carrier_freq_hz);
      plan_json["cancellation_possible"] = res.cancellation_possible;
      plan_json["eve_before_dbm"] = fmt(res.eve_before_dbm, 2);
      plan_json["eve_after_dbm"] = fmt(res.eve_after_dbm, 2);
      plan_json["rx_before_dbm"] = fmt(res.rx_before_dbm, 2);
      plan_json["rx_after_dbm"] = fmt(res.rx_after_dbm, 2);
      plan_json["rx_aligned_dbm"] = fmt(res.rx_aligned_dbm, 2);
      plan_json["offsets"] = json::array();
      for (const auto& [id, off] : res.offsets) {
        json o;
        o["path_id"] = id;
        o["offset_rad"] = off;
        plan_json["offsets"].push_back(o);
      }

      // Whole-profile coherent totals: offsets act on the shared rays, the
      // untouched remainder keeps its phase.
      const CoherentSum eve_total0 =
          coherent_power_at(eve, traced.paths, params.carrier_freq_hz);
      const CoherentSum eve_total1 = coherent_power_at(
          eve, traced.paths, params.carrier_freq_hz, &res.offsets);
      const CoherentSum rx_total0 =
          coherent_power_at(intended, traced.paths, params.carrier_freq_hz);
      const CoherentSum rx_total1 = coherent_power_at(
          intended, traced.paths, params.carrier_freq_hz, &res.offsets);
      plan_json["eve_total_before_dbm"] = fmt(eve_total0.power_dbm, 2);
      plan_json["eve_total_after_dbm"] = fmt(eve_total1.power_dbm, 2);
      plan_json["rx_total_before_dbm"] = fmt(rx_total0.power_dbm, 2);
      plan_json["rx_total_after_dbm"] = fmt(rx_total1.power_dbm, 2);

      results += std::to_string(eve.id) + ",eavesdropper,before," +
                 fmt(eve_total0.power_dbm, 2) + '\n';
      results += std::to_string(eve.id) + ",eavesdropper,after," +
                 fmt(eve_total1.power_dbm, 2) + '\n';
      results += std::to_string(intended.id) + ",intended,before," +
                 fmt(rx_total0.power_dbm, 2) + '\n';
      results += std::to_string(intended.id) + ",intended,after," +
                 fmt(rx_total1.power_dbm, 2) + '\n';
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoCommonPaths) throw;
      plan_json["cancellation_possible"] = false;
      plan_json["error"] = "NO_COMMON_PATHS";
      std::cerr << "NO_COMMON_PATHS: " << e.what() << "\n";
    }
    write_file(options.out_dir, "plan.json", plan_json.dump(2) + "\n");
    write_file(options.out_dir, "results.csv", results);
    write_file(options.out_dir, "pdp.csv",
               pdp_csv(scene, traced, params.carrier_freq_hz));
    return 0;
  }

  throw Error(ErrorCode::kInvalidArgument,
              "unknown secure mode '" + options.secure_mode + "'");
}

int cmd_controlplane_demo(const Scenario& scenario, const CommandOptions& options,
                          const std::optional<std::string>& callbacks_path) {
  const Scene scene = build_scene(scenario);
  TileNetwork net(scene.plan, {}, generate_config_table());

  json batch = json::array();
  if (callbacks_path) {
    std::ifstream in(*callbacks_path);
    if (!in)
      throw Error(ErrorCode::kInvalidArgument, "cannot read " + *callbacks_path);
    in >> batch;
  } else {
    // Demo batch: steer two tiles, absorb one, then address a bogus tile.
    batch = json::array(
        {json{{"tile_id", {0, 0}}, {"action", "STEER"}, {"I", {1, 0, 0}}, {"O", {0, 0, 1}}},
         json{{"tile_id", {1, 5}}, {"action", "STEER"}, {"az_deg", 15}, {"el_deg", -15}},
         json{{"tile_id", {2, 3}}, {"action", "ABSORB"}},
         json{{"tile_id", {99, 99}}, {"action", "ABSORB"}}});
  }

  json outcomes = json::array();
  for (const json& cj : batch) {
    Callback cb;
    json outcome;
    try {
      const auto& tid = cj.at("tile_id");
      cb.tile_id = TileId{tid.at(0).get<int>(), tid.at(1).get<int>()};
      const std::string action = cj.at("action").get<std::string>();
      if (action == "STEER") {
        cb.action = TileAction::kSteer;
        if (cj.contains("az_deg")) {
          cb.parameters = TileFunction::steer_angles(cj.at("az_deg").get<double>(),
                                                     cj.at("el_deg").get<double>());
        } else {
          const auto& I = cj.at("I");
          const auto& O = cj.at("O");
          cb.parameters = TileFunction::steer(
              Vec3(I.at(0).get<double>(), I.at(1).get<double>(), I.at(2).get<double>()),
              Vec3(O.at(0).get<double>(), O.at(1).get<double>(), O.at(2).get<double>()));
        }
      } else if (action == "ABSORB") {
        cb.action = TileAction::kAbsorb;
        cb.parameters = TileFunction::absorb();
      } else if (action == "COLLIMATE") {
        cb.action = TileAction::kCollimate;
        cb.parameters = TileFunction::collimate();
      } else if (action == "PHASE_ALTER") {
        cb.action = TileAction::kPhaseAlter;
        cb.parameters = TileFunction::phase_alter(cj.at("phase_rad").get<double>());
      } else {
        throw Error(ErrorCode::kBadParameters, "unknown action '" + action + "'");
      }
      if (cj.contains("token")) cb.token = cj.at("token").get<uint64_t>();
      const DispatchOutcome res = net.dispatch(cb);
      outcome["tile_id"] = {cb.tile_id.row, cb.tile_id.col};
      outcome["status"] = res.ok ? "ACK" : error_code_name(res.error);
      outcome["hops"] = res.hops;
      if (!res.ok) outcome["message"] = res.message;
    } catch (const Error& e) {
      outcome["status"] = error_code_name(e.code());
      outcome["message"] = e.what();
    } catch (const json::exception& e) {
      outcome["status"] = "BAD_PARAMETERS";
      outcome["message"] = e.what();
    }
    outcomes.push_back(outcome);
  }

  write_file(options.out_dir, "outcomes.json", outcomes.dump(2) + "\n");
  std::cout << outcomes.dump(2) << "\n";
  return 0;
}

}  // namespace pwe
