// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pwe/optimizer.hpp"
#include "pwe/scenario.hpp"
#include "test_util.hpp"

using namespace pwe;

namespace {

Objective case_a() {
  Objective o;
  o.kind = ObjectiveKind::kCaseAMaxMinPower;
  return o;
}

}  // namespace

TEST_CASE("deploy_genome validation and effect") {
  test::ToyScene toy = test::make_one_tile_scene();
  const auto rep = enumerate_repertoire();

  Genome wrong_len{{1, 2}};
  CHECK_THROWS_AS(deploy_genome(&toy.scene.plan, wrong_len, rep), Error);
  Genome bad_gene{{26}};
  CHECK_THROWS_AS(deploy_genome(&toy.scene.plan, bad_gene, rep), Error);

  Genome g{{7}};
  deploy_genome(&toy.scene.plan, g, rep);
  const Tile expect = apply_function(toy.scene.plan.tile_at_flat(0), rep[7]);
  CHECK((toy.scene.plan.state_at_flat(0).virtual_normal -
         expect.state.virtual_normal)
            .norm() < 1e-12);

  // Genome index -> function -> index round trip.
  for (int gene : {0, 7, 12, 25})
    CHECK(repertoire_index_of(rep[static_cast<size_t>(gene)]) == gene);
}

TEST_CASE("only the matching configuration connects the toy receiver") {
  const test::ToyScene toy = test::make_one_tile_scene();
  const auto rep = enumerate_repertoire();
  const TraceParams params = test::toy_trace_params();

  double best = -1e300;
  int best_gene = -1;
  for (int gene = 0; gene < 26; ++gene) {
    const EvalResult ev =
        evaluate(Genome{{gene}}, toy.scene, toy.tx, case_a(), params, rep);
    if (ev.fitness > best) {
      best = ev.fitness;
      best_gene = gene;
    }
  }
  CHECK(best_gene == 7);
  CHECK(best > kPowerFloorDbm);
  const EvalResult other =
      evaluate(Genome{{6}}, toy.scene, toy.tx, case_a(), params, rep);
  CHECK(other.fitness < best - 20.0);
}

TEST_CASE("ga recovers the exhaustive optimum on the one-tile scene") {
  const test::ToyScene toy = test::make_one_tile_scene();
  const auto rep = enumerate_repertoire();
  const TraceParams params = test::toy_trace_params();

  GaParams ga;
  ga.population_size = 8;
  ga.generations = 20;
  ga.rng_seed = 1;
  const GaResult res = run_ga(toy.scene, toy.tx, case_a(), params, ga, rep);
  CHECK(res.best_genome.genes == std::vector<int>{7});

  // History is monotone non-decreasing thanks to elitism.
  for (size_t i = 1; i < res.history.size(); ++i)
    CHECK(res.history[i].best_fitness >= res.history[i - 1].best_fitness - 1e-12);
}

TEST_CASE("ga is reproducible for a fixed seed") {
  const test::ToyScene toy = test::make_one_tile_scene();
  const auto rep = enumerate_repertoire();
  const TraceParams params = test::toy_trace_params();
  GaParams ga;
  ga.population_size = 6;
  ga.generations = 5;
  ga.rng_seed = 42;
  const GaResult a = run_ga(toy.scene, toy.tx, case_a(), params, ga, rep);
  const GaResult b = run_ga(toy.scene, toy.tx, case_a(), params, ga, rep);
  CHECK(a.best_genome == b.best_genome);
  CHECK(a.best_fitness == b.best_fitness);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i)
    CHECK(a.history[i].best_fitness == b.history[i].best_fitness);

  ga.n_threads = 1;
  const GaResult c = run_ga(toy.scene, toy.tx, case_a(), params, ga, rep);
  CHECK(c.best_genome == a.best_genome);
}

TEST_CASE("evaluate is pure") {
  const test::ToyScene toy = test::make_one_tile_scene();
  const auto rep = enumerate_repertoire();
  const TraceParams params = test::toy_trace_params();
  const Genome g{{7}};
  const EvalResult a = evaluate(g, toy.scene, toy.tx, case_a(), params, rep);
  const EvalResult b = evaluate(g, toy.scene, toy.tx, case_a(), params, rep);
  CHECK(a.fitness == b.fitness);
  CHECK(a.rx_power_dbm == b.rx_power_dbm);
}

TEST_CASE("case B fitness and feasibility") {
  const test::ToyScene toy = test::make_one_tile_scene();
  const auto rep = enumerate_repertoire();
  const TraceParams params = test::toy_trace_params();

  Objective b;
  b.kind = ObjectiveKind::kCaseBMinMaxDelaySpread;
  const EvalResult connected = evaluate(Genome{{7}}, toy.scene, toy.tx, case_a(), params, rep);

  // Threshold below the achieved power: single path per receiver gives zero
  // delay spread and no penalty.
  b.power_threshold_dbm = connected.fitness - 10.0;
  const EvalResult ok = evaluate(Genome{{7}}, toy.scene, toy.tx, b, params, rep);
  CHECK(ok.feasible);
  CHECK(ok.fitness == doctest::Approx(0.0).epsilon(1e-9));

  // Threshold above: penalty of 10 ns per dB of violation.
  b.power_threshold_dbm = connected.fitness + 3.0;
  const EvalResult violated = evaluate(Genome{{7}}, toy.scene, toy.tx, b, params, rep);
  CHECK(!violated.feasible);
  CHECK(violated.fitness == doctest::Approx(-30.0).epsilon(1e-6));

  Objective missing;
  missing.kind = ObjectiveKind::kCaseBMinMaxDelaySpread;
  CHECK_THROWS_AS(evaluate(Genome{{7}}, toy.scene, toy.tx, missing, params, rep), Error);

  // An unreachable threshold flags the GA result infeasible.
  GaParams ga;
  ga.population_size = 4;
  ga.generations = 2;
  ga.rng_seed = 3;
  Objective impossible = b;
  impossible.power_threshold_dbm = 100.0;
  const GaResult res = run_ga(toy.scene, toy.tx, impossible, params, ga, rep);
  CHECK(res.infeasible);
}

TEST_CASE("multiuser objective weights and masking") {
  test::ToyScene toy = test::make_one_tile_scene();
  // Second receiver far from the steered beam.
  Receiver rx2;
  rx2.id = 1;
  rx2.position = Vec3(2, 16, 1.5);
  rx2.antenna = AntennaPattern::isotropic();
  rx2.capture_radius_m = 0.05;
  toy.scene.receivers.push_back(rx2);

  const auto rep = enumerate_repertoire();
  const TraceParams params = test::toy_trace_params();

  Objective mu;
  mu.kind = ObjectiveKind::kMultiuserWeightedPower;
  mu.weights = {1.0, 1.0};
  const Genome g{{7}};
  const EvalResult base = evaluate(g, toy.scene, toy.tx, mu, params, rep);

  // Doubling the first user's weight raises the fitness by its share.
  Objective heavy = mu;
  heavy.weights = {2.0, 1.0};
  const EvalResult heavier = evaluate(g, toy.scene, toy.tx, heavy, params, rep);
  CHECK(heavier.fitness > base.fitness);

  // Masking tiles away from user 0 removes its steered contribution.
  Objective masked = mu;
  masked.tile_partitions = {{}, {0}};
  const EvalResult m = evaluate(g, toy.scene, toy.tx, masked, params, rep);
  CHECK(m.fitness <= base.fitness);

  Objective wrong = mu;
  wrong.weights = {1.0};
  CHECK_THROWS_AS(evaluate(g, toy.scene, toy.tx, wrong, params, rep), Error);

  // Overlapping partitions violate the allocation constraint.
  Objective overlap = mu;
  overlap.tile_partitions = {{0}, {0}};
  CHECK_THROWS_AS(evaluate(g, toy.scene, toy.tx, overlap, params, rep), Error);
}

TEST_CASE("ga parameter validation") {
  const test::ToyScene toy = test::make_one_tile_scene();
  const auto rep = enumerate_repertoire();
  const TraceParams params = test::toy_trace_params();
  GaParams ga;
  ga.population_size = 1;
  CHECK_THROWS_AS(run_ga(toy.scene, toy.tx, case_a(), params, ga, rep), Error);
  ga.population_size = 4;
  ga.crossover_rate = 1.5;
  CHECK_THROWS_AS(run_ga(toy.scene, toy.tx, case_a(), params, ga, rep), Error);
}

TEST_CASE("heatmap sampling") {
  // Free-space row: power decreases monotonically with distance.
  Scene scene;
  scene.plan.bounds = Eigen::AlignedBox3d(Vec3(0, 0, 0), Vec3(40, 10, 5));
  Receiver probe;
  probe.id = 0;
  probe.position = Vec3::Zero();
  probe.antenna = AntennaPattern::isotropic();
  probe.capture_radius_m = 0.05;
  scene.receivers.push_back(probe);
  Transmitter tx;
  tx.position = Vec3(1, 5, 1.5);
  tx.antenna = AntennaPattern::isotropic();
  tx.power_dbm = 0.0;

  TraceParams params;
  params.max_bounces = 0;
  params.adaptive_capture = true;
  params.angular_resolution_deg = 1.0;

  HeatmapGrid grid;
  grid.x0 = 5;
  grid.x1 = 35;
  grid.nx = 7;
  grid.y0 = 5;
  grid.y1 = 5;
  grid.ny = 1;
  grid.z = 1.5;
  const Eigen::MatrixXd m = heatmap(scene, tx, params, grid);
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 7);
  for (int c = 1; c < 7; ++c) CHECK(m(0, c) < m(0, c - 1));

  // Fully blocked region reports the floor.
  Scene blocked = scene;
  blocked.plan.surfaces.emplace_back(Vec3(3, 0, 0), Vec3(0, 10, 0), Vec3(0, 0, 5));
  const Eigen::MatrixXd mb = heatmap(blocked, tx, params, grid);
  for (int c = 0; c < 7; ++c) CHECK(mb(0, c) == kPowerFloorDbm);

  const Eigen::MatrixXd up = bilinear_upsample(m, 3);
  CHECK(up.cols() == (7 - 1) * 3 + 1);
  CHECK(up(0, 0) == m(0, 0));
  CHECK(up(0, up.cols() - 1) == m(0, 6));
  CHECK(up(0, 3) == doctest::Approx(m(0, 1)));
}

TEST_CASE("heatmap over the corridor receiver grid") {
  const Scenario sc = make_corridor_scenario(60e9);
  const Scene scene = build_scene(sc);
  const Transmitter tx = build_transmitter(sc);
  TraceParams params = build_trace_params(sc);
  params.angular_resolution_deg = 3.0;
  params.n_threads = 2;

  HeatmapGrid grid;
  grid.x0 = 0.75;
  grid.x1 = 3.25;
  grid.nx = 2;
  grid.y0 = 1.25;
  grid.y1 = 13.75;
  grid.ny = 6;
  grid.z = 1.5;
  const Eigen::MatrixXd m = heatmap(scene, tx, params, grid);
  REQUIRE(m.rows() == 6);
  REQUIRE(m.cols() == 2);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 2; ++c) {
      CHECK(std::isfinite(m(r, c)));
      CHECK(m(r, c) >= kPowerFloorDbm);
    }
}
