// SPDX-License-Identifier: Apache-2.0
//
// pwesim: ray-traced simulation and optimization of programmable indoor
// wireless environments (metasurface-tiled floorplans).
//
// Licensed under the Apache License, Version 2.0. See the LICENSE file
// or http://www.apache.org/licenses/LICENSE-2.0 for details.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pwe/commands.hpp"
#include "pwe/scenario.hpp"

using namespace pwe;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pwe_cmd_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cmd_trace smoke box yields one LOS path per receiver") {
  const Scenario sc = make_box_scenario();
  CommandOptions opt;
  const fs::path dir = fresh_dir("trace_smoke");
  opt.out_dir = dir.string();
  CHECK(cmd_trace(sc, opt) == 0);

  const std::string powers = slurp(dir / "powers.csv");
  CHECK(count_lines(powers) == 3);  // header + 2 receivers
  CHECK(powers.find("disconnected") != std::string::npos);
  CHECK(powers.find("true") == std::string::npos);

  // Exactly one zero-bounce arrival per receiver.
  const std::string paths = slurp(dir / "paths.csv");
  int los = 0, rows = 0;
  std::stringstream ss(paths);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++rows;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() >= 5);
    if (fields[4] == "0") ++los;
  }
  CHECK(los == 2);
  CHECK(rows >= 2);
  CHECK(fs::exists(dir / "pdp.csv"));
}

TEST_CASE("cmd_trace outputs are byte-identical across runs") {
  const Scenario sc = make_box_scenario();
  CommandOptions a, b;
  const fs::path da = fresh_dir("trace_a");
  const fs::path db = fresh_dir("trace_b");
  a.out_dir = da.string();
  b.out_dir = db.string();
  CHECK(cmd_trace(sc, a) == 0);
  CHECK(cmd_trace(sc, b) == 0);
  for (const char* f : {"paths.csv", "powers.csv", "pdp.csv"})
    CHECK(slurp(da / f) == slurp(db / f));
}

TEST_CASE("cmd_optimize writes best genome, history and heatmap") {
  Scenario sc = make_box_scenario();
  sc.floorplan.tile_coverage = "walls";
  sc.floorplan.tile_side = 1.0;
  sc.trace.max_bounces = 2;
  sc.trace.angular_resolution_deg = 6.0;
  sc.objective.kind = "case-a";
  sc.ga.population = 4;
  sc.ga.generations = 2;

  CommandOptions opt;
  const fs::path dir = fresh_dir("optimize");
  opt.out_dir = dir.string();
  opt.seed = 5;
  CHECK(cmd_optimize(sc, opt) == 0);

  const auto best = nlohmann::json::parse(slurp(dir / "best.json"));
  CHECK(best.at("seed") == 5);
  CHECK(best.at("genome").size() == 72);  // 4 walls x 6 cols x 3 rows
  CHECK(best.at("rx_power_dbm").size() == 2);

  const std::string history = slurp(dir / "history.csv");
  CHECK(count_lines(history) == 4);  // header + generations 0..2

  const std::string heatmap = slurp(dir / "heatmap.csv");
  CHECK(count_lines(heatmap) > 1);

  // Tracing with the stored genome reproduces a valid run.
  CommandOptions topt;
  const fs::path tdir = fresh_dir("trace_genome");
  topt.out_dir = tdir.string();
  topt.genome_path = (dir / "best.json").string();
  CHECK(cmd_trace(sc, topt) == 0);
}

TEST_CASE("cmd_trace corridor plain setup reports disconnected receivers") {
  const Scenario sc = load_scenario("corridor-60ghz");
  CommandOptions opt;
  const fs::path dir = fresh_dir("trace_corridor");
  opt.out_dir = dir.string();
  opt.n_threads = 2;
  CHECK(cmd_trace(sc, opt) == 0);
  const std::string powers = slurp(dir / "powers.csv");
  CHECK(count_lines(powers) == 13);
  CHECK(powers.find("-250.00,true") != std::string::npos);
}

TEST_CASE("cmd_secure route and phase modes") {
  const Scenario sc = make_security_scenario();

  CommandOptions route;
  const fs::path rdir = fresh_dir("secure_route");
  route.out_dir = rdir.string();
  route.secure_mode = "route";
  route.k_paths = 2;
  CHECK(cmd_secure(sc, route) == 0);
  const auto plan = nlohmann::json::parse(slurp(rdir / "plan.json"));
  CHECK(plan.at("mode") == "route");
  CHECK(plan.at("k_found").get<int>() >= 1);
  CHECK(plan.at("routes").size() == plan.at("k_found").get<size_t>());
  const std::string results = slurp(rdir / "results.csv");
  CHECK(results.find("eavesdropper") != std::string::npos);
  CHECK(results.find("-250.00,true") != std::string::npos);

  CommandOptions phase;
  const fs::path pdir = fresh_dir("secure_phase");
  phase.out_dir = pdir.string();
  phase.secure_mode = "phase";
  CHECK(cmd_secure(sc, phase) == 0);
  const auto pplan = nlohmann::json::parse(slurp(pdir / "plan.json"));
  CHECK(pplan.at("mode") == "phase");
  if (pplan.contains("offsets")) {
    const double before = std::stod(pplan.at("eve_before_dbm").get<std::string>());
    const double after = std::stod(pplan.at("eve_after_dbm").get<std::string>());
    CHECK(after <= before + 1e-9);
    const double rx_after = std::stod(pplan.at("rx_after_dbm").get<std::string>());
    const double aligned = std::stod(pplan.at("rx_aligned_dbm").get<std::string>());
    CHECK(rx_after >= aligned - 0.5 - 1e-9);
  }

  CommandOptions bad;
  bad.secure_mode = "scramble";
  CHECK_THROWS_AS(cmd_secure(sc, bad), Error);
}

TEST_CASE("cmd_controlplane_demo emits per-callback outcomes") {
  const Scenario sc = make_corridor_scenario(2.4e9);
  CommandOptions opt;
  const fs::path dir = fresh_dir("cpdemo");
  opt.out_dir = dir.string();
  CHECK(cmd_controlplane_demo(sc, opt, std::nullopt) == 0);
  const auto outcomes = nlohmann::json::parse(slurp(dir / "outcomes.json"));
  REQUIRE(outcomes.size() == 4);
  CHECK(outcomes[0].at("status") == "ACK");
  CHECK(outcomes[3].at("status") == "NO_SUCH_TILE");
}

TEST_CASE("cli binary exit codes") {
  const fs::path dir = fresh_dir("cli");
  const std::string cli = PWE_CLI_PATH;
  const std::string quiet = " > /dev/null 2>&1";

  int rc = std::system(
      (cli + " trace --scenario smoke-box --out " + (dir / "ok").string() + quiet)
          .c_str());
  CHECK(WEXITSTATUS(rc) == 0);

  rc = std::system(
      (cli + " trace --scenario /nonexistent.json --out " + dir.string() + quiet)
          .c_str());
  CHECK(WEXITSTATUS(rc) == 2);

  // Malformed scenario file: schema violation exits 2.
  const fs::path badfile = dir / "bad.json";
  {
    std::ofstream out(badfile);
    out << "{\n  \"name\": 3,\n}\n";
  }
  rc = std::system(
      (cli + " trace --scenario " + badfile.string() + " --out " + dir.string() + quiet)
          .c_str());
  CHECK(WEXITSTATUS(rc) == 2);
}
