// Copyright 2026 The Mace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "mace/io.hpp"
#include "mace/oracle.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("mace_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  const fs::path out_file = scratch_dir() / "last_stdout.txt";
  const fs::path err_file = scratch_dir() / "last_stderr.txt";
  const std::string cmd = std::string(MACE_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = read_text(out_file);
  result.err = read_text(err_file);
  return result;
}

// Simulated two-cell pool shared by the pipeline tests.
fs::path shared_pool() {
  static const fs::path path = [] {
    const fs::path p = scratch_dir() / "pool.csv";
    const CliResult sim = run_cli(
        "simulate categorical --member-pmf 0.9,0.1 --nonmember-pmf 0.1,0.9 "
        "--n 4000 --seed 5 --out " +
        p.string());
    REQUIRE(sim.exit_code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("help and version exit cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("audit --help").exit_code == 0);
  const CliResult version = run_cli("--version");
  CHECK(version.exit_code == 0);
  CHECK(version.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit with the validation code") {
  CHECK(run_cli("").exit_code == 2);                   // subcommand required
  CHECK(run_cli("audit").exit_code == 2);              // missing args
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("dp-bound").exit_code == 2);           // --epsilon required
}

TEST_CASE("dp-bound prints the closed form") {
  const CliResult r = run_cli("dp-bound --epsilon 1 --prior 0.5");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["epsilon"] == 1.0);
  CHECK(j["lambda"] == 0.0);
  CHECK(j["bound"].get<double>() ==
        doctest::Approx(0.46211715726000974).epsilon(1e-12));

  // Invalid prior is a validation failure.
  CHECK(run_cli("dp-bound --epsilon 1 --prior 1.5").exit_code == 2);
}

TEST_CASE("simulate reports the ground truth it sampled from") {
  const CliResult sim = run_cli(
      "simulate categorical --member-pmf 0.8,0.2 --nonmember-pmf 0.2,0.8 "
      "--n 100 --seed 11 --out " +
      (scratch_dir() / "sim_small.csv").string());
  REQUIRE(sim.exit_code == 0);
  const nlohmann::json truth = nlohmann::json::parse(sim.out);
  CHECK(truth["advantage"].get<double>() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(truth["per_outcome_risk"].size() == 2);
  CHECK(truth["n_members"] == 50);
  CHECK(truth["n_nonmembers"] == 50);
  CHECK(fs::exists(scratch_dir() / "sim_small.csv"));

  // Normal worlds only have a closed-form truth at the balanced prior.
  const CliResult norm = run_cli(
      "simulate normal --mu1 0 --mu2 1 --sigma 1 --n 100 --seed 3 --out " +
      (scratch_dir() / "sim_norm.csv").string());
  REQUIRE(norm.exit_code == 0);
  const nlohmann::json norm_truth = nlohmann::json::parse(norm.out);
  CHECK(norm_truth["advantage"].get<double>() ==
        doctest::Approx(0.38292492254802624).epsilon(1e-12));

  CHECK(run_cli("simulate categorical --member-pmf 0.6,0.5 "
                "--nonmember-pmf 0.5,0.5 --n 100 --out " +
                (scratch_dir() / "bad.csv").string())
            .exit_code == 2);
}

TEST_CASE("audit pipeline recovers the simulated advantage") {
  const fs::path report_path = scratch_dir() / "audit.json";
  const CliResult audit =
      run_cli(shared_pool().string() +
              " --n 2000 --seed 7 --risks --dp-epsilon 1 --metric AM --out " +
              report_path.string());
  // The audit subcommand name goes in front of the data path.
  CHECK(audit.exit_code == 2);

  const CliResult ok = run_cli(
      "audit " + shared_pool().string() +
      " --n 2000 --seed 7 --risks --dp-epsilon 1 --metric AM --out " +
      report_path.string());
  REQUIRE(ok.exit_code == 0);
  REQUIRE(fs::exists(report_path));
  const nlohmann::json report = nlohmann::json::parse(read_text(report_path));

  // Simulated truth is 0.8; the discrete statistic at N=2000 sits well
  // inside the concentration radius of it.
  const auto& first = report["estimators"][0];
  CHECK(first["label"] == "advantage_discrete");
  CHECK(first["point"].get<double>() == doctest::Approx(0.8).epsilon(0.1));
  CHECK(std::fabs(first["point"].get<double>() - 0.8) <
        first["concentration_radius"].get<double>());

  CHECK(report["estimators"][1]["label"] == "generalized_AM");
  CHECK(report["risks"]["count"] == 2000);
  CHECK(report["dp"]["findings"].size() == 2);
  CHECK(report["dp"]["findings"][0]["exceeds_bound"] == true);
  CHECK(fs::exists(scratch_dir() / "audit.csv"));
  CHECK(fs::exists(scratch_dir() / "audit_risks.csv"));
}

TEST_CASE("audit reports are byte-identical across thread counts") {
  const fs::path one = scratch_dir() / "threads1.json";
  const fs::path four = scratch_dir() / "threads4.json";
  REQUIRE(run_cli("audit " + shared_pool().string() +
                  " --n 1500 --seed 9 --risks --threads 1 --out " +
                  one.string())
              .exit_code == 0);
  REQUIRE(run_cli("audit " + shared_pool().string() +
                  " --n 1500 --seed 9 --risks --threads 4 --out " +
                  four.string())
              .exit_code == 0);
  nlohmann::json a = nlohmann::json::parse(read_text(one));
  nlohmann::json b = nlohmann::json::parse(read_text(four));
  a.erase("timing");
  b.erase("timing");
  CHECK(a.dump() == b.dump());
  // The estimator tables carry no timing and match byte for byte.
  CHECK(read_text(scratch_dir() / "threads1.csv") ==
        read_text(scratch_dir() / "threads4.csv"));
  CHECK(read_text(scratch_dir() / "threads1_risks.csv") ==
        read_text(scratch_dir() / "threads4_risks.csv"));
}

TEST_CASE("data failures exit with the data code") {
  CHECK(run_cli("audit " + (scratch_dir() / "absent.csv").string() +
                " --n 100 --out " + (scratch_dir() / "x.json").string())
            .exit_code == 3);
  const fs::path bad = scratch_dir() / "bad_rows.csv";
  std::ofstream(bad) << "m,q1\n1,0.5\nwhat,1.0\n";
  const CliResult r = run_cli("audit " + bad.string() + " --n 100 --out " +
                              (scratch_dir() / "y.json").string());
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("validation failures exit before touching data") {
  // Prior outside (0,1): rejected even though the data file is absent.
  CHECK(run_cli("audit " + (scratch_dir() / "absent.csv").string() +
                " --n 100 --prior 1.2 --out " +
                (scratch_dir() / "z.json").string())
            .exit_code == 2);
  CHECK(run_cli("audit " + shared_pool().string() +
                " --n 100 --metric BOGUS --out " +
                (scratch_dir() / "z.json").string())
            .exit_code == 2);
}

TEST_CASE("risk table for a thresholdless metric is a numeric failure") {
  const CliResult r = run_cli("risk " + shared_pool().string() +
                              " --n 500 --metric PPV --out " +
                              (scratch_dir() / "ppv.csv").string());
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("condition 1") != std::string::npos);
}

TEST_CASE("risk table stands alone") {
  const fs::path out = scratch_dir() / "risks.csv";
  const CliResult r = run_cli("risk " + shared_pool().string() +
                              " --n 500 --seed 2 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const std::string table = read_text(out);
  CHECK(table.rfind("index,label,q1,", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 501);
}

TEST_CASE("query pipeline produces auditable outputs from vectors") {
  // Synthetic release drawn near the members: membership should leak.
  const auto member_records =
      mace::sample_normal_records(std::vector<double>{0.0, 0.0}, 0.3, 120, 21);
  const auto nonmember_records =
      mace::sample_normal_records(std::vector<double>{4.0, 4.0}, 0.3, 120, 22);
  const auto synthetic_records =
      mace::sample_normal_records(std::vector<double>{0.0, 0.0}, 0.3, 200, 23);
  const fs::path members = scratch_dir() / "members.vec";
  const fs::path nonmembers = scratch_dir() / "nonmembers.vec";
  const fs::path synthetic = scratch_dir() / "synthetic.vec";
  mace::io::write_vectors_binary(members, member_records);
  mace::io::write_vectors_binary(nonmembers, nonmember_records);
  mace::io::write_vectors_binary(synthetic, synthetic_records);

  const fs::path queries = scratch_dir() / "nn_queries.csv";
  const CliResult nn = run_cli("query nn --members " + members.string() +
                               " --nonmembers " + nonmembers.string() +
                               " --synthetic " + synthetic.string() +
                               " --out " + queries.string());
  REQUIRE(nn.exit_code == 0);
  const mace::io::QueryPools pools = mace::io::ingest_query_csv(queries);
  CHECK(pools.members.size() == 120);
  CHECK(pools.nonmembers.size() == 120);
  // Members sit on top of the synthetic cloud, non-members far away.
  CHECK(pools.members[0][0] < 1.0);
  CHECK(pools.nonmembers[0][0] > 2.0);

  const fs::path report = scratch_dir() / "nn_audit.json";
  const CliResult audit =
      run_cli("audit " + queries.string() +
              " --n 200 --density continuous --out " + report.string());
  REQUIRE(audit.exit_code == 0);
  const nlohmann::json parsed = nlohmann::json::parse(read_text(report));
  CHECK(parsed["estimators"][0]["label"] == "advantage_continuous");
  CHECK(parsed["estimators"][0]["point"].get<double>() > 0.8);

  const fs::path ball_out = scratch_dir() / "ball_queries.csv";
  const CliResult ball = run_cli(
      "query ball --members " + members.string() + " --nonmembers " +
      nonmembers.string() + " --synthetic " + synthetic.string() +
      " --epsilon-ball 1.0 --out " + ball_out.string());
  REQUIRE(ball.exit_code == 0);
  CHECK(fs::exists(ball_out));

  // Dimension mismatch between samples and release is a data failure.
  const fs::path narrow = scratch_dir() / "narrow.vec";
  mace::io::write_vectors_binary(
      narrow, std::vector<std::vector<double>>{{0.0}, {1.0}});
  CHECK(run_cli("query nn --members " + narrow.string() + " --nonmembers " +
                nonmembers.string() + " --synthetic " + synthetic.string() +
                " --out " + (scratch_dir() / "mismatch.csv").string())
            .exit_code == 3);
}
