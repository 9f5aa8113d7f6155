// Copyright 2026 The Bonsai BO Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "commands.hpp"
#include "support.hpp"

namespace bonsai {
namespace {

namespace fs = std::filesystem;
using io::json;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("bonsai_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json tiny_config(int iterations = 2, int embed_dim = 4) {
  return {{"schema_version", 1}, {"problem", "branin"}, {"embed_dim", embed_dim}, {"method", "bonsai"},
          {"init_sobol", 4},     {"iterations", iterations}, {"replications", 2}, {"seed", 5},
          {"ensemble_size", 2},  {"fit", {{"restarts", 1}, {"max_iters", 40}}},
          {"optimizer", {{"raw_samples", 32}, {"num_starts", 2}, {"max_local_iters", 20}}},
          {"record_timing", false}};
}

fs::path write_config(const TempDir& d, const json& j, const std::string& name = "cfg.json") {
  const fs::path p = d.path() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

int run(const fs::path& cfg, const fs::path& out_dir, std::optional<std::string> seed = std::nullopt,
        std::string* err_text = nullptr) {
  cli::RunOptions o;
  o.out_dir = out_dir.string();
  o.quiet = true;
  o.seed_override = seed ? seed : std::optional<std::string>("5");
  std::ostringstream out, err;
  const int rc = cli::cmd_run(cfg.string(), o, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

TEST(ConfigIo, RoundTrip) {
  ExperimentConfig c;
  c.problem = "hartmann6";
  c.method = Method::BonsaiExact;
  c.acquisition = AcqKind::UCB;
  c.rule = GapRule{ScheduleKind::InversePower, 0.4, 0.5, std::nullopt};
  c.fit.family = KernelFamily::SquaredExponential;
  c.budget.analytic_gradients = false;
  c.seed = 123456789012345ULL;
  const ExperimentConfig back = io::config_from_json(json::parse(io::to_json(c).dump()));
  EXPECT_EQ(io::to_json(back), io::to_json(c));
  EXPECT_FALSE(back.rule.rho_max);
}

TEST(ConfigIo, RejectsBadInput) {
  auto bad = [](json j, const std::string& field) {
    try {
      io::config_from_json(j);
      ADD_FAILURE() << "accepted " << j.dump();
    } catch (const io::ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  json j = tiny_config();
  j["method"] = "annealing";
  bad(j, "method");
  j = tiny_config();
  j["fit"]["restart"] = 3;
  bad(j, "fit.restart");
  j = tiny_config();
  j["embed_dim"] = "four";
  bad(j, "embed_dim");
  j = tiny_config();
  j.erase("schema_version");
  bad(j, "schema_version");
  j = tiny_config();
  j["replications"] = 0;
  bad(j, "replications");
  j = tiny_config();
  j["seed"] = -1;
  bad(j, "seed");
}

TEST(Csv, RoundTrip) {
  ExperimentConfig c;
  c.problem = "branin";
  c.embed_dim = 4;
  c.method = Method::Sobol;
  c.init_sobol = 3;
  c.iterations = 2;
  const ReplicationRecord r = run_replication(c, 3);
  std::stringstream ss;
  io::write_csv(ss, r);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), io::kCsvHeader);
  const ReplicationRecord back = io::read_csv(ss, Direction::Minimize);
  EXPECT_EQ(back.rep, 3);
  EXPECT_EQ(back.dim, 4);
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].x, r.rows[i].x);
    EXPECT_EQ(back.rows[i].y_raw, r.rows[i].y_raw);
    EXPECT_EQ(back.rows[i].best_raw, r.rows[i].best_raw);
    EXPECT_EQ(back.rows[i].phase, r.rows[i].phase);
    EXPECT_EQ(back.rows[i].n_active, r.rows[i].n_active);
  }
  std::stringstream broken("rep,t\n1,2\n");
  EXPECT_THROW(io::read_csv(broken, Direction::Minimize), std::exception);
}

TEST(Csv, FormatDoubleRoundTrips) {
  testing::Rng g(81);
  for (int i = 0; i < 1000; ++i) {
    const double v = g.normal() * std::pow(10.0, g.integer(-30, 30));
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(TraceIo, RoundTrip) {
  PruneTrace tr;
  tr.steps = {{0, 2, {}, 0.125, true, true}, {1, -1, {0, 3}, 0.5, false, false}};
  tr.acq_evals = 2;
  tr.final_gap = 0.125;
  tr.rho_used = 0.2;
  tr.budget = 0.3;
  tr.alpha_star = 2.0;
  tr.alpha_tilde = 1.5;
  tr.baseline = 0.5;
  tr.active_before = 4;
  tr.active_after = 3;
  const PruneTrace back = io::trace_from_json(json::parse(io::to_json(tr).dump()));
  EXPECT_EQ(io::to_json(back), io::to_json(tr));
  EXPECT_EQ(back.steps[1].kept, (std::vector<int>{0, 3}));
}

TEST(Cli, RunWritesArtifactsAndReport) {
  TempDir d;
  const fs::path cfg = write_config(d, tiny_config());
  const fs::path out = d.path() / "out";
  ASSERT_EQ(run(cfg, out), cli::kOk);
  for (const char* f : {"rep_000.csv", "rep_001.csv", "rep_000.traces.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const json m = json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m.at("seed_source"), "BONSAI_SEED");
  EXPECT_EQ(m.at("config").at("seed"), 5);
  const json tr = json::parse(slurp(out / "rep_000.traces.json"));
  EXPECT_FALSE(tr.empty());

  std::ostringstream o, e;
  EXPECT_EQ(cli::cmd_report(out.string(), o, e), cli::kOk) << e.str();
  EXPECT_TRUE(fs::exists(out / "summary.csv"));
  EXPECT_TRUE(fs::exists(out / "active_levels.csv"));
}

TEST(Cli, SeedOverride) {
  TempDir d;
  const fs::path cfg = write_config(d, tiny_config(0));
  ASSERT_EQ(run(cfg, d.path() / "a", "42"), cli::kOk);
  EXPECT_EQ(json::parse(slurp(d.path() / "a" / "manifest.json")).at("config").at("seed"), 42);
  std::string err;
  EXPECT_EQ(run(cfg, d.path() / "b", "-3", &err), cli::kUsage);
  EXPECT_NE(err.find("BONSAI_SEED"), std::string::npos);
}

TEST(Cli, ZeroIterationsGivesInitialDesignOnly) {
  TempDir d;
  const fs::path cfg = write_config(d, tiny_config(0));
  ASSERT_EQ(run(cfg, d.path() / "o"), cli::kOk);
  std::ifstream f(d.path() / "o" / "rep_000.csv");
  const ReplicationRecord r = io::read_csv(f, Direction::Minimize);
  ASSERT_EQ(r.rows.size(), 5u);
  for (const auto& row : r.rows) EXPECT_EQ(row.phase, Phase::Init);
}

TEST(Cli, BadConfigIsUsageError) {
  TempDir d;
  json j = tiny_config();
  j["method"] = "annealing";
  std::string err;
  EXPECT_EQ(run(write_config(d, j), d.path() / "o", std::nullopt, &err), cli::kUsage);
  EXPECT_NE(err.find("method"), std::string::npos);
  EXPECT_EQ(run(d.path() / "missing.json", d.path() / "o"), cli::kUsage);
}

TEST(Cli, ReportOnIdenticalReplicationsHasZeroError) {
  TempDir d;
  ASSERT_EQ(run(write_config(d, tiny_config(0)), d.path() / "o"), cli::kOk);
  const fs::path dir = d.path() / "copies";
  fs::create_directories(dir);
  const std::string body = slurp(d.path() / "o" / "rep_000.csv");
  for (int r = 0; r < 3; ++r) {
    std::string b = body;
    // rewrite the rep column so the files are distinct replications
    std::string out;
    std::istringstream in(b);
    std::string line;
    std::getline(in, line);
    out += line + "\n";
    while (std::getline(in, line)) out += std::to_string(r) + line.substr(line.find(',')) + "\n";
    std::ofstream(dir / ("rep_00" + std::to_string(r) + ".csv")) << out;
  }
  std::ostringstream o, e;
  ASSERT_EQ(cli::cmd_report(dir.string(), o, e), cli::kOk) << e.str();
  std::ifstream f(dir / "summary.csv");
  std::string line;
  std::getline(f, line);
  while (std::getline(f, line)) EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
}

TEST(Cli, ReportRejectsMissingAndMixedDirectories) {
  TempDir d;
  std::ostringstream o, e;
  EXPECT_EQ(cli::cmd_report((d.path() / "nope").string(), o, e), cli::kUsage);

  ASSERT_EQ(run(write_config(d, tiny_config(0, 4), "a.json"), d.path() / "a"), cli::kOk);
  ASSERT_EQ(run(write_config(d, tiny_config(0, 5), "b.json"), d.path() / "b"), cli::kOk);
  fs::copy_file(d.path() / "b" / "rep_000.csv", d.path() / "a" / "rep_007.csv");
  EXPECT_EQ(cli::cmd_report((d.path() / "a").string(), o, e), cli::kUsage);
  EXPECT_NE(e.str().find("mixed"), std::string::npos);

  // Without manifests, differing layouts are still caught.
  fs::remove(d.path() / "a" / "manifest.json");
  EXPECT_EQ(cli::cmd_report((d.path() / "a").string(), o, e), cli::kUsage);
}

TEST(Cli, VerifyUnknownSuite) {
  std::ostringstream o, e;
  EXPECT_EQ(cli::cmd_verify("everything", o, e), cli::kUsage);
  EXPECT_EQ(cli::cmd_verify("schedule", o, e), cli::kOk);
}

}  // namespace
}  // namespace bonsai
