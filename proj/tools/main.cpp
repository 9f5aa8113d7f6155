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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Default-aware Bayesian optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  bonsai::cli::RunOptions run_opt;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run every replication of an experiment config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--jobs,-j", run_opt.jobs, "replications to run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", out_dir, "output directory (overrides the config's output field)");
  run->add_flag("--quiet,-q", run_opt.quiet, "no per-replication progress lines");

  std::string results_dir;
  auto* report = app.add_subcommand("report", "aggregate replication CSVs into summary tables");
  report->add_option("results_dir", results_dir, "directory written by run")->required();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a randomized property suite");
  verify->add_option("suite", suite, "gp, prune, kernel or schedule")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bonsai::cli::kUsage;
  }

  if (*run) {
    if (!out_dir.empty()) run_opt.out_dir = out_dir;
    return bonsai::cli::cmd_run(config_path, run_opt, std::cout, std::cerr);
  }
  if (*report) return bonsai::cli::cmd_report(results_dir, std::cout, std::cerr);
  return bonsai::cli::cmd_verify(suite, std::cout, std::cerr);
}
