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

// run / report / verify, callable without going through main().

#ifndef BONSAI_TOOLS_COMMANDS_HPP
#define BONSAI_TOOLS_COMMANDS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bonsai/bench.hpp"
#include "bonsai/io.hpp"
#include "verify.hpp"

#ifndef BONSAI_BUILD_ID
#define BONSAI_BUILD_ID "unknown"
#endif

namespace bonsai::cli {

namespace fs = std::filesystem;
using io::json;

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

struct RunOptions {
  int jobs = 1;
  std::optional<std::string> out_dir;
  std::optional<std::string> seed_override;  // BONSAI_SEED when unset
  bool quiet = false;
};

namespace cli_detail {

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string rep_name(int rep, const char* suffix) {
  std::ostringstream os;
  os << "rep_" << std::setw(3) << std::setfill('0') << rep << suffix;
  return os.str();
}

inline std::optional<std::uint64_t> parse_seed(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// Per-round trace records; exact-pruning step lists are truncated to keep files small.
inline json traces_json(const ReplicationRecord& rec) {
  constexpr std::size_t kMaxSteps = 2000;
  json out = json::array();
  for (const auto& r : rec.rows) {
    if (r.phase != Phase::BO) continue;
    json j{{"t", r.t}, {"n_active_star", r.n_active_star}};
    if (r.x_star) j["x_star"] = io::to_json(*r.x_star);
    j["x"] = io::to_json(r.x);
    if (r.trace) {
      json tr = io::to_json(*r.trace);
      if (r.trace->steps.size() > kMaxSteps) {
        tr["steps"] = json::array();
        tr["steps_omitted"] = r.trace->steps.size();
      }
      j["trace"] = std::move(tr);
    }
    out.push_back(std::move(j));
  }
  return out;
}

inline void write_file(const fs::path& p, const std::string& contents) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << contents;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace cli_detail

/// Run every replication of a config and persist rep_NNN.csv, rep_NNN.traces.json and
/// manifest.json into the output directory.
inline int cmd_run(const std::string& config_path, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = io::load_config(config_path);
  } catch (const io::ConfigError& e) {
    err << "config error in " << config_path << ": " << e.what() << '\n';
    return kUsage;
  }
  if (opt.jobs < 1) {
    err << "--jobs must be >= 1\n";
    return kUsage;
  }
  std::string seed_source = "config";
  std::optional<std::string> env_seed = opt.seed_override;
  if (!env_seed) {
    if (const char* s = std::getenv("BONSAI_SEED")) env_seed = std::string(s);
  }
  if (env_seed) {
    const auto v = cli_detail::parse_seed(*env_seed);
    if (!v) {
      err << "BONSAI_SEED must be a non-negative integer, got '" << *env_seed << "'\n";
      return kUsage;
    }
    cfg.seed = *v;
    seed_source = "BONSAI_SEED";
  }
  const fs::path dir = opt.out_dir ? fs::path(*opt.out_dir) : fs::path(cfg.output);
  try {
    fs::create_directories(dir);
  } catch (const std::exception& e) {
    err << "cannot create output directory " << dir << ": " << e.what() << '\n';
    return kUsage;
  }

  const std::string started = cli_detail::utc_now();
  std::vector<std::optional<std::string>> errors(static_cast<std::size_t>(cfg.replications));
  std::atomic<int> next{0};
  std::mutex log_mu;
  auto worker = [&]() {
    for (int rep = next++; rep < cfg.replications; rep = next++) {
      try {
        const ReplicationRecord rec = run_replication(cfg, rep);
        std::ostringstream csv;
        io::write_csv(csv, rec);
        cli_detail::write_file(dir / cli_detail::rep_name(rep, ".csv"), csv.str());
        cli_detail::write_file(dir / cli_detail::rep_name(rep, ".traces.json"),
                               cli_detail::traces_json(rec).dump(1) + "\n");
        if (!opt.quiet) {
          std::lock_guard<std::mutex> lock(log_mu);
          out << "rep " << rep << ": best " << io::format_double(rec.rows.back().best_raw) << ", recommendation has "
              << rec.recommendation().n_active << " active\n";
        }
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(rep)] = e.what();
      }
    }
  };
  const int n_threads = std::min(opt.jobs, cfg.replications);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  json manifest;
  manifest["schema_version"] = io::kConfigSchemaVersion;
  manifest["config"] = io::to_json(cfg);
  manifest["config_path"] = config_path;
  manifest["seed_source"] = seed_source;
  manifest["build"] = BONSAI_BUILD_ID;
  manifest["started_at"] = started;
  manifest["finished_at"] = cli_detail::utc_now();
  manifest["jobs"] = opt.jobs;
  json reps = json::array();
  bool failed = false;
  for (int rep = 0; rep < cfg.replications; ++rep) {
    json r{{"rep", rep},
           {"seed", io::hex64(replication_seed(cfg.seed, rep))},
           {"csv", cli_detail::rep_name(rep, ".csv")},
           {"traces", cli_detail::rep_name(rep, ".traces.json")}};
    if (const auto& e = errors[static_cast<std::size_t>(rep)]) {
      r["error"] = *e;
      failed = true;
      err << "error: " << *e << '\n';
    }
    reps.push_back(std::move(r));
  }
  manifest["replications"] = std::move(reps);
  try {
    cli_detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kFailure;
  }
  return failed ? kFailure : kOk;
}

// ---------------------------------------------------------------------------
// report

struct LoadedExperiment {
  std::vector<ReplicationRecord> records;
  std::optional<json> manifest;
};

/// Load every rep_*.csv in `dir`. Throws io::ConfigError when the files do not belong
/// to one experiment.
inline LoadedExperiment load_results(const fs::path& dir) {
  LoadedExperiment ex;
  std::vector<fs::path> csvs;
  std::vector<fs::path> manifests;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.rfind("rep_", 0) == 0 && e.path().extension() == ".csv") csvs.push_back(e.path());
    if (name.find("manifest") != std::string::npos && e.path().extension() == ".json") manifests.push_back(e.path());
  }
  std::sort(csvs.begin(), csvs.end());
  if (manifests.size() > 1) throw io::ConfigError(dir.string(), "more than one manifest: mixed experiments");
  std::optional<Direction> direction;
  if (!manifests.empty()) {
    std::ifstream f(manifests.front());
    try {
      ex.manifest = json::parse(f);
      const std::string problem = ex.manifest->at("config").at("problem").get<std::string>();
      direction = make_problem(problem).direction;
      std::vector<std::string> listed;
      for (const auto& r : ex.manifest->at("replications")) listed.push_back(r.at("csv").get<std::string>());
      for (const auto& p : csvs)
        if (std::find(listed.begin(), listed.end(), p.filename().string()) == listed.end())
          throw io::ConfigError(p.filename().string(), "not listed in the manifest: mixed experiments");
    } catch (const io::ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw io::ConfigError(manifests.front().string(), std::string("unreadable manifest: ") + e.what());
    }
  }
  for (const auto& p : csvs) {
    std::ifstream f(p);
    ReplicationRecord rec;
    try {
      rec = io::read_csv(f, direction.value_or(Direction::Minimize), p.filename().string());
    } catch (const std::exception& e) {
      throw io::ConfigError(p.filename().string(), e.what());
    }
    if (!direction) {
      // without a manifest, infer the direction from the best-so-far column
      bool up = false, down = false;
      for (std::size_t i = 1; i < rec.rows.size(); ++i) {
        up = up || rec.rows[i].best_raw > rec.rows[i - 1].best_raw;
        down = down || rec.rows[i].best_raw < rec.rows[i - 1].best_raw;
      }
      if (up && down) throw io::ConfigError(p.filename().string(), "best_raw is not monotone");
      rec.direction = up ? Direction::Maximize : Direction::Minimize;
    }
    ex.records.push_back(std::move(rec));
  }
  if (ex.records.size() < 2) throw io::ConfigError(dir.string(), "need at least 2 replication CSVs");
  const ReplicationRecord& a = ex.records.front();
  for (const auto& r : ex.records) {
    bool same = r.dim == a.dim && r.rows.size() == a.rows.size() && r.direction == a.direction;
    for (std::size_t i = 0; same && i < r.rows.size(); ++i)
      same = r.rows[i].t == a.rows[i].t && r.rows[i].phase == a.rows[i].phase;
    if (!same)
      throw io::ConfigError("rep " + std::to_string(r.rep),
                            "dimension, length or round layout differs from rep " + std::to_string(a.rep) +
                                ": mixed experiments");
  }
  for (std::size_t i = 0; i < ex.records.size(); ++i)
    for (std::size_t k = i + 1; k < ex.records.size(); ++k)
      if (ex.records[i].rep == ex.records[k].rep)
        throw io::ConfigError("rep " + std::to_string(ex.records[i].rep), "appears twice: mixed experiments");
  return ex;
}

inline int cmd_report(const std::string& results_dir, std::ostream& out, std::ostream& err) {
  const fs::path dir(results_dir);
  if (!fs::is_directory(dir)) {
    err << "results directory " << dir << " does not exist\n";
    return kUsage;
  }
  LoadedExperiment ex;
  try {
    ex = load_results(dir);
  } catch (const io::ConfigError& e) {
    err << "report: " << e.what() << '\n';
    return kUsage;
  }
  const Summary s = aggregate(ex.records);
  try {
    std::ostringstream a, b;
    a << "iteration,n,mean_best,two_se\n";
    for (const auto& r : s.best_by_iteration)
      a << r.index << ',' << r.n << ',' << io::format_double(r.mean) << ',' << io::format_double(r.two_se) << '\n';
    b << "k,n,mean_best,two_se\n";
    for (const auto& r : s.best_by_active_level)
      b << r.index << ',' << r.n << ',' << io::format_double(r.mean) << ',' << io::format_double(r.two_se) << '\n';
    cli_detail::write_file(dir / "summary.csv", a.str());
    cli_detail::write_file(dir / "active_levels.csv", b.str());
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kFailure;
  }

  auto row = [&out](const std::string& label, const SummaryRow& r) {
    out << std::setw(12) << label << std::setw(6) << r.n << std::setw(16) << std::setprecision(6) << r.mean
        << std::setw(14) << r.two_se << '\n';
  };
  out << ex.records.size() << " replications, " << ex.records.front().rows.size() << " evaluations, dim "
      << ex.records.front().dim << "\n\n";
  out << std::setw(12) << "evaluation" << std::setw(6) << "n" << std::setw(16) << "mean best" << std::setw(14)
      << "2 SE" << '\n';
  const std::size_t n_it = s.best_by_iteration.size();
  const std::size_t stride = std::max<std::size_t>(1, n_it / 10);
  for (std::size_t i = 0; i < n_it; ++i)
    if (i % stride == stride - 1 || i + 1 == n_it) row(std::to_string(s.best_by_iteration[i].index), s.best_by_iteration[i]);
  out << '\n' << std::setw(12) << "active <= k" << std::setw(6) << "n" << std::setw(16) << "mean best" << std::setw(14)
      << "2 SE" << '\n';
  for (const auto& r : s.best_by_active_level)
    if (r.n > 0) row(std::to_string(r.index), r);
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

inline void print_suite(const verify::SuiteResult& r, std::ostream& out) {
  for (const auto& p : r.properties) {
    out << (p.passed ? "PASS  " : "FAIL  ") << p.name;
    if (!p.detail.empty()) out << "  [" << p.detail << "]";
    out << '\n';
    if (!p.passed && p.counterexample) out << "  counterexample: " << p.counterexample->dump() << '\n';
  }
}

inline int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err) {
  std::optional<verify::SuiteResult> r;
  try {
    r = verify::run_suite(suite);
  } catch (const std::exception& e) {
    err << "verify " << suite << ": " << e.what() << '\n';
    return kFailure;
  }
  if (!r) {
    err << "unknown suite '" << suite << "' (expected gp, prune, kernel or schedule)\n";
    return kUsage;
  }
  print_suite(*r, out);
  return r->passed() ? kOk : kFailure;
}

}  // namespace bonsai::cli

#endif  // BONSAI_TOOLS_COMMANDS_HPP
