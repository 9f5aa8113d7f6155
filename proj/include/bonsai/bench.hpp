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

#ifndef BONSAI_BENCH_HPP
#define BONSAI_BENCH_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bonsai/acquisition.hpp"
#include "bonsai/detail/rng.hpp"
#include "bonsai/gp.hpp"
#include "bonsai/optimizer.hpp"
#include "bonsai/pruning.hpp"
#include "bonsai/sobol.hpp"
#include "bonsai/space.hpp"

namespace bonsai {

// ---------------------------------------------------------------------------
// Test functions

/// Branin on [-5, 10] x [0, 15]. Global minimum 0.397887 at three points.
inline double branin(const Eigen::VectorXd& x) {
  if (x.size() != 2) throw std::invalid_argument("branin: expects 2 inputs");
  constexpr double pi = std::numbers::pi;
  const double a = 1.0, b = 5.1 / (4.0 * pi * pi), c = 5.0 / pi, r = 6.0, s = 10.0, t = 1.0 / (8.0 * pi);
  const double u = x[1] - b * x[0] * x[0] + c * x[0] - r;
  return a * u * u + s * (1.0 - t) * std::cos(x[0]) + s;
}

/// Hartmann-6 on [0, 1]^6. Global minimum -3.32237.
inline double hartmann6(const Eigen::VectorXd& x) {
  if (x.size() != 6) throw std::invalid_argument("hartmann6: expects 6 inputs");
  static constexpr std::array<double, 4> alpha = {1.0, 1.2, 3.0, 3.2};
  static constexpr double A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                     {0.05, 10, 17, 0.1, 8, 14},
                                     {3, 3.5, 1.7, 10, 17, 8},
                                     {17, 8, 0.05, 10, 0.1, 14}};
  static constexpr double P[4][6] = {{1312, 1696, 5569, 124, 8283, 5886},
                                     {2329, 4135, 8307, 3736, 1004, 9991},
                                     {2348, 1451, 3522, 2883, 3047, 6650},
                                     {4047, 8828, 8732, 5743, 1091, 381}};
  double out = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - 1e-4 * P[i][j];
      inner += A[i][j] * d * d;
    }
    out -= alpha[static_cast<std::size_t>(i)] * std::exp(-inner);
  }
  return out;
}

enum class Direction { Minimize, Maximize };

inline const char* to_string(Direction d) { return d == Direction::Minimize ? "minimize" : "maximize"; }

struct Problem {
  std::string name;
  int intrinsic_dim = 0;
  std::function<double(const Eigen::VectorXd&)> eval;
  SearchSpace space = SearchSpace::unit(1);
  Direction direction = Direction::Minimize;
  std::optional<double> known_optimum;
  double noise_sd = 0.0;
};

inline Problem branin_problem() {
  Eigen::Vector2d lo(-5.0, 0.0), hi(10.0, 15.0);
  return {"branin", 2, [](const Eigen::VectorXd& x) { return branin(x); }, SearchSpace(lo, hi),
          Direction::Minimize, 0.397887357729738, 0.0};
}

inline Problem hartmann6_problem() {
  return {"hartmann6", 6, [](const Eigen::VectorXd& x) { return hartmann6(x); }, SearchSpace::unit(6),
          Direction::Minimize, -3.32236801141551, 0.0};
}

inline Problem make_problem(const std::string& name) {
  if (name == "branin") return branin_problem();
  if (name == "hartmann6") return hartmann6_problem();
  throw std::invalid_argument("unknown problem '" + name + "' (expected branin or hartmann6)");
}

/// A base problem living in the first coordinates of a larger box. The extra
/// coordinates span [0, 1] and are ignored by the objective.
struct EmbeddedProblem {
  Problem base;
  int total_dim = 0;
  SearchSpace space = SearchSpace::unit(1);
  Configuration default_config;
  std::vector<int> active_indices;

  [[nodiscard]] double operator()(const Configuration& x) const {
    space.check_dim(x);
    return base.eval(x.head(base.intrinsic_dim));
  }
};

inline EmbeddedProblem embed(const Problem& base, int total_dim, bool center_default = true) {
  if (total_dim < base.intrinsic_dim)
    throw std::invalid_argument("embed: total dimension " + std::to_string(total_dim) +
                                " is smaller than the intrinsic dimension " + std::to_string(base.intrinsic_dim));
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(total_dim), hi = Eigen::VectorXd::Ones(total_dim);
  lo.head(base.intrinsic_dim) = base.space.lower();
  hi.head(base.intrinsic_dim) = base.space.upper();
  EmbeddedProblem ep{base, total_dim, SearchSpace(lo, hi), {}, {}};
  ep.default_config = center_default ? ep.space.center() : ep.space.lower();
  for (int j = 0; j < base.intrinsic_dim; ++j) ep.active_indices.push_back(j);
  return ep;
}

// ---------------------------------------------------------------------------
// Experiment loop

enum class Method { Sobol, StandardBO, Bonsai, BonsaiExact };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Sobol: return "sobol";
    case Method::StandardBO: return "standard_bo";
    case Method::Bonsai: return "bonsai";
    case Method::BonsaiExact: return "bonsai_exact";
  }
  return "?";
}

struct ExperimentConfig {
  std::string problem = "branin";
  int embed_dim = 20;
  bool center_default = true;
  double noise_sd = 0.0;
  Method method = Method::Bonsai;
  AcqKind acquisition = AcqKind::EI;
  GapRule rule{};
  int q = 1;
  int init_sobol = 20;
  int iterations = 50;
  int replications = 10;
  std::uint64_t seed = 0;
  int ensemble_size = 4;
  FitOptions fit{};
  OptBudget budget{};
  bool record_timing = true;
  std::string output = "results";

  void validate() const {
    make_problem(problem);
    if (embed_dim < make_problem(problem).intrinsic_dim)
      throw std::invalid_argument("embed_dim: smaller than the problem's intrinsic dimension");
    if (embed_dim > SobolSequence::kMaxDim) throw std::invalid_argument("embed_dim: at most 64 supported");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise_sd: must be >= 0");
    rule.validate();
    if (q < 1) throw std::invalid_argument("q: must be >= 1");
    if (init_sobol < 0) throw std::invalid_argument("init_sobol: must be >= 0");
    if (iterations < 0) throw std::invalid_argument("iterations: must be >= 0");
    if (replications < 1) throw std::invalid_argument("replications: must be >= 1");
    if (ensemble_size < 1) throw std::invalid_argument("ensemble_size: must be >= 1");
    if (fit.restarts < 1) throw std::invalid_argument("fit.restarts: must be >= 1");
    budget.validate();
    if (method == Method::BonsaiExact && embed_dim > kExactPruneMaxActive)
      throw std::invalid_argument("method bonsai_exact: embed_dim exceeds the enumeration cap of 20");
  }
};

enum class Phase { Init, BO };

inline const char* to_string(Phase p) { return p == Phase::Init ? "init" : "bo"; }

struct RecordRow {
  int rep = 0;
  int t = 0;  // BO round; 0 for the initial design
  Phase phase = Phase::Init;
  Configuration x;
  double y_raw = 0.0;
  double best_raw = 0.0;
  int n_active = 0;
  double eta = 1.0;
  double rho = 0.0;
  double m_t = 0.0;
  double gen_ms = 0.0;
  long acq_evals = 0;
  // in-memory only
  int n_active_star = 0;
  std::optional<Configuration> x_star;
  std::optional<PruneTrace> trace;
};

struct ReplicationRecord {
  int rep = 0;
  std::uint64_t seed = 0;
  int dim = 0;
  Direction direction = Direction::Minimize;
  std::vector<RecordRow> rows;
  AccuracyLedger ledger;

  /// Best evaluated point (first one on ties): the recommendation.
  [[nodiscard]] const RecordRow& recommendation() const {
    if (rows.empty()) throw std::logic_error("recommendation: empty record");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (better(rows[i].y_raw, rows[best].y_raw)) best = i;
    return rows[best];
  }

  [[nodiscard]] bool better(double a, double b) const {
    return direction == Direction::Minimize ? a < b : a > b;
  }
};

/// Acquisition given by a plain function, used to drive the loop with closed-form
/// surfaces instead of a fitted model.
struct FunctionAcquisition {
  std::function<double(const Configuration&)> fn;
  double baseline_value = 0.0;

  [[nodiscard]] double value(const Configuration& x) const { return fn(x); }
  [[nodiscard]] double pruning_value(const Configuration& x) const { return fn(x); }
  [[nodiscard]] double baseline() const { return baseline_value; }
};

/// Optional replacement of the surrogate+acquisition for round t (q = 1 only).
using AcquisitionHook =
    std::function<std::optional<FunctionAcquisition>(int t, const std::vector<Configuration>& history)>;

inline std::uint64_t replication_seed(std::uint64_t master, int rep) {
  return detail::derive_seed(master, static_cast<std::uint64_t>(rep));
}

namespace bench_detail {

struct Proposal {
  Configuration x;
  Configuration x_star;
  std::optional<PruneTrace> trace;
  double eta = 1.0;
};

template <typename Acq>
Proposal propose_one(const Acq& acq, const ExperimentConfig& cfg, const SearchSpace& space,
                     const Configuration& x_def, const Configuration& incumbent_x, double rho,
                     std::uint64_t opt_seed, AccuracyLedger& ledger) {
  const std::vector<Configuration> anchors{x_def, incumbent_x};
  OptResult opt = maximize_acq(acq, space, cfg.budget, opt_seed, anchors);
  Proposal p;
  p.x_star = opt.x;
  switch (cfg.method) {
    case Method::Bonsai: {
      PruneResult r = greedy_prune(acq, opt.x, x_def, rho);
      p.x = r.x_tilde;
      p.trace = std::move(r.trace);
      break;
    }
    case Method::BonsaiExact: {
      PruneResult r = exact_prune(acq, opt.x, x_def, rho);
      p.x = r.x_tilde;
      p.trace = std::move(r.trace);
      break;
    }
    default:
      p.x = opt.x;
      break;
  }
  p.eta = record_accuracy(ledger, acq, p.x_star, p.x, rho);
  return p;
}

}  // namespace bench_detail

/// One replication: default + Sobol design, then `iterations` rounds of
/// fit -> baseline -> maximize -> prune -> evaluate. Deterministic in (config, rep).
inline ReplicationRecord run_replication(const ExperimentConfig& cfg, int rep, const AcquisitionHook& hook = {}) {
  cfg.validate();
  if (hook && cfg.q != 1) throw std::invalid_argument("run_replication: acquisition hooks need q = 1");
  const EmbeddedProblem prob = embed(make_problem(cfg.problem), cfg.embed_dim, cfg.center_default);
  const SearchSpace& space = prob.space;
  const Configuration& x_def = prob.default_config;
  const std::uint64_t seed = replication_seed(cfg.seed, rep);
  const bool minimize = prob.base.direction == Direction::Minimize;

  ReplicationRecord rec;
  rec.rep = rep;
  rec.seed = seed;
  rec.dim = cfg.embed_dim;
  rec.direction = prob.base.direction;

  std::mt19937_64 noise_gen(detail::derive_seed(seed, 2));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Configuration> xs;
  std::vector<double> ys;  // internal (maximization) scale
  std::optional<double> best_raw;

  auto evaluate = [&](RecordRow row) {
    double y = prob(row.x);
    if (cfg.noise_sd > 0.0) y += cfg.noise_sd * noise(noise_gen);
    row.y_raw = y;
    if (!best_raw || rec.better(y, *best_raw)) best_raw = y;
    row.best_raw = *best_raw;
    row.n_active = l0_distance(row.x, x_def);
    row.rep = rep;
    xs.push_back(row.x);
    ys.push_back(minimize ? -y : y);
    rec.rows.push_back(std::move(row));
  };

  const int extra_sobol = cfg.method == Method::Sobol ? cfg.iterations * cfg.q : 0;
  const std::vector<Configuration> sobol = sobol_sample(space, cfg.init_sobol + extra_sobol, detail::derive_seed(seed, 1));

  RecordRow first;
  first.x = x_def;
  evaluate(first);
  for (int i = 0; i < cfg.init_sobol; ++i) {
    RecordRow row;
    row.x = sobol[static_cast<std::size_t>(i)];
    evaluate(row);
  }

  for (int t = 1; t <= cfg.iterations; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    const double rho = (cfg.method == Method::Bonsai || cfg.method == Method::BonsaiExact) ? rho_at(cfg.rule, t) : 0.0;
    std::vector<bench_detail::Proposal> batch;

    if (cfg.method == Method::Sobol) {
      for (int i = 0; i < cfg.q; ++i) {
        bench_detail::Proposal p;
        p.x = sobol[static_cast<std::size_t>(cfg.init_sobol + (t - 1) * cfg.q + i)];
        p.x_star = p.x;
        rec.ledger.eta.push_back(1.0);
        rec.ledger.rho.push_back(0.0);
        rec.ledger.m_t.push_back(rec.ledger.total());
        batch.push_back(std::move(p));
      }
    } else {
      std::size_t best_i = 0;
      for (std::size_t i = 1; i < ys.size(); ++i)
        if (ys[i] > ys[best_i]) best_i = i;
      const Configuration incumbent_x = xs[best_i];
      const std::uint64_t round_seed = detail::derive_seed(seed, 1000 + static_cast<std::uint64_t>(t));

      std::optional<FunctionAcquisition> injected;
      if (hook) injected = hook(t, xs);
      if (injected) {
        batch.push_back(bench_detail::propose_one(*injected, cfg, space, x_def, incumbent_x, rho,
                                                  detail::derive_seed(round_seed, 1), rec.ledger));
      } else {
        try {
          auto data = std::make_shared<const Dataset>(Dataset::from_raw(space, xs, ys));
          auto model = std::make_shared<const EnsembleGP>(
              fit_ensemble(space, data, cfg.ensemble_size, detail::derive_seed(round_seed, 0), cfg.fit));
          AcqState state = compute_baseline(make_acq_state(cfg.acquisition, model, t), xs);
          for (int i = 0; i < cfg.q; ++i) {
            batch.push_back(bench_detail::propose_one(state, cfg, space, x_def, incumbent_x, rho,
                                                      detail::derive_seed(round_seed, 1 + static_cast<std::uint64_t>(i)),
                                                      rec.ledger));
            if (i + 1 < cfg.q) state = batch_condition(state, batch.back().x);
          }
        } catch (const std::exception& e) {
          throw std::runtime_error("replication " + std::to_string(rep) + ", round " + std::to_string(t) + ": " +
                                   e.what());
        }
      }
    }

    const double ms =
        cfg.record_timing
            ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()
            : 0.0;
    const std::size_t first_idx = rec.ledger.rounds() - batch.size();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      RecordRow row;
      row.t = t;
      row.phase = Phase::BO;
      row.x = batch[i].x;
      row.x_star = batch[i].x_star;
      row.n_active_star = l0_distance(batch[i].x_star, x_def);
      row.eta = rec.ledger.eta[first_idx + i];
      row.rho = rec.ledger.rho[first_idx + i];
      row.m_t = rec.ledger.m_t[first_idx + i];
      row.gen_ms = ms;
      row.acq_evals = batch[i].trace ? batch[i].trace->acq_evals : 0;
      row.trace = std::move(batch[i].trace);
      evaluate(std::move(row));
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Aggregation

struct SummaryRow {
  int index = 0;
  int n = 0;
  double mean = 0.0;
  double two_se = 0.0;
};

struct Summary {
  std::vector<SummaryRow> best_by_iteration;     // index = evaluation number, 1-based
  std::vector<SummaryRow> best_by_active_level;  // index = k
};

namespace bench_detail {
/// Non-finite entries (no data at that level) are skipped; n counts the rest.
inline SummaryRow mean_two_se(int index, std::span<const double> v) {
  SummaryRow r;
  r.index = index;
  // shift by the first finite value so identical inputs give exactly zero spread
  std::optional<double> shift;
  double m = 0.0;
  for (double x : v)
    if (std::isfinite(x)) {
      if (!shift) shift = x;
      m += x - *shift;
      ++r.n;
    }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (r.n == 0) {
    r.mean = r.two_se = nan;
    return r;
  }
  m /= static_cast<double>(r.n);
  double ss = 0.0;
  for (double x : v)
    if (std::isfinite(x)) ss += (x - *shift - m) * (x - *shift - m);
  r.mean = *shift + m;
  r.two_se = r.n > 1 ? 2.0 * std::sqrt(ss / static_cast<double>(r.n - 1)) / std::sqrt(static_cast<double>(r.n)) : nan;
  return r;
}
}  // namespace bench_detail

/// Best-so-far curve for one record per active level k: the best objective among
/// evaluated points with at most k active coordinates.
inline std::vector<double> best_by_active_level(const ReplicationRecord& rec) {
  std::vector<double> out(static_cast<std::size_t>(rec.dim) + 1);
  std::vector<std::optional<double>> at_level(static_cast<std::size_t>(rec.dim) + 1);
  for (const auto& row : rec.rows) {
    auto& slot = at_level[static_cast<std::size_t>(std::clamp(row.n_active, 0, rec.dim))];
    if (!slot || rec.better(row.y_raw, *slot)) slot = row.y_raw;
  }
  std::optional<double> run;
  for (std::size_t k = 0; k < at_level.size(); ++k) {
    if (at_level[k] && (!run || rec.better(*at_level[k], *run))) run = at_level[k];
    out[k] = run ? *run : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

/// Mean and 2 standard errors across replications.
inline Summary aggregate(std::span<const ReplicationRecord> records) {
  if (records.size() < 2) throw std::invalid_argument("aggregate: need at least 2 replications for a standard error");
  const std::size_t n_rows = records.front().rows.size();
  const int dim = records.front().dim;
  for (const auto& r : records) {
    if (r.rows.size() != n_rows) throw std::invalid_argument("aggregate: replications have different lengths");
    if (r.dim != dim) throw std::invalid_argument("aggregate: replications have different dimensions");
  }
  Summary s;
  std::vector<double> col(records.size());
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t r = 0; r < records.size(); ++r) col[r] = records[r].rows[i].best_raw;
    s.best_by_iteration.push_back(bench_detail::mean_two_se(static_cast<int>(i) + 1, col));
  }
  std::vector<std::vector<double>> levels;
  for (const auto& r : records) levels.push_back(best_by_active_level(r));
  for (int k = 0; k <= dim; ++k) {
    for (std::size_t r = 0; r < records.size(); ++r) col[r] = levels[r][static_cast<std::size_t>(k)];
    s.best_by_active_level.push_back(bench_detail::mean_two_se(k, col));
  }
  return s;
}

}  // namespace bonsai

#endif  // BONSAI_BENCH_HPP
