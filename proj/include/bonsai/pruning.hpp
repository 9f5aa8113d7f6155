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

#ifndef BONSAI_PRUNING_HPP
#define BONSAI_PRUNING_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bonsai/acquisition.hpp"
#include "bonsai/space.hpp"

namespace bonsai {

/// An acquisition the gap rule can be applied to: values on the pruning scale and a baseline b_t.
template <typename A>
concept PruningAcquisition = requires(const A& a, const Configuration& x) {
  { a.pruning_value(x) } -> std::convertible_to<double>;
  { a.baseline() } -> std::convertible_to<double>;
};

// ---------------------------------------------------------------------------
// Threshold schedules

enum class ScheduleKind { Constant, InverseT, InversePower };

inline const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::InverseT: return "inverse_t";
    case ScheduleKind::InversePower: return "inverse_power";
  }
  return "?";
}

/// rho_t schedule. `rho_max` clamps every value; nullopt disables the clamp.
struct GapRule {
  ScheduleKind kind = ScheduleKind::Constant;
  double rho0 = 0.2;
  double epsilon = 0.0;
  std::optional<double> rho_max = 0.99;

  void validate() const {
    if (!(rho0 >= 0.0) || !std::isfinite(rho0)) throw std::invalid_argument("GapRule: rho0 must be finite and >= 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("GapRule: epsilon must be >= 0");
    if (rho_max && !(*rho_max >= 0.0 && *rho_max < 1.0))
      throw std::invalid_argument("GapRule: rho_max must lie in [0, 1)");
  }
};

inline double rho_at(const GapRule& rule, int t) {
  rule.validate();
  if (t < 1) throw std::invalid_argument("rho_at: round must be >= 1");
  const double tt = static_cast<double>(t);
  double rho = rule.rho0;
  switch (rule.kind) {
    case ScheduleKind::Constant: break;
    case ScheduleKind::InverseT: rho = std::min(rule.rho0 / tt, rule.rho0); break;
    case ScheduleKind::InversePower: rho = std::min(rule.rho0 / std::pow(tt, 1.0 + rule.epsilon), rule.rho0); break;
  }
  rho = std::max(rho, 0.0);
  if (rule.rho_max) rho = std::min(rho, *rule.rho_max);
  return rho;
}

// ---------------------------------------------------------------------------
// Pruning

struct PruneStep {
  int pass = 0;        // outer iteration of the greedy loop (subset size rank for exact)
  int component = -1;  // reset candidate (-1 for subset candidates of exact pruning)
  std::vector<int> kept;  // subset S kept active (exact pruning only)
  double gap = 0.0;
  bool feasible = false;
  bool accepted = false;
};

struct PruneTrace {
  std::vector<PruneStep> steps;
  long acq_evals = 0;        // candidate evaluations, not counting alpha(x*)
  double final_gap = 0.0;
  double rho_used = 0.0;
  double budget = 0.0;       // rho * (alpha(x*) - b) on the pruning scale
  double alpha_star = 0.0;   // alpha(x*) on the pruning scale
  double alpha_tilde = 0.0;  // alpha(x*) - b
  double baseline = 0.0;
  bool skipped = false;      // alpha(x*) - b <= 0: pruning not applied
  int active_before = 0;
  int active_after = 0;
};

struct PruneResult {
  Configuration x_tilde;
  PruneTrace trace;
};

struct PruneOptions {
  bool accept_negative_gaps = true;
};

namespace pruning_detail {

inline bool feasible(double g, double budget, const PruneOptions& opt) {
  if (!opt.accept_negative_gaps && g < 0.0) return false;
  return g <= budget;
}

template <PruningAcquisition A>
PruneTrace start_trace(const A& acq, const Configuration& x_star, const Configuration& x_def, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("prune: rho must lie in [0, 1)");
  detail::require_same_dim(x_star, x_def, "prune");
  PruneTrace tr;
  tr.rho_used = rho;
  tr.alpha_star = acq.pruning_value(x_star);
  tr.baseline = acq.baseline();
  tr.alpha_tilde = tr.alpha_star - tr.baseline;
  tr.budget = rho * tr.alpha_tilde;
  tr.active_before = l0_distance(x_star, x_def);
  tr.active_after = tr.active_before;
  tr.skipped = !(tr.alpha_tilde > 0.0);
  return tr;
}

}  // namespace pruning_detail

/// Sequential greedy pruning.
///
/// Starting from x*, repeatedly try resetting each still-active component to its
/// default, and commit the feasible reset with the smallest gap (lowest index on
/// ties). Stops when no reset is feasible. Feasible means
///     alpha(x*) - alpha(candidate) <= rho * (alpha(x*) - b)
/// on the pruning scale. Returns x* untouched when alpha(x*) - b <= 0.
template <PruningAcquisition A>
PruneResult greedy_prune(const A& acq, const Configuration& x_star, const Configuration& x_def, double rho,
                         const PruneOptions& opt = {}) {
  PruneResult out{x_star, pruning_detail::start_trace(acq, x_star, x_def, rho)};
  PruneTrace& tr = out.trace;
  if (tr.skipped) return out;

  std::vector<int> active = active_set(x_star, x_def).indices();
  Configuration cur = x_star;
  for (int pass = 0; !active.empty(); ++pass) {
    int best_j = -1;
    double best_gap = std::numeric_limits<double>::infinity();
    std::size_t best_step = 0;
    for (int j : active) {
      Configuration cand = cur;
      cand[j] = x_def[j];
      const double g = tr.alpha_star - acq.pruning_value(cand);
      ++tr.acq_evals;
      const bool ok = pruning_detail::feasible(g, tr.budget, opt);
      tr.steps.push_back({pass, j, {}, g, ok, false});
      if (ok && g < best_gap) {
        best_gap = g;
        best_j = j;
        best_step = tr.steps.size() - 1;
      }
    }
    if (best_j < 0) break;
    cur[best_j] = x_def[best_j];
    tr.steps[best_step].accepted = true;
    tr.final_gap = best_gap;
    active.erase(std::find(active.begin(), active.end(), best_j));
  }
  tr.active_after = static_cast<int>(active.size());
  out.x_tilde = std::move(cur);
  return out;
}

inline constexpr int kExactPruneMaxActive = 20;

/// Exhaustive pruning: the feasible P_S(x*) with the fewest kept components,
/// ties broken by smallest gap, then by lexicographic order of S.
template <PruningAcquisition A>
PruneResult exact_prune(const A& acq, const Configuration& x_star, const Configuration& x_def, double rho,
                        const PruneOptions& opt = {}) {
  const ActiveSet act = active_set(x_star, x_def);
  if (static_cast<int>(act.size()) > kExactPruneMaxActive)
    throw std::invalid_argument("exact_prune: active set of size " + std::to_string(act.size()) +
                                " exceeds the enumeration cap of " + std::to_string(kExactPruneMaxActive) +
                                "; use greedy_prune");
  PruneResult out{x_star, pruning_detail::start_trace(acq, x_star, x_def, rho)};
  PruneTrace& tr = out.trace;
  if (tr.skipped) return out;

  const std::vector<int>& a = act.indices();
  const int m = static_cast<int>(a.size());
  for (int k = 0; k < m; ++k) {
    // lexicographic k-combinations of positions 0..m-1
    std::vector<int> pos(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pos[static_cast<std::size_t>(i)] = i;
    std::optional<std::size_t> best_step;
    double best_gap = std::numeric_limits<double>::infinity();
    std::vector<int> best_keep;
    for (;;) {
      std::vector<int> keep;
      keep.reserve(pos.size());
      for (int p : pos) keep.push_back(a[static_cast<std::size_t>(p)]);
      const Configuration cand = project(x_star, ActiveSet(keep), x_def);
      const double g = tr.alpha_star - acq.pruning_value(cand);
      ++tr.acq_evals;
      const bool ok = pruning_detail::feasible(g, tr.budget, opt);
      tr.steps.push_back({k, -1, keep, g, ok, false});
      if (ok && g < best_gap) {
        best_gap = g;
        best_step = tr.steps.size() - 1;
        best_keep = keep;
      }
      int i = k - 1;
      while (i >= 0 && pos[static_cast<std::size_t>(i)] == m - k + i) --i;
      if (i < 0) break;
      ++pos[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
    }
    if (best_step) {
      tr.steps[*best_step].accepted = true;
      tr.final_gap = best_gap;
      tr.active_after = k;
      out.x_tilde = project(x_star, ActiveSet(best_keep), x_def);
      return out;
    }
  }
  return out;  // only S = A(x*) is feasible
}

// ---------------------------------------------------------------------------
// Batches

struct BatchPruneResult {
  std::vector<Configuration> points;
  std::vector<PruneTrace> traces;
  std::vector<AcqState> states;  // state each point was pruned under
};

/// Prune a sequential-greedy batch. Point i is pruned under the state conditioned
/// (Kriging believer) on the already pruned points 0..i-1.
inline BatchPruneResult prune_batch(const AcqState& state, const std::vector<Configuration>& x_stars,
                                    const Configuration& x_def, const GapRule& rule, int t,
                                    const PruneOptions& opt = {}) {
  BatchPruneResult out;
  const double rho = rho_at(rule, t);
  AcqState cur = state;
  for (std::size_t i = 0; i < x_stars.size(); ++i) {
    PruneResult r = greedy_prune(cur, x_stars[i], x_def, rho, opt);
    out.states.push_back(cur);
    out.points.push_back(r.x_tilde);
    out.traces.push_back(std::move(r.trace));
    if (i + 1 < x_stars.size()) cur = batch_condition(cur, out.points.back());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Accuracy bookkeeping

/// Per-round acquisition accuracy and the accumulated worst-case inaccuracy
/// M_T = sum_t (1 - eta~_t) with eta~_t = 1 - rho_t.
struct AccuracyLedger {
  std::vector<double> eta;
  std::vector<double> rho;
  std::vector<double> m_t;

  [[nodiscard]] double total() const { return m_t.empty() ? 0.0 : m_t.back(); }
  [[nodiscard]] std::size_t rounds() const { return eta.size(); }
};

/// Records eta_t = alpha(x~)/alpha(x*) (1 when alpha(x*) <= 0) and adds rho_t to M_T.
/// Throws std::logic_error when the lower bound eta_t >= 1 - rho_t is broken in a
/// round where it must hold (b_t >= 0, alpha(x*) > 0, gap rule applied).
template <PruningAcquisition A>
double record_accuracy(AccuracyLedger& ledger, const A& acq, const Configuration& x_star,
                       const Configuration& x_tilde, double rho_t) {
  const double a_star = acq.pruning_value(x_star);
  const double b = acq.baseline();
  double eta = 1.0;
  if (a_star > 0.0) {
    const double a_tilde = acq.pruning_value(x_tilde);
    eta = a_tilde / a_star;
    if (b >= 0.0 && a_star - b > 0.0 && eta < 1.0 - rho_t - 1e-9)
      throw std::logic_error("record_accuracy: eta " + std::to_string(eta) + " below 1 - rho = " +
                             std::to_string(1.0 - rho_t) + "; pruning broke the gap rule");
  }
  eta = std::clamp(eta, 0.0, 1.0);
  ledger.eta.push_back(eta);
  ledger.rho.push_back(rho_t);
  ledger.m_t.push_back(ledger.total() + rho_t);
  return eta;
}

/// Audit one trace against the gap rule.
inline bool trace_feasible(const PruneTrace& tr, double tol = 1e-9) {
  if (tr.skipped) return true;
  return tr.final_gap <= tr.budget + tol;
}

}  // namespace bonsai

#endif  // BONSAI_PRUNING_HPP
