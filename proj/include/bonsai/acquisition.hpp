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

#ifndef BONSAI_ACQUISITION_HPP
#define BONSAI_ACQUISITION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bonsai/detail/normal.hpp"
#include "bonsai/gp.hpp"
#include "bonsai/space.hpp"

namespace bonsai {

enum class AcqKind { EI, LogEI, UCB };

inline const char* to_string(AcqKind k) {
  switch (k) {
    case AcqKind::EI: return "ei";
    case AcqKind::LogEI: return "logei";
    case AcqKind::UCB: return "ucb";
  }
  return "?";
}

/// UCB exploration weight sqrt(log(t + 2)).
inline double ucb_beta(int t) {
  if (t < 1) throw std::invalid_argument("ucb_beta: round must be >= 1");
  return std::sqrt(std::log(static_cast<double>(t) + 2.0));
}

/// Closed-form EI of a single Gaussian, sigma*h((mu - best)/sigma).
inline double expected_improvement(double mean, double sd, double incumbent) {
  if (!(sd > 0.0)) return std::max(mean - incumbent, 0.0);
  return sd * detail::h((mean - incumbent) / sd);
}

inline double log_expected_improvement(double mean, double sd, double incumbent) {
  if (!(sd > 0.0)) {
    const double imp = mean - incumbent;
    return imp > 0.0 ? std::log(imp) : -std::numeric_limits<double>::infinity();
  }
  return std::log(sd) + detail::log_h((mean - incumbent) / sd);
}

/// Everything the acquisition needs for one BO round.
///
/// Values are in standardized target units. `baseline` is the incremental
/// baseline b_t on the pruning scale; it is filled by compute_baseline and
/// refreshed by batch_condition. States are values: conditioning returns a
/// new state.
struct AcqState {
  AcqKind kind = AcqKind::LogEI;
  std::shared_ptr<const EnsembleGP> model;
  double incumbent = 0.0;
  double beta = 0.0;
  double baseline_value = 0.0;
  int round = 1;
  std::vector<Configuration> history;
  std::vector<Configuration> pending;

  /// Acquisition on its native scale (log scale for LogEI).
  [[nodiscard]] double value(const Configuration& x) const { return value_unit(model->space().to_unit(x)); }

  [[nodiscard]] double value_unit(const Eigen::VectorXd& u) const {
    const MixturePrediction p = model->predict_unit(u);
    switch (kind) {
      case AcqKind::UCB:
        return p.mean + beta * p.sd;
      case AcqKind::EI: {
        double s = 0.0;
        for (const auto& m : p.members) s += expected_improvement(m.mean, m.sd, incumbent);
        return s / static_cast<double>(p.members.size());
      }
      case AcqKind::LogEI: {
        double mx = -std::numeric_limits<double>::infinity();
        std::vector<double> logs;
        logs.reserve(p.members.size());
        for (const auto& m : p.members) {
          logs.push_back(log_expected_improvement(m.mean, m.sd, incumbent));
          mx = std::max(mx, logs.back());
        }
        if (!std::isfinite(mx)) return mx;
        double s = 0.0;
        for (double l : logs) s += std::exp(l - mx);
        return mx + std::log(s / static_cast<double>(logs.size()));
      }
    }
    return 0.0;
  }

  /// Native-scale value and gradient w.r.t. the unit-cube input.
  double value_and_grad_unit(const Eigen::VectorXd& u, Eigen::VectorXd& grad) const {
    const int d = static_cast<int>(u.size());
    const auto& members = model->members();
    const double M = static_cast<double>(members.size());
    std::vector<PredictionGrad> pg;
    pg.reserve(members.size());
    for (const auto& m : members) pg.push_back(m.predict_with_grad(u));
    grad = Eigen::VectorXd::Zero(d);

    switch (kind) {
      case AcqKind::UCB: {
        double m1 = 0.0, m2 = 0.0;
        Eigen::VectorXd dm1 = Eigen::VectorXd::Zero(d), dm2 = Eigen::VectorXd::Zero(d);
        for (const auto& p : pg) {
          m1 += p.mean;
          m2 += p.sd * p.sd + p.mean * p.mean;
          dm1 += p.dmean;
          dm2 += 2.0 * p.sd * p.dsd + 2.0 * p.mean * p.dmean;
        }
        m1 /= M;
        m2 /= M;
        dm1 /= M;
        dm2 /= M;
        const double var = m2 - m1 * m1;
        const double sd = var > 0.0 ? std::sqrt(var) : 0.0;
        grad = dm1;
        if (sd > 0.0) grad += beta * (dm2 - 2.0 * m1 * dm1) / (2.0 * sd);
        return m1 + beta * sd;
      }
      case AcqKind::EI: {
        double s = 0.0;
        for (const auto& p : pg) {
          if (p.sd > 0.0) {
            const double z = (p.mean - incumbent) / p.sd;
            s += p.sd * detail::h(z);
            grad += detail::normal_cdf(z) * p.dmean + detail::normal_pdf(z) * p.dsd;
          } else if (p.mean > incumbent) {
            s += p.mean - incumbent;
            grad += p.dmean;
          }
        }
        grad /= M;
        return s / M;
      }
      case AcqKind::LogEI: {
        std::vector<double> logs(pg.size());
        std::vector<Eigen::VectorXd> grads(pg.size());
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pg.size(); ++i) {
          const auto& p = pg[i];
          if (p.sd > 0.0) {
            const double z = (p.mean - incumbent) / p.sd;
            const detail::EiTerms t = detail::ei_terms(z);
            logs[i] = std::log(p.sd) + t.log_h;
            grads[i] = (t.ratio * p.dmean + (1.0 - z * t.ratio) * p.dsd) / p.sd;
          } else if (p.mean > incumbent) {
            logs[i] = std::log(p.mean - incumbent);
            grads[i] = p.dmean / (p.mean - incumbent);
          } else {
            logs[i] = -std::numeric_limits<double>::infinity();
            grads[i] = Eigen::VectorXd::Zero(d);
          }
          mx = std::max(mx, logs[i]);
        }
        if (!std::isfinite(mx)) return mx;
        double s = 0.0;
        for (std::size_t i = 0; i < pg.size(); ++i) {
          const double w = std::exp(logs[i] - mx);
          s += w;
          grad += w * grads[i];
        }
        grad /= s;
        return mx + std::log(s / M);
      }
    }
    return 0.0;
  }

  /// Monotone map onto the scale the gap rule works on: exp for LogEI, identity otherwise.
  [[nodiscard]] double to_pruning_scale(double v) const { return kind == AcqKind::LogEI ? std::exp(v) : v; }

  [[nodiscard]] double pruning_value(const Configuration& x) const { return to_pruning_scale(value(x)); }

  [[nodiscard]] double baseline() const { return baseline_value; }
};

/// Fresh state for round t: incumbent is the best standardized target so far.
inline AcqState make_acq_state(AcqKind kind, std::shared_ptr<const EnsembleGP> model, int round) {
  if (!model) throw std::invalid_argument("make_acq_state: null model");
  AcqState s;
  s.kind = kind;
  s.round = round;
  s.incumbent = model->data().targets.maxCoeff();
  s.beta = kind == AcqKind::UCB ? ucb_beta(round) : 0.0;
  s.model = std::move(model);
  return s;
}

inline double acq_value(const AcqState& state, const Configuration& x) { return state.value(x); }

inline double to_pruning_scale(const AcqState& state, double v) { return state.to_pruning_scale(v); }

/// b_t = max over evaluated designs (and pending batch points) of the acquisition,
/// on the pruning scale.
inline double baseline_over(const AcqState& state, std::span<const Configuration> points) {
  double b = -std::numeric_limits<double>::infinity();
  for (const auto& x : points) b = std::max(b, state.pruning_value(x));
  return b;
}

/// Returns a copy of `state` holding `history` and its baseline.
inline AcqState compute_baseline(const AcqState& state, std::span<const Configuration> history) {
  if (history.empty())
    throw std::invalid_argument("compute_baseline: history is empty; evaluate an initial design first");
  AcqState out = state;
  out.history.assign(history.begin(), history.end());
  out.baseline_value = baseline_over(out, out.history);
  for (const auto& x : out.pending) out.baseline_value = std::max(out.baseline_value, out.pruning_value(x));
  return out;
}

/// alpha(x*) - alpha(x) on the pruning scale.
template <typename Acq>
double gap(const Acq& acq, const Configuration& x_star, const Configuration& x) {
  return acq.pruning_value(x_star) - acq.pruning_value(x);
}

/// Condition on a finalized batch point with a fantasy observation at the mixture mean,
/// raise the EI incumbent accordingly and recompute the baseline over history and
/// pending points.
inline AcqState batch_condition(const AcqState& state, const Configuration& pruned_point) {
  AcqState out = state;
  const double fantasy = state.model->predict(pruned_point).mean;
  out.model = std::make_shared<const EnsembleGP>(state.model->condition_on(pruned_point, fantasy));
  out.incumbent = std::max(state.incumbent, fantasy);
  out.pending.push_back(pruned_point);
  out.baseline_value = baseline_over(out, out.history);
  out.baseline_value = std::max(out.baseline_value, baseline_over(out, out.pending));
  return out;
}

}  // namespace bonsai

#endif  // BONSAI_ACQUISITION_HPP
