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

#ifndef BONSAI_OPTIMIZER_HPP
#define BONSAI_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "bonsai/detail/box_qn.hpp"
#include "bonsai/sobol.hpp"
#include "bonsai/space.hpp"

namespace bonsai {

/// Anything with a scalar value over configurations can be maximized.
template <typename A>
concept Acquisition = requires(const A& a, const Configuration& x) {
  { a.value(x) } -> std::convertible_to<double>;
};

/// Acquisitions that also expose an analytic gradient in unit-cube coordinates.
template <typename A>
concept DifferentiableAcquisition = requires(const A& a, const Eigen::VectorXd& u, Eigen::VectorXd& g) {
  { a.value_unit(u) } -> std::convertible_to<double>;
  { a.value_and_grad_unit(u, g) } -> std::convertible_to<double>;
};

struct OptBudget {
  int raw_samples = 512;
  int num_starts = 8;
  int max_local_iters = 100;
  double tol = 1e-8;              // step-norm tolerance in unit-cube units
  double fd_step = 1e-6;          // central-difference step in unit-cube units
  bool analytic_gradients = true; // used when the acquisition provides them

  void validate() const {
    if (num_starts < 1) throw std::invalid_argument("OptBudget: num_starts must be >= 1");
    if (raw_samples < num_starts) throw std::invalid_argument("OptBudget: raw_samples must be >= num_starts");
    if (max_local_iters < 0) throw std::invalid_argument("OptBudget: max_local_iters must be >= 0");
    if (!(tol >= 0.0)) throw std::invalid_argument("OptBudget: tol must be >= 0");
    if (!(fd_step > 0.0)) throw std::invalid_argument("OptBudget: fd_step must be > 0");
  }
};

struct OptResult {
  Configuration x;
  double value = -std::numeric_limits<double>::infinity();
  long evaluations = 0;
};

/// Central differences of f in unit-cube coordinates, one-sided where the box cuts the stencil.
template <typename F>
Eigen::VectorXd fd_gradient_unit(F&& f, const Eigen::VectorXd& u, double step) {
  Eigen::VectorXd g(u.size());
  Eigen::VectorXd p = u;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double hi = std::min(1.0, u[j] + step);
    const double lo = std::max(0.0, u[j] - step);
    p[j] = hi;
    const double fh = f(p);
    p[j] = lo;
    const double fl = f(p);
    p[j] = u[j];
    g[j] = (fh - fl) / (hi - lo);
  }
  return g;
}

/// Multi-start maximization of an acquisition over the box.
///
/// Scores `raw_samples` seeded Sobol points plus every anchor (e.g. the default
/// and the incumbent), then runs projected quasi-Newton ascent from each anchor
/// and from the best `num_starts` scored points. The result is the best point
/// seen anywhere; ties go to the earliest candidate.
template <Acquisition A>
OptResult maximize_acq(const A& acq, const SearchSpace& space, const OptBudget& budget, std::uint64_t seed,
                       std::span<const Configuration> anchors = {}) {
  budget.validate();
  const int d = space.dim();
  long evals = 0;
  auto value_unit = [&](const Eigen::VectorXd& u) {
    ++evals;
    double v;
    if constexpr (DifferentiableAcquisition<A>) {
      v = acq.value_unit(u);
    } else {
      v = acq.value(space.from_unit(u));
    }
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> cands;
  cands.reserve(static_cast<std::size_t>(budget.raw_samples) + anchors.size());
  SobolSequence seq(d, seed);
  for (int i = 0; i < budget.raw_samples; ++i) cands.push_back(seq.next());
  const std::size_t n_sobol = cands.size();
  for (const auto& a : anchors) cands.push_back(space.to_unit(space.clip(a)).cwiseMax(0.0).cwiseMin(1.0));

  std::vector<double> vals(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) vals[i] = value_unit(cands[i]);

  std::vector<std::size_t> order(n_sobol);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  std::vector<std::size_t> starts;
  for (std::size_t i = n_sobol; i < cands.size(); ++i) starts.push_back(i);
  for (int k = 0; k < budget.num_starts && static_cast<std::size_t>(k) < order.size(); ++k) starts.push_back(order[static_cast<std::size_t>(k)]);

  std::size_t best = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] > vals[best]) best = i;
  Eigen::VectorXd best_u = cands[best];
  double best_val = vals[best];

  detail::BoxQnOptions qn;
  qn.max_iters = budget.max_local_iters;
  qn.grad_tol = 0.0;
  qn.step_tol = budget.tol;
  qn.max_step = 0.25;
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(d);

  auto fg = [&](const Eigen::VectorXd& u, Eigen::VectorXd& g) -> double {
    if constexpr (DifferentiableAcquisition<A>) {
      if (budget.analytic_gradients) {
        ++evals;
        const double v = acq.value_and_grad_unit(u, g);
        if (!std::isfinite(v)) {
          g.setZero();
          return -std::numeric_limits<double>::infinity();
        }
        return v;
      }
    }
    const double v = value_unit(u);
    if (!std::isfinite(v)) {
      g.setZero();
      return v;
    }
    g = fd_gradient_unit(value_unit, u, budget.fd_step);
    return v;
  };

  for (std::size_t s : starts) {
    if (!std::isfinite(vals[s])) continue;
    auto res = detail::maximize_box(fg, cands[s], lo, hi, qn);
    if (res.value > best_val) {
      best_val = res.value;
      best_u = res.x;
    }
  }

  OptResult out;
  out.x = space.clip(space.from_unit(best_u));
  out.value = acq.value(out.x);
  out.evaluations = evals + 1;
  return out;
}

}  // namespace bonsai

#endif  // BONSAI_OPTIMIZER_HPP
