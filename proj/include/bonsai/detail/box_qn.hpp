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

#ifndef BONSAI_DETAIL_BOX_QN_HPP
#define BONSAI_DETAIL_BOX_QN_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace bonsai::detail {

struct BoxQnOptions {
  int max_iters = 200;
  double grad_tol = 1e-5;    // on the projected gradient (inf-norm)
  double step_tol = 0.0;     // stop once an accepted step is shorter than this
  double max_step = 1.0;     // cap on the inf-norm of the first trial step
  int max_backtracks = 40;
};

struct BoxQnResult {
  Eigen::VectorXd x;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Projected BFGS ascent on a box.
///
/// `fg(x, grad)` returns f(x) and writes the gradient. Non-finite values are
/// treated as failed trial points and shrink the step. Variables sitting on a
/// bound with the gradient pointing outward are frozen for that iteration.
template <typename ValueAndGrad>
BoxQnResult maximize_box(ValueAndGrad&& fg, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper, const BoxQnOptions& opt) {
  const Eigen::Index n = x0.size();
  BoxQnResult res;
  Eigen::VectorXd x = x0.cwiseMax(lower).cwiseMin(upper);
  Eigen::VectorXd g(n);
  double f = fg(x, g);
  res.evaluations = 1;
  res.x = x;
  res.value = f;
  if (!std::isfinite(f) || !g.allFinite()) return res;

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;
  Eigen::VectorXd gn(n);
  Eigen::VectorXd mask(n);

  for (int it = 0; it < opt.max_iters; ++it) {
    res.iterations = it + 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned_lo = x[i] <= lower[i] && g[i] < 0.0;
      const bool pinned_hi = x[i] >= upper[i] && g[i] > 0.0;
      mask[i] = (pinned_lo || pinned_hi) ? 0.0 : 1.0;
    }
    const Eigen::VectorXd pg = mask.cwiseProduct(g);
    if (pg.lpNorm<Eigen::Infinity>() <= opt.grad_tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd p = mask.cwiseProduct(H * pg);
    if (!(p.dot(pg) > 0.0)) {
      H.setIdentity();
      fresh = true;
      p = pg;
    }
    double a = 1.0;
    if (fresh) {
      const double pmax = p.lpNorm<Eigen::Infinity>();
      if (pmax > opt.max_step) a = opt.max_step / pmax;
    }

    bool accepted = false;
    Eigen::VectorXd xn;
    double fn = 0.0;
    for (int bt = 0; bt < opt.max_backtracks; ++bt, a *= 0.5) {
      xn = (x + a * p).cwiseMax(lower).cwiseMin(upper);
      if ((xn - x).lpNorm<Eigen::Infinity>() == 0.0) break;
      fn = fg(xn, gn);
      ++res.evaluations;
      if (std::isfinite(fn) && gn.allFinite() && fn >= f + 1e-4 * g.dot(xn - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh) break;
      H.setIdentity();
      fresh = true;
      continue;
    }

    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = g - gn;  // gradient change of -f
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) H *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n) - rho * y * s.transpose();
      H = V.transpose() * H * V + rho * s * s.transpose();
      fresh = false;
    }
    x = xn;
    f = fn;
    g = gn;
    res.x = x;
    res.value = f;
    if (s.norm() < opt.step_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace bonsai::detail

#endif  // BONSAI_DETAIL_BOX_QN_HPP
