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

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "bonsai/bench.hpp"
#include "bonsai/pruning.hpp"
#include "support.hpp"

namespace bonsai {
namespace {

using testing::Rng;

FunctionAcquisition quad_on_x0() {
  return {[](const Configuration& x) { return 1.0 - (x[0] - 0.9) * (x[0] - 0.9); }, 0.0};
}

FunctionAcquisition joint_reset() {
  return {[](const Configuration& x) {
            const double s = x[0] + x[1] - 1.0;
            return 1.0 - s * s;
          },
          0.0};
}

const Configuration kDef2 = Eigen::Vector2d(0.5, 0.5);

TEST(Gap, HandExample) {
  const auto a = quad_on_x0();
  const Configuration xs = Eigen::Vector2d(0.9, 0.2);
  EXPECT_EQ(gap(a, xs, xs), 0.0);
  EXPECT_NEAR(gap(a, xs, Eigen::Vector2d(0.9, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(gap(a, xs, Eigen::Vector2d(0.5, 0.2)), 0.16, 1e-15);
}

TEST(GreedyPrune, ResetsOnlyHarmlessComponent) {
  const PruneResult r = greedy_prune(quad_on_x0(), Eigen::Vector2d(0.9, 0.2), kDef2, 0.1);
  EXPECT_EQ(r.x_tilde, Eigen::Vector2d(0.9, 0.5));
  EXPECT_EQ(active_set(r.x_tilde, kDef2).indices(), std::vector<int>{0});
  EXPECT_EQ(r.trace.active_before, 2);
  EXPECT_EQ(r.trace.active_after, 1);
  EXPECT_EQ(r.trace.acq_evals, 3);  // two candidates, then one
  EXPECT_NEAR(r.trace.budget, 0.1, 1e-15);
  EXPECT_TRUE(trace_feasible(r.trace));
}

TEST(GreedyPrune, MissesJointReset) {
  const Configuration xs = Eigen::Vector2d(0.8, 0.2);
  const PruneResult g = greedy_prune(joint_reset(), xs, kDef2, 0.05);
  EXPECT_EQ(g.x_tilde, xs);
  EXPECT_EQ(g.trace.active_after, 2);
  ASSERT_EQ(g.trace.steps.size(), 2u);
  for (const auto& s : g.trace.steps) {
    EXPECT_NEAR(s.gap, 0.09, 1e-12);
    EXPECT_FALSE(s.feasible);
  }
  const PruneResult e = exact_prune(joint_reset(), xs, kDef2, 0.05);
  EXPECT_EQ(e.x_tilde, kDef2);
  EXPECT_EQ(e.trace.active_after, 0);
  EXPECT_EQ(e.trace.acq_evals, 1);
  EXPECT_NEAR(e.trace.final_gap, 0.0, 1e-15);
}

TEST(Prune, DefaultIsFixedPoint) {
  for (bool exact : {false, true}) {
    const PruneResult r = exact ? exact_prune(joint_reset(), kDef2, kDef2, 0.2) : greedy_prune(joint_reset(), kDef2, kDef2, 0.2);
    EXPECT_EQ(r.x_tilde, kDef2);
    EXPECT_EQ(r.trace.steps.size(), 0u);
    EXPECT_EQ(r.trace.active_after, 0);
  }
}

TEST(Prune, SkippedWhenNoIncrementalGain) {
  FunctionAcquisition a = quad_on_x0();
  a.baseline_value = 2.0;
  const Configuration xs = Eigen::Vector2d(0.9, 0.2);
  for (bool exact : {false, true}) {
    const PruneResult r = exact ? exact_prune(a, xs, kDef2, 0.5) : greedy_prune(a, xs, kDef2, 0.5);
    EXPECT_TRUE(r.trace.skipped);
    EXPECT_EQ(r.x_tilde, xs);
    EXPECT_EQ(r.trace.acq_evals, 0);
  }
}

TEST(Prune, RejectsBadRho) {
  EXPECT_THROW(greedy_prune(quad_on_x0(), kDef2, kDef2, 1.0), std::invalid_argument);
  EXPECT_THROW(greedy_prune(quad_on_x0(), kDef2, kDef2, -0.1), std::invalid_argument);
  EXPECT_THROW(greedy_prune(quad_on_x0(), Eigen::Vector3d::Zero(), kDef2, 0.1), std::invalid_argument);
}

TEST(Prune, NegativeGapsCanBeRejected) {
  // Resetting x1 to the default improves the acquisition.
  FunctionAcquisition a{[](const Configuration& x) { return 1.0 - (x[1] - 0.5) * (x[1] - 0.5); }, 0.0};
  const Configuration xs = Eigen::Vector2d(0.1, 0.2);
  EXPECT_EQ(greedy_prune(a, xs, kDef2, 0.0).x_tilde, kDef2);
  const PruneResult strict = greedy_prune(a, xs, kDef2, 0.0, PruneOptions{false});
  EXPECT_EQ(strict.x_tilde, Eigen::Vector2d(0.5, 0.2));
}

TEST(ExactPrune, CapIsEnforced) {
  const int d = kExactPruneMaxActive + 1;
  FunctionAcquisition a{[](const Configuration&) { return 1.0; }, 0.0};
  EXPECT_THROW(exact_prune(a, Eigen::VectorXd::Ones(d), Eigen::VectorXd::Zero(d), 0.1), std::invalid_argument);
}

// Property: on random separable acquisitions, pruning is monotone in rho and both
// variants respect the rule, with exact never keeping more components.
TEST(Prune, RandomSeparableInstances) {
  Rng g(61);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = g.integer(1, 8);
    Eigen::VectorXd w(d), c(d);
    for (int j = 0; j < d; ++j) {
      w[j] = g.log_uniform(1e-3, 10.0);
      c[j] = g.uniform();
    }
    FunctionAcquisition a{[w, c](const Configuration& x) { return 5.0 - (w.array() * (x - c).array().square()).sum(); },
                          g.uniform(0.0, 2.0)};
    const Configuration def = Eigen::VectorXd::Constant(d, 0.5);
    const Configuration xs = c;
    int prev = d + 1;
    for (double rho : {0.0, 0.05, 0.2, 0.5, 0.9}) {
      const PruneResult gr = greedy_prune(a, xs, def, rho);
      const PruneResult ex = exact_prune(a, xs, def, rho);
      ASSERT_TRUE(trace_feasible(gr.trace));
      ASSERT_TRUE(trace_feasible(ex.trace));
      ASSERT_LE(ex.trace.active_after, gr.trace.active_after);
      ASSERT_LE(gr.trace.active_after, prev);
      ASSERT_LE(gr.trace.acq_evals, d * (d + 1) / 2);
      prev = gr.trace.active_after;
    }
  }
}

TEST(Schedule, Examples) {
  EXPECT_EQ(rho_at(GapRule{ScheduleKind::InverseT, 1.0, 0.0}, 1), 0.99);
  EXPECT_EQ(rho_at(GapRule{ScheduleKind::InverseT, 1.0, 0.0, std::nullopt}, 1), 1.0);
  EXPECT_EQ(rho_at(GapRule{ScheduleKind::InverseT, 1.0, 0.0}, 4), 0.25);
  EXPECT_EQ(rho_at(GapRule{ScheduleKind::Constant, 0.2, 0.0}, 37), 0.2);
  EXPECT_NEAR(rho_at(GapRule{ScheduleKind::InversePower, 0.5, 1.0}, 10), 0.005, 1e-15);
  double s = 0.0;
  for (int t = 1; t <= 100; ++t) s += rho_at(GapRule{ScheduleKind::InversePower, 1.0, 1.0, std::nullopt}, t);
  EXPECT_NEAR(s, std::numbers::pi * std::numbers::pi / 6.0, 1e-2);
  EXPECT_THROW(rho_at(GapRule{}, 0), std::invalid_argument);
  EXPECT_THROW(rho_at(GapRule{ScheduleKind::Constant, -0.1, 0.0}, 1), std::invalid_argument);
  EXPECT_THROW(rho_at(GapRule{ScheduleKind::Constant, 0.1, 0.0, 1.0}, 1), std::invalid_argument);
}

TEST(AccuracyLedger, AccumulatesRho) {
  AccuracyLedger led;
  const auto a = quad_on_x0();
  const Configuration xs = Eigen::Vector2d(0.9, 0.2);
  const GapRule rule{ScheduleKind::InverseT, 0.5, 0.0};
  double m = 0.0;
  for (int t = 1; t <= 10; ++t) {
    const double rho = rho_at(rule, t);
    const PruneResult r = greedy_prune(a, xs, kDef2, rho);
    const double eta = record_accuracy(led, a, xs, r.x_tilde, rho);
    m += rho;
    EXPECT_GE(eta, 1.0 - rho);
    EXPECT_NEAR(led.total(), m, 1e-15);
  }
  EXPECT_EQ(led.rounds(), 10u);
}

TEST(AccuracyLedger, FlagsViolations) {
  AccuracyLedger led;
  const auto a = quad_on_x0();
  EXPECT_THROW(record_accuracy(led, a, Eigen::Vector2d(0.9, 0.2), Eigen::Vector2d(0.1, 0.2), 0.1), std::logic_error);
  // alpha(x*) <= 0 means eta = 1 by convention.
  FunctionAcquisition neg{[](const Configuration&) { return -1.0; }, 0.0};
  EXPECT_EQ(record_accuracy(led, neg, kDef2, kDef2, 0.1), 1.0);
}

TEST(PruneBatch, SinglePointMatchesGreedy) {
  Rng g(62);
  auto data = std::make_shared<Dataset>();
  data->inputs.resize(10, 3);
  data->targets.resize(10);
  std::vector<Configuration> hist;
  for (int i = 0; i < 10; ++i) {
    hist.push_back(g.uniform_vector(3));
    data->inputs.row(i) = hist.back().transpose();
    data->targets[i] = -std::pow(hist.back()[0] - 0.8, 2);
  }
  std::shared_ptr<const Dataset> cd = data;
  auto model = std::make_shared<const EnsembleGP>(fit_ensemble(SearchSpace::unit(3), cd, 2, 5));
  const AcqState s = compute_baseline(make_acq_state(AcqKind::EI, model, 1), hist);
  const Configuration def = Eigen::Vector3d::Constant(0.5);
  const Configuration xs = Eigen::Vector3d(0.8, 0.1, 0.9);
  const GapRule rule{ScheduleKind::Constant, 0.2, 0.0};
  const BatchPruneResult b = prune_batch(s, {xs}, def, rule, 1);
  const PruneResult r = greedy_prune(s, xs, def, 0.2);
  ASSERT_EQ(b.points.size(), 1u);
  EXPECT_EQ(b.points[0], r.x_tilde);
  EXPECT_EQ(b.traces[0].final_gap, r.trace.final_gap);

  const BatchPruneResult defs = prune_batch(s, {def, def, def}, def, rule, 1);
  for (const auto& p : defs.points) EXPECT_EQ(p, def);

  const BatchPruneResult multi = prune_batch(s, {xs, Eigen::Vector3d(0.7, 0.6, 0.2)}, def, rule, 1);
  for (std::size_t i = 0; i < multi.points.size(); ++i) {
    EXPECT_TRUE(trace_feasible(multi.traces[i]));
    EXPECT_EQ(multi.traces[i].baseline, multi.states[i].baseline());
  }
  EXPECT_EQ(multi.states[1].pending.size(), 1u);
}

}  // namespace
}  // namespace bonsai
