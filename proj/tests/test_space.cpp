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

#include <stdexcept>

#include "bonsai/space.hpp"
#include "support.hpp"

namespace bonsai {
namespace {

TEST(SearchSpace, RejectsEmptyAndInvertedBounds) {
  EXPECT_THROW(SearchSpace(Eigen::VectorXd(0), Eigen::VectorXd(0)), std::invalid_argument);
  EXPECT_THROW(SearchSpace(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)), std::invalid_argument);
  EXPECT_THROW(SearchSpace(Eigen::Vector2d(0, 0), Eigen::Vector3d(1, 1, 1)), std::invalid_argument);
  EXPECT_THROW(SearchSpace::unit(0), std::invalid_argument);
}

TEST(SearchSpace, UnitRoundTrip) {
  const SearchSpace s(Eigen::Vector2d(-5, 0), Eigen::Vector2d(10, 15));
  const Eigen::Vector2d x(2.5, 7.5);
  EXPECT_TRUE(s.to_unit(x).isApprox(Eigen::Vector2d(0.5, 0.5)));
  EXPECT_TRUE(s.from_unit(s.to_unit(x)).isApprox(x));
  EXPECT_TRUE(s.center().isApprox(x));
  EXPECT_TRUE(s.contains(x));
  EXPECT_FALSE(s.contains(Eigen::Vector2d(11, 0)));
  EXPECT_EQ(s.clip(Eigen::Vector2d(11, -1)), Eigen::Vector2d(10, 0));
  EXPECT_THROW(s.to_unit(Eigen::Vector3d(0, 0, 0)), std::invalid_argument);
}

TEST(ActiveSet, SortsAndDeduplicates) {
  const ActiveSet a{3, 1, 3, 0};
  EXPECT_EQ(a.indices(), (std::vector<int>{0, 1, 3}));
  EXPECT_TRUE(a.contains(1));
  EXPECT_FALSE(a.contains(2));
  EXPECT_EQ(a.without(1), (ActiveSet{0, 3}));
  EXPECT_TRUE((ActiveSet{0, 3}).is_subset_of(a));
  EXPECT_THROW(ActiveSet({-1, 2}), std::out_of_range);
}

TEST(ActiveSetOf, DefaultHasNoActiveComponents) {
  const Eigen::Vector3d x_def(0.5, 0.5, 0.5);
  EXPECT_TRUE(active_set(x_def, x_def).empty());
  EXPECT_EQ(l0_distance(x_def, x_def), 0);
}

TEST(ActiveSetOf, ComparesComponents) {
  const Eigen::Vector3d x(0.1, 0.5, 0.9), x_def(0.5, 0.5, 0.5);
  EXPECT_EQ(active_set(x, x_def), (ActiveSet{0, 2}));
  EXPECT_EQ(l0_distance(x, x_def), 2);
  EXPECT_EQ(l0_distance(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 1, 1)), 3);
}

TEST(ActiveSetOf, ExactComparison) {
  const Eigen::Vector2d x_def(0.5, 0.5);
  const Eigen::Vector2d x(0.5 + 1e-15, 0.5);
  EXPECT_EQ(active_set(x, x_def), (ActiveSet{0}));
}

TEST(ActiveSetOf, DimensionMismatchThrows) {
  EXPECT_THROW(active_set(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0)), std::invalid_argument);
  EXPECT_THROW(l0_distance(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0)), std::invalid_argument);
}

TEST(Project, KeepsSelectedComponents) {
  const Eigen::Vector2d x(0.9, 0.2), x_def(0.5, 0.5);
  EXPECT_EQ(project(x, ActiveSet{0}, x_def), Eigen::Vector2d(0.9, 0.5));
  EXPECT_EQ(project(x, ActiveSet::full(2), x_def), x);
  EXPECT_EQ(project(x, ActiveSet{}, x_def), x_def);
}

TEST(Project, Errors) {
  const Eigen::Vector2d x(0.9, 0.2), x_def(0.5, 0.5);
  EXPECT_THROW(project(x, ActiveSet{2}, x_def), std::out_of_range);
  EXPECT_THROW(project(x, ActiveSet{0}, Eigen::Vector3d(0, 0, 0)), std::invalid_argument);
}

TEST(ProjectProperty, IdempotentAndWithinKeepSet) {
  testing::Rng rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = rng.integer(1, 12);
    const Eigen::VectorXd x_def = rng.uniform_vector(d);
    Eigen::VectorXd x = rng.uniform_vector(d);
    for (int j = 0; j < d; ++j)
      if (rng.coin(0.3)) x[j] = x_def[j];
    std::vector<int> keep;
    for (int j = 0; j < d; ++j)
      if (rng.coin()) keep.push_back(j);
    const ActiveSet S(keep);
    const Eigen::VectorXd p = project(x, S, x_def);
    EXPECT_EQ(project(p, S, x_def), p);
    EXPECT_TRUE(active_set(p, x_def).is_subset_of(S));
    EXPECT_LE(l0_distance(p, x_def), static_cast<int>(S.size()));
    EXPECT_EQ(l0_distance(x, x_def), l0_distance(x_def, x));
    EXPECT_EQ(l0_distance(x, x_def) == 0, x == x_def);
  }
}

}  // namespace
}  // namespace bonsai
