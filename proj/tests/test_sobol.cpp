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

#include <array>
#include <stdexcept>

#include "bonsai/sobol.hpp"

namespace bonsai {
namespace {

TEST(Sobol, FirstPointIsCentre) {
  SobolSequence s(1);
  EXPECT_EQ(s.next()[0], 0.5);
  EXPECT_EQ(s.next()[0], 0.75);
  EXPECT_EQ(s.next()[0], 0.25);
}

// Reference values from an independent unscrambled Joe-Kuo implementation, with the
// all-zeros point dropped.
TEST(Sobol, MatchesReferenceSequence) {
  SobolSequence s(64);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 4096; ++i) pts.push_back(s.next());
  const std::array<int, 5> dims = {0, 1, 2, 10, 63};
  const std::array<double, 5> p1000 = {0.7197265625, 0.5966796875, 0.0185546875, 0.5849609375, 0.9462890625};
  const std::array<double, 5> p4095 = {0.0003662109375, 0.4705810546875, 0.8358154296875, 0.8450927734375,
                                       0.4456787109375};
  for (std::size_t k = 0; k < dims.size(); ++k) {
    EXPECT_EQ(pts[1000][dims[k]], p1000[k]) << "dim " << dims[k];
    EXPECT_EQ(pts[4095][dims[k]], p4095[k]) << "dim " << dims[k];
  }
  EXPECT_EQ(pts[3][2], 0.625);
  EXPECT_EQ(pts[3][3], 0.875);
  EXPECT_EQ(pts[15][5], 0.96875);
}

TEST(Sobol, QuadrantBalance) {
  SobolSequence s(2);
  int counts[4][4] = {};
  // the net property holds for the first 2^m points including the origin
  counts[0][0] = 1;
  for (int i = 0; i < 1023; ++i) {
    const Eigen::VectorXd p = s.next();
    ++counts[static_cast<int>(p[0] * 4)][static_cast<int>(p[1] * 4)];
  }
  for (auto& row : counts)
    for (int c : row) EXPECT_EQ(c, 64);
}

TEST(Sobol, ShiftedQuadrantBalance) {
  // a digital shift preserves the net property for the first 2^m emitted points
  SobolSequence s(2, 42);
  int counts[4][4] = {};
  for (int i = 0; i < 1024; ++i) {
    const Eigen::VectorXd p = s.next();
    ++counts[static_cast<int>(p[0] * 4)][static_cast<int>(p[1] * 4)];
  }
  int total = 0;
  for (auto& row : counts)
    for (int c : row) {
      EXPECT_GE(c, 63);
      EXPECT_LE(c, 65);
      total += c;
    }
  EXPECT_EQ(total, 1024);
}

TEST(Sobol, DimensionRange) {
  EXPECT_THROW(SobolSequence(0), std::invalid_argument);
  EXPECT_THROW(SobolSequence(65), std::invalid_argument);
  EXPECT_NO_THROW(SobolSequence(64));
  EXPECT_THROW(sobol_sample(SearchSpace::unit(65), 1, 0), std::invalid_argument);
}

TEST(SobolSample, EmptyAndNegative) {
  EXPECT_TRUE(sobol_sample(SearchSpace::unit(3), 0, 1).empty());
  EXPECT_THROW(sobol_sample(SearchSpace::unit(3), -1, 1), std::invalid_argument);
}

TEST(SobolSample, ReproducibleAndSeedDependent) {
  const SearchSpace box(Eigen::Vector3d(-1, 0, 10), Eigen::Vector3d(1, 5, 20));
  const auto a = sobol_sample(box, 50, 7), b = sobol_sample(box, 50, 7), c = sobol_sample(box, 50, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const auto prefix = sobol_sample(box, 20, 7);
  EXPECT_TRUE(std::equal(prefix.begin(), prefix.end(), a.begin()));
}

TEST(SobolSample, StrictlyInsideBounds) {
  const SearchSpace box(Eigen::Vector2d(-5, 0), Eigen::Vector2d(10, 15));
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (const auto& x : sobol_sample(box, 256, seed)) {
      EXPECT_TRUE((x.array() > box.lower().array()).all());
      EXPECT_TRUE((x.array() < box.upper().array()).all());
    }
}

}  // namespace
}  // namespace bonsai
