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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bonsai/kernel.hpp"
#include "support.hpp"

namespace bonsai {
namespace {

using testing::Rng;

constexpr KernelFamily kFamilies[] = {KernelFamily::Matern52, KernelFamily::SquaredExponential};

// High-precision values (50 digits, rounded to double).
constexpr double kMaternAtOne = 0.52399410883182032;
constexpr double kMaternArgSup = 0.72360679774997897;  // (5 + sqrt 5) / 10
constexpr double kMaternSup = 0.62607078072551880;
constexpr double kSeSup = 0.60653065971263342;          // exp(-1/2), at r = 1

KernelParams random_params(Rng& g, int d, KernelFamily f) {
  Eigen::VectorXd l(d);
  for (int j = 0; j < d; ++j) l[j] = g.log_uniform(0.05, 5.0);
  return KernelParams{l, g.log_uniform(0.1, 10.0), f};
}

TEST(KernelProfile, KnownValues) {
  EXPECT_DOUBLE_EQ(kernel_profile(KernelFamily::Matern52, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(kernel_profile(KernelFamily::SquaredExponential, 0.0), 1.0);
  EXPECT_NEAR(kernel_profile(KernelFamily::Matern52, 1.0), kMaternAtOne, 1e-15);
  EXPECT_NEAR(kernel_profile(KernelFamily::SquaredExponential, 1.0), kSeSup, 1e-15);
  EXPECT_NEAR(std::abs(kernel_profile_deriv(KernelFamily::Matern52, kMaternArgSup)), kMaternSup, 1e-15);
}

TEST(KernelProfile, SupremumOfDerivative) {
  EXPECT_NEAR(sup_abs_profile_deriv(KernelFamily::Matern52), kMaternSup, 1e-12);
  EXPECT_NEAR(sup_abs_profile_deriv(KernelFamily::SquaredExponential), kSeSup, 1e-12);
}

TEST(KernelProfile, DerivativeMatchesFiniteDifference) {
  for (auto f : kFamilies) {
    for (double r : {0.01, 0.3, 0.7236, 1.0, 2.5, 6.0}) {
      const double h = 1e-6;
      const double fd = (kernel_profile(f, r + h) - kernel_profile(f, r - h)) / (2 * h);
      EXPECT_NEAR(kernel_profile_deriv(f, r), fd, 1e-8) << to_string(f) << " r=" << r;
      EXPECT_NEAR(kernel_profile_deriv_over_r(f, r) * r, kernel_profile_deriv(f, r), 1e-14);
    }
  }
}

TEST(Kernel, GradientMatchesFiniteDifference) {
  Rng g(21);
  for (auto f : kFamilies) {
    for (int trial = 0; trial < 100; ++trial) {
      const int d = g.integer(1, 8);
      KernelParams p = random_params(g, d, f);
      Eigen::VectorXd x = g.uniform_vector(d), x2 = g.uniform_vector(d);
      auto k = [&](const Eigen::VectorXd& z) { return kernel_eval(z, x2, p); };
      const Eigen::VectorXd fd = testing::central_diff(k, x, 1e-6);
      const Eigen::VectorXd an = kernel_grad_x(x, x2, p);
      EXPECT_LE((an - fd).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, p.signal_variance / p.lengthscales.minCoeff()));
    }
  }
}

TEST(Kernel, GradientIsAntisymmetricAndZeroOnDiagonal) {
  Rng g(22);
  for (auto f : kFamilies) {
    KernelParams p = random_params(g, 4, f);
    Eigen::VectorXd x = g.uniform_vector(4), x2 = g.uniform_vector(4);
    EXPECT_LE((kernel_grad_x(x, x2, p) + kernel_grad_x(x2, x, p)).norm(), 1e-14);
    EXPECT_EQ(kernel_grad_x(x, x, p).norm(), 0.0);
  }
}

TEST(Kernel, CoordinateBoundHoldsAndIsTight) {
  Rng g(23);
  for (auto f : kFamilies) {
    for (int trial = 0; trial < 2000; ++trial) {
      const int d = g.integer(1, 6);
      KernelParams p = random_params(g, d, f);
      Eigen::VectorXd x = g.uniform_vector(d), x2 = g.uniform_vector(d);
      const Eigen::VectorXd grad = kernel_grad_x(x, x2, p).cwiseAbs();
      const Eigen::VectorXd bound = coordinate_bound(p);
      for (int j = 0; j < d; ++j) ASSERT_LE(grad[j], bound[j] * (1 + 1e-12));
    }
    // Displacement along one axis at the maximizing radius attains the bound.
    KernelParams p{Eigen::Vector3d(0.3, 1.1, 2.0), 2.5, f};
    const double rstar = f == KernelFamily::Matern52 ? kMaternArgSup : 1.0;
    Eigen::Vector3d x = Eigen::Vector3d::Zero(), x2 = Eigen::Vector3d::Zero();
    x2[1] = rstar * p.lengthscales[1];
    EXPECT_NEAR(std::abs(kernel_grad_x(x, x2, p)[1]), coordinate_bound(p)[1], 1e-12);
  }
}

TEST(Kernel, DoublingLengthscaleHalvesBound) {
  KernelParams p{Eigen::Vector2d(0.4, 3.0), 1.7, KernelFamily::Matern52};
  KernelParams q = p;
  q.lengthscales[0] *= 2.0;
  EXPECT_NEAR(coordinate_bound(q)[0], 0.5 * coordinate_bound(p)[0], 1e-15);
  EXPECT_DOUBLE_EQ(coordinate_bound(q)[1], coordinate_bound(p)[1]);
}

TEST(Kernel, GramMatrixIsPositiveSemidefinite) {
  Rng g(24);
  for (auto f : kFamilies) {
    for (int trial = 0; trial < 20; ++trial) {
      const int d = g.integer(1, 6);
      KernelParams p = random_params(g, d, f);
      std::vector<Eigen::VectorXd> xs;
      for (int i = 0; i < 20; ++i) xs.push_back(g.uniform_vector(d));
      Eigen::MatrixXd K(20, 20);
      for (int i = 0; i < 20; ++i)
        for (int k = 0; k < 20; ++k) K(i, k) = kernel_eval(xs[i], xs[k], p);
      EXPECT_LE((K - K.transpose()).norm(), 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * p.signal_variance);
    }
  }
}

TEST(Kernel, InvariantUnderJointPermutation) {
  Rng g(25);
  KernelParams p = random_params(g, 5, KernelFamily::Matern52);
  Eigen::VectorXd x = g.uniform_vector(5), x2 = g.uniform_vector(5);
  Eigen::VectorXi perm(5);
  perm << 3, 0, 4, 1, 2;
  Eigen::PermutationMatrix<Eigen::Dynamic> P(perm);
  KernelParams q = p;
  q.lengthscales = P * p.lengthscales;
  EXPECT_NEAR(kernel_eval(P * x, P * x2, q), kernel_eval(x, x2, p), 1e-15);
}

TEST(Kernel, RejectsDimensionMismatch) {
  KernelParams p{Eigen::Vector2d(1, 1), 1.0, KernelFamily::Matern52};
  EXPECT_THROW(kernel_eval(Eigen::Vector3d::Zero(), Eigen::Vector2d::Zero(), p), std::invalid_argument);
  EXPECT_THROW((KernelParams{Eigen::Vector2d(1, 0), 1.0}).validate(), std::invalid_argument);
  EXPECT_THROW((KernelParams{Eigen::Vector2d(1, 1), -1.0}).validate(), std::invalid_argument);
}

TEST(Priors, Densities) {
  EXPECT_NEAR(log_half_cauchy(0.0, 1.0), -0.45158270528945486, 1e-15);
  EXPECT_NEAR(log_half_cauchy(2.0, 1.0), -2.0610206177235552, 1e-15);
  EXPECT_EQ(log_half_cauchy(-1.0, 1.0), -std::numeric_limits<double>::infinity());
  EXPECT_NEAR(log_gamma_density(0.5, 0.9, 10.0), -2.9247349379841073, 1e-14);
  EXPECT_EQ(log_gamma_density(0.0, 0.9, 10.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(log_tophat(1.0, 1e-2, 1e4), 0.0);
  EXPECT_EQ(log_tophat(1e-2, 1e-2, 1e4), 0.0);
  EXPECT_EQ(log_tophat(1e4, 1e-2, 1e4), 0.0);
}

TEST(Priors, SignalOutsideTophatIsImpossible) {
  KernelParams p{Eigen::Vector2d(0.5, 0.5), 1e5, KernelFamily::Matern52};
  EXPECT_EQ(log_prior(p, NoiseModel{0.01}, SaasPriors{0.1, false}).value, -std::numeric_limits<double>::infinity());
  p.signal_variance = 5e-3;
  EXPECT_EQ(log_prior(p, NoiseModel{0.01}, SaasPriors{0.1, false}).value, -std::numeric_limits<double>::infinity());
}

TEST(Priors, LogPriorSumsComponents) {
  KernelParams p{Eigen::Vector2d(0.5, 2.0), 1.0, KernelFamily::Matern52};
  const double tau = 0.3;
  const LogPrior lp = log_prior(p, NoiseModel{0.05}, SaasPriors{tau, false});
  double expect = log_gamma_density(0.05, 0.9, 10.0);
  for (double l : {0.5, 2.0}) expect += log_half_cauchy(tau / (l * l), 1.0);
  EXPECT_NEAR(lp.value, expect, 1e-13);
}

TEST(Priors, GradientMatchesFiniteDifference) {
  Rng g(26);
  for (bool jac : {false, true}) {
    for (int trial = 0; trial < 50; ++trial) {
      const int d = g.integer(1, 5);
      Eigen::VectorXd phi(d + 2);
      for (int j = 0; j < d; ++j) phi[j] = std::log(g.log_uniform(0.05, 5.0));
      phi[d] = std::log(g.log_uniform(1e-4, 1.0));
      phi[d + 1] = std::log(g.log_uniform(0.1, 10.0));
      const double tau = g.log_uniform(1e-3, 1.0);
      auto f = [&](const Eigen::VectorXd& t) {
        KernelParams p{t.head(d).array().exp().matrix(), std::exp(t[d + 1]), KernelFamily::Matern52};
        return log_prior(p, NoiseModel{std::exp(t[d])}, SaasPriors{tau, jac}).value;
      };
      KernelParams p{phi.head(d).array().exp().matrix(), std::exp(phi[d + 1]), KernelFamily::Matern52};
      const Eigen::VectorXd an = log_prior(p, NoiseModel{std::exp(phi[d])}, SaasPriors{tau, jac}).grad;
      EXPECT_LE(testing::rel_err(an, testing::central_diff(f, phi, 1e-5), 1.0), 1e-6);
    }
  }
}

}  // namespace
}  // namespace bonsai
