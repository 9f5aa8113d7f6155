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

#ifndef BONSAI_KERNEL_HPP
#define BONSAI_KERNEL_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace bonsai {

enum class KernelFamily { Matern52, SquaredExponential };

inline const char* to_string(KernelFamily f) {
  return f == KernelFamily::Matern52 ? "matern52" : "squared_exponential";
}

/// Stationary ARD covariance k(x,x') = s * phi(r), with r the lengthscale-weighted distance.
struct KernelParams {
  Eigen::VectorXd lengthscales;
  double signal_variance = 1.0;
  KernelFamily family = KernelFamily::Matern52;

  [[nodiscard]] int dim() const { return static_cast<int>(lengthscales.size()); }

  void validate() const {
    if (lengthscales.size() < 1) throw std::invalid_argument("KernelParams: empty lengthscales");
    if (!((lengthscales.array() > 0.0).all() && lengthscales.allFinite()))
      throw std::invalid_argument("KernelParams: lengthscales must be positive and finite");
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
      throw std::invalid_argument("KernelParams: signal variance must be positive");
  }
};

struct NoiseModel {
  double noise_variance = 1e-2;
};

/// Hyperpriors of one ensemble member.
///
///   tau / l_j^2 ~ HalfCauchy(1.0),  noise ~ Gamma(0.9, rate 10.0),  s ~ Tophat(1e-2, 1e4)
///
/// Log-densities are taken w.r.t. the log-parameters when `jacobian` is set
/// (change of variables for the HalfCauchy and Gamma terms). The tophat is an
/// unnormalized indicator either way.
struct SaasPriors {
  static constexpr double kHalfCauchyScale = 1.0;
  static constexpr double kNoiseShape = 0.9;
  static constexpr double kNoiseRate = 10.0;
  static constexpr double kSignalLower = 1e-2;
  static constexpr double kSignalUpper = 1e4;

  double tau = 0.1;
  bool jacobian = true;
};

namespace kernel_detail {
inline constexpr double kSqrt5 = 2.23606797749978969640917366873128;
}

/// phi(r), with phi(0) = 1.
inline double kernel_profile(KernelFamily family, double r) {
  using kernel_detail::kSqrt5;
  if (family == KernelFamily::Matern52) {
    const double a = kSqrt5 * r;
    return (1.0 + a + a * a / 3.0) * std::exp(-a);
  }
  return std::exp(-0.5 * r * r);
}

/// phi'(r).
inline double kernel_profile_deriv(KernelFamily family, double r) {
  using kernel_detail::kSqrt5;
  if (family == KernelFamily::Matern52) {
    const double a = kSqrt5 * r;
    return -(5.0 / 3.0) * r * (1.0 + a) * std::exp(-a);
  }
  return -r * std::exp(-0.5 * r * r);
}

/// phi'(r) / r, finite at r = 0. Lets gradients skip the division by r.
inline double kernel_profile_deriv_over_r(KernelFamily family, double r) {
  using kernel_detail::kSqrt5;
  if (family == KernelFamily::Matern52) {
    const double a = kSqrt5 * r;
    return -(5.0 / 3.0) * (1.0 + a) * std::exp(-a);
  }
  return -std::exp(-0.5 * r * r);
}

namespace kernel_detail {
inline void check_dims(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const KernelParams& p) {
  if (x.size() != p.lengthscales.size() || x2.size() != p.lengthscales.size())
    throw std::invalid_argument("kernel: input dimension " + std::to_string(x.size()) + "/" +
                                std::to_string(x2.size()) + " does not match lengthscales (" +
                                std::to_string(p.lengthscales.size()) + ")");
}
}  // namespace kernel_detail

inline double scaled_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                              const KernelParams& p) {
  kernel_detail::check_dims(x, x2, p);
  return ((x - x2).array() / p.lengthscales.array()).matrix().norm();
}

inline double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const KernelParams& p) {
  return p.signal_variance * kernel_profile(p.family, scaled_distance(x, x2, p));
}

/// dk(x, x2)/dx.
inline Eigen::VectorXd kernel_grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                                     const KernelParams& p) {
  const double r = scaled_distance(x, x2, p);
  const double c = p.signal_variance * kernel_profile_deriv_over_r(p.family, r);
  return (c * (x - x2).array() / p.lengthscales.array().square()).matrix();
}

/// sup_{r >= 0} |phi'(r)|, found by a dense grid on [0, 50] followed by golden-section
/// refinement around the best grid cell. Computed once per family.
inline double sup_abs_profile_deriv(KernelFamily family) {
  auto compute = [](KernelFamily f) {
    auto g = [f](double r) { return std::abs(kernel_profile_deriv(f, r)); };
    constexpr int kGrid = 50000;
    constexpr double kMax = 50.0;
    constexpr double h = kMax / kGrid;
    int best = 0;
    double best_val = g(0.0);
    for (int i = 1; i <= kGrid; ++i) {
      double v = g(i * h);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    double a = std::max(0.0, (best - 1) * h);
    double b = std::min(kMax, (best + 1) * h);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
      if (g(c) > g(d)) {
        b = d;
      } else {
        a = c;
      }
      c = b - inv_phi * (b - a);
      d = a + inv_phi * (b - a);
    }
    return std::max(best_val, g(0.5 * (a + b)));
  };
  static const double matern = compute(KernelFamily::Matern52);
  static const double se = compute(KernelFamily::SquaredExponential);
  return family == KernelFamily::Matern52 ? matern : se;
}

/// Per-coordinate bound on |dk/dx_j|: s * sup|phi'| / l_j.
inline Eigen::VectorXd coordinate_bound(const KernelParams& p) {
  const double c = p.signal_variance * sup_abs_profile_deriv(p.family);
  return (c / p.lengthscales.array()).matrix();
}

inline double log_half_cauchy(double v, double scale) {
  if (v < 0.0) return -std::numeric_limits<double>::infinity();
  const double z = v / scale;
  return std::log(2.0 / (std::numbers::pi * scale)) - std::log1p(z * z);
}

inline double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

inline double log_tophat(double x, double lo, double hi) {
  return (x >= lo && x <= hi) ? 0.0 : -std::numeric_limits<double>::infinity();
}

/// Log prior and its gradient w.r.t. (log l_1..log l_d, log noise, log s).
struct LogPrior {
  double value = 0.0;
  Eigen::VectorXd grad;
};

inline LogPrior log_prior(const KernelParams& params, const NoiseModel& noise,
                          const SaasPriors& priors) {
  const int d = params.dim();
  LogPrior out;
  out.grad = Eigen::VectorXd::Zero(d + 2);
  const double jac = priors.jacobian ? 1.0 : 0.0;

  for (int j = 0; j < d; ++j) {
    const double l = params.lengthscales[j];
    const double v = priors.tau / (l * l);
    out.value += log_half_cauchy(v, SaasPriors::kHalfCauchyScale) + jac * std::log(2.0 * v);
    const double z = v / SaasPriors::kHalfCauchyScale;
    // dv/dlog(l) = -2v
    out.grad[j] = 4.0 * z * z / (1.0 + z * z) - 2.0 * jac;
  }

  const double s2 = noise.noise_variance;
  out.value += log_gamma_density(s2, SaasPriors::kNoiseShape, SaasPriors::kNoiseRate) +
               jac * std::log(s2);
  out.grad[d] = (SaasPriors::kNoiseShape - 1.0) + jac - SaasPriors::kNoiseRate * s2;

  out.value += log_tophat(params.signal_variance, SaasPriors::kSignalLower, SaasPriors::kSignalUpper);
  out.grad[d + 1] = 0.0;
  return out;
}

}  // namespace bonsai

#endif  // BONSAI_KERNEL_HPP
