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

#ifndef BONSAI_GP_HPP
#define BONSAI_GP_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
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

#include <Eigen/Dense>

#include "bonsai/detail/box_qn.hpp"
#include "bonsai/detail/rng.hpp"
#include "bonsai/kernel.hpp"
#include "bonsai/space.hpp"

namespace bonsai {

/// Raised when K + noise*I cannot be factorized even after jitter escalation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kNoiseFloor = 1e-8;
inline constexpr double kMaxJitter = 1e-4;

/// Training data in model coordinates: inputs in [0,1]^d, targets standardized.
struct Dataset {
  Eigen::MatrixXd inputs;   // n x d
  Eigen::VectorXd targets;  // n
  double raw_mean = 0.0;
  double raw_std = 1.0;

  [[nodiscard]] int size() const { return static_cast<int>(inputs.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(inputs.cols()); }

  [[nodiscard]] double standardize(double y) const { return (y - raw_mean) / raw_std; }
  [[nodiscard]] double destandardize(double z) const { return raw_mean + raw_std * z; }

  /// Normalize configurations into the unit cube and standardize y (sample std;
  /// 1 when every target is equal or n == 1).
  static Dataset from_raw(const SearchSpace& space, std::span<const Configuration> xs,
                          std::span<const double> ys) {
    if (xs.empty()) throw std::invalid_argument("Dataset: need at least one observation");
    if (xs.size() != ys.size()) throw std::invalid_argument("Dataset: x/y length mismatch");
    const auto n = static_cast<Eigen::Index>(xs.size());
    Dataset data;
    data.inputs.resize(n, space.dim());
    for (Eigen::Index i = 0; i < n; ++i) data.inputs.row(i) = space.to_unit(xs[static_cast<std::size_t>(i)]).transpose();
    Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
    if (!y.allFinite()) throw std::invalid_argument("Dataset: non-finite target");
    data.raw_mean = y.mean();
    double sd = 0.0;
    if (n > 1) sd = std::sqrt((y.array() - data.raw_mean).square().sum() / static_cast<double>(n - 1));
    data.raw_std = sd > 0.0 ? sd : 1.0;
    data.targets = (y.array() - data.raw_mean) / data.raw_std;
    return data;
  }

  /// Copy with one extra (unit-cube input, standardized target) row.
  [[nodiscard]] Dataset with_row(const Eigen::VectorXd& u, double z) const {
    Dataset out = *this;
    out.inputs.conservativeResize(size() + 1, Eigen::NoChange);
    out.inputs.row(size()) = u.transpose();
    out.targets.conservativeResize(size() + 1);
    out.targets[size()] = z;
    return out;
  }

  /// FNV-1a over the raw bytes of inputs and targets.
  [[nodiscard]] std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const double* p, Eigen::Index count) {
      for (Eigen::Index i = 0; i < count; ++i) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, p + i, sizeof(double));
        for (unsigned char b : bytes) {
          h ^= b;
          h *= 1099511628211ULL;
        }
      }
    };
    mix(inputs.data(), inputs.size());
    mix(targets.data(), targets.size());
    return h;
  }
};

struct Prediction {
  double mean = 0.0;
  double sd = 0.0;
};

/// Posterior moments plus their gradients w.r.t. the unit-cube input.
struct PredictionGrad {
  double mean = 0.0;
  double sd = 0.0;
  Eigen::VectorXd dmean;
  Eigen::VectorXd dsd;
};

namespace gp_detail {

/// Factorization of K + (noise + jitter) I with escalating jitter.
struct Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

inline Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const KernelParams& p) {
  const Eigen::Index n = X.rows();
  const Eigen::MatrixXd Z = X.array().rowwise() / p.lengthscales.transpose().array();
  const Eigen::VectorXd sq = Z.rowwise().squaredNorm();
  Eigen::MatrixXd K = Z * Z.transpose();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r2 = std::max(0.0, sq[i] + sq[j] - 2.0 * K(i, j));
      K(i, j) = std::sqrt(r2);
    }
    K(j, j) = 0.0;
  }
  return K;  // holds distances; callers map them through the profile
}

inline std::optional<Factor> factorize(const Eigen::MatrixXd& K, double noise) {
  double jitter = 0.0;
  for (;;) {
    Factor f;
    Eigen::MatrixXd A = K;
    A.diagonal().array() += noise + jitter;
    f.llt.compute(A);
    if (f.llt.info() == Eigen::Success) {
      f.jitter = jitter;
      return f;
    }
    jitter = jitter == 0.0 ? kNoiseFloor : jitter * 10.0;
    if (jitter > kMaxJitter * (1.0 + 1e-12)) return std::nullopt;
  }
}

inline constexpr double kLog2Pi = 1.83787706640934548356065947281123;

}  // namespace gp_detail

/// Number of log-hyperparameters: d lengthscales, noise, signal variance, constant mean.
inline int theta_size(int dim) { return dim + 3; }

/// One GP with fixed hyperparameters, conditioned on a dataset.
class GPMember {
 public:
  GPMember(KernelParams params, NoiseModel noise, double mean_const, double tau,
           std::shared_ptr<const Dataset> data)
      : params_(std::move(params)), noise_(noise), mean_(mean_const), tau_(tau), data_(std::move(data)) {
    params_.validate();
    if (!data_) throw std::invalid_argument("GPMember: null dataset");
    if (data_->dim() != params_.dim())
      throw std::invalid_argument("GPMember: dataset dimension does not match lengthscales");
    if (!(noise_.noise_variance > 0.0)) throw std::invalid_argument("GPMember: noise must be positive");
    refactor();
  }

  /// theta = (log l_1..d, log noise, log s, mean).
  static GPMember from_theta(const Eigen::VectorXd& theta, KernelFamily family, double tau,
                             std::shared_ptr<const Dataset> data) {
    const int d = static_cast<int>(theta.size()) - 3;
    KernelParams p{theta.head(d).array().exp().matrix(), std::exp(theta[d + 1]), family};
    return GPMember(std::move(p), NoiseModel{std::exp(theta[d])}, theta[d + 2], tau, std::move(data));
  }

  [[nodiscard]] Eigen::VectorXd theta() const {
    const int d = params_.dim();
    Eigen::VectorXd t(d + 3);
    t.head(d) = params_.lengthscales.array().log().matrix();
    t[d] = std::log(noise_.noise_variance);
    t[d + 1] = std::log(params_.signal_variance);
    t[d + 2] = mean_;
    return t;
  }

  [[nodiscard]] const KernelParams& params() const { return params_; }
  [[nodiscard]] const NoiseModel& noise() const { return noise_; }
  [[nodiscard]] double mean_const() const { return mean_; }
  [[nodiscard]] double tau() const { return tau_; }
  [[nodiscard]] double jitter() const { return factor_.jitter; }
  [[nodiscard]] const Dataset& data() const { return *data_; }
  [[nodiscard]] const std::shared_ptr<const Dataset>& data_ptr() const { return data_; }
  [[nodiscard]] const Eigen::LLT<Eigen::MatrixXd>& llt() const { return factor_.llt; }
  [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }

  /// Set when MAP fitting failed on every restart and the prior-mode start was kept.
  [[nodiscard]] bool fallback() const { return fallback_; }
  void mark_fallback() { fallback_ = true; }

  /// Kernel vector between a unit-cube point and every training input.
  [[nodiscard]] Eigen::VectorXd cross_cov(const Eigen::VectorXd& u) const {
    const Eigen::MatrixXd& X = data_->inputs;
    Eigen::VectorXd k(X.rows());
    const Eigen::ArrayXd inv_l = params_.lengthscales.array().inverse();
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double r = ((X.row(i).transpose().array() - u.array()) * inv_l).matrix().norm();
      k[i] = params_.signal_variance * kernel_profile(params_.family, r);
    }
    return k;
  }

  /// Latent posterior at a unit-cube point, standardized units.
  [[nodiscard]] Prediction predict(const Eigen::VectorXd& u) const {
    if (u.size() != params_.dim()) throw std::invalid_argument("GPMember::predict: dimension mismatch");
    const Eigen::VectorXd k = cross_cov(u);
    Prediction out;
    out.mean = mean_ + k.dot(weights_);
    const Eigen::VectorXd v = factor_.llt.matrixL().solve(k);
    const double var = params_.signal_variance - v.squaredNorm();
    out.sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return out;
  }

  [[nodiscard]] PredictionGrad predict_with_grad(const Eigen::VectorXd& u) const {
    if (u.size() != params_.dim()) throw std::invalid_argument("GPMember::predict: dimension mismatch");
    const Eigen::MatrixXd& X = data_->inputs;
    const Eigen::Index n = X.rows();
    const Eigen::ArrayXd inv_l2 = params_.lengthscales.array().square().inverse();
    Eigen::VectorXd k(n);
    Eigen::MatrixXd dk(n, params_.dim());  // row i: dk_i/du
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::ArrayXd diff = u.array() - X.row(i).transpose().array();
      const double r = std::sqrt((diff.square() * inv_l2).sum());
      k[i] = params_.signal_variance * kernel_profile(params_.family, r);
      const double c = params_.signal_variance * kernel_profile_deriv_over_r(params_.family, r);
      dk.row(i) = (c * diff * inv_l2).matrix().transpose();
    }
    PredictionGrad out;
    out.mean = mean_ + k.dot(weights_);
    out.dmean = dk.transpose() * weights_;
    const Eigen::VectorXd v = factor_.llt.matrixL().solve(k);
    const double var = params_.signal_variance - v.squaredNorm();
    if (var > 0.0) {
      out.sd = std::sqrt(var);
      const Eigen::VectorXd a = factor_.llt.matrixU().solve(v);  // (K + noise I)^{-1} k
      out.dsd = -(dk.transpose() * a) / out.sd;
    } else {
      out.sd = 0.0;
      out.dsd = Eigen::VectorXd::Zero(params_.dim());
    }
    return out;
  }

  /// Same hyperparameters, one extra observation (standardized units).
  [[nodiscard]] GPMember condition_on(const Eigen::VectorXd& u, double z) const {
    auto data = std::make_shared<const Dataset>(data_->with_row(u, z));
    GPMember out(params_, noise_, mean_, tau_, std::move(data));
    out.fallback_ = fallback_;
    return out;
  }

 private:
  void refactor() {
    Eigen::MatrixXd K = gp_detail::gram(data_->inputs, params_);
    K = K.unaryExpr([this](double r) { return params_.signal_variance * kernel_profile(params_.family, r); });
    auto f = gp_detail::factorize(K, noise_.noise_variance);
    if (!f) throw NumericalError("GPMember: covariance not positive definite after jitter escalation");
    factor_ = std::move(*f);
    weights_ = factor_.llt.solve((data_->targets.array() - mean_).matrix());
  }

  KernelParams params_;
  NoiseModel noise_;
  double mean_ = 0.0;
  double tau_ = 0.1;
  std::shared_ptr<const Dataset> data_;
  gp_detail::Factor factor_;
  Eigen::VectorXd weights_;
  bool fallback_ = false;
};

struct LmlResult {
  double value = 0.0;
  Eigen::VectorXd grad;  // w.r.t. theta = (log l, log noise, log s, mean)
};

/// Gaussian log marginal likelihood of `data` under hyperparameters theta, with
/// its analytic gradient. Returns nullopt if the covariance cannot be factorized.
inline std::optional<LmlResult> log_marginal_likelihood(const Eigen::VectorXd& theta, KernelFamily family,
                                                        const Dataset& data, bool with_grad = true) {
  const int d = data.dim();
  if (theta.size() != theta_size(d)) throw std::invalid_argument("log_marginal_likelihood: bad theta size");
  const Eigen::Index n = data.size();
  KernelParams p{theta.head(d).array().exp().matrix(), std::exp(theta[d + 1]), family};
  const double noise = std::exp(theta[d]);
  const double mean = theta[d + 2];

  const Eigen::MatrixXd R = gp_detail::gram(data.inputs, p);
  const Eigen::MatrixXd K =
      R.unaryExpr([&](double r) { return p.signal_variance * kernel_profile(family, r); });
  auto f = gp_detail::factorize(K, noise);
  if (!f) return std::nullopt;

  const Eigen::VectorXd resid = (data.targets.array() - mean).matrix();
  const Eigen::VectorXd alpha = f->llt.solve(resid);
  const Eigen::MatrixXd L = f->llt.matrixL();
  LmlResult out;
  out.value = -0.5 * resid.dot(alpha) - L.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * gp_detail::kLog2Pi;
  if (!with_grad) return out;

  // dLML/dtheta_k = 0.5 * tr((alpha alpha^T - Kinv) dK/dtheta_k)
  Eigen::MatrixXd W = f->llt.solve(Eigen::MatrixXd::Identity(n, n));
  W = alpha * alpha.transpose() - W;

  out.grad = Eigen::VectorXd::Zero(d + 3);
  // dK_ab/dlog l_j = -s phi'(r)/r * (x_aj - x_bj)^2 / l_j^2
  const Eigen::MatrixXd M =
      W.cwiseProduct(R.unaryExpr([&](double r) { return -p.signal_variance * kernel_profile_deriv_over_r(family, r); }));
  const Eigen::VectorXd m_row = M.rowwise().sum();
  const Eigen::MatrixXd& X = data.inputs;
  for (int j = 0; j < d; ++j) {
    const Eigen::VectorXd xj = X.col(j);
    const double quad = xj.dot(M * xj);
    const double lin = m_row.dot(xj.cwiseAbs2());
    // sum_ab M_ab (x_a - x_b)^2 = 2 sum_a m_a x_a^2 - 2 x^T M x
    out.grad[j] = 0.5 * (2.0 * lin - 2.0 * quad) / (p.lengthscales[j] * p.lengthscales[j]);
  }
  out.grad[d] = 0.5 * noise * W.trace();
  out.grad[d + 1] = 0.5 * W.cwiseProduct(K).sum();
  out.grad[d + 2] = alpha.sum();
  return out;
}

/// LML of a member against its own dataset.
inline std::optional<LmlResult> log_marginal_likelihood(const GPMember& member, bool with_grad = true) {
  return log_marginal_likelihood(member.theta(), member.params().family, member.data(), with_grad);
}

struct FitOptions {
  int restarts = 2;
  int max_iters = 200;
  double grad_tol = 1e-5;
  double init_perturbation = 0.5;
  KernelFamily family = KernelFamily::Matern52;
  bool prior_jacobian = false;
  double min_lengthscale = 1e-2;
  double max_lengthscale = 1e3;
  double max_noise = 10.0;
  double mean_bound = 10.0;
};

/// Box bounds for theta used during MAP fitting.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> theta_bounds(int d, const FitOptions& opt) {
  Eigen::VectorXd lo(d + 3), hi(d + 3);
  lo.head(d).setConstant(std::log(opt.min_lengthscale));
  hi.head(d).setConstant(std::log(opt.max_lengthscale));
  lo[d] = std::log(kNoiseFloor);
  hi[d] = std::log(opt.max_noise);
  // strictly inside the tophat support
  lo[d + 1] = std::log(SaasPriors::kSignalLower) + 1e-9;
  hi[d + 1] = std::log(SaasPriors::kSignalUpper) - 1e-9;
  lo[d + 2] = -opt.mean_bound;
  hi[d + 2] = opt.mean_bound;
  return {lo, hi};
}

/// Prior-mode start: tau / l^2 = 0.1, s = 1, noise = 1e-2, mean = 0.
inline Eigen::VectorXd initial_theta(int d, double tau) {
  Eigen::VectorXd t(d + 3);
  t.head(d).setConstant(0.5 * std::log(tau / 0.1));
  t[d] = std::log(1e-2);
  t[d + 1] = 0.0;
  t[d + 2] = 0.0;
  return t;
}

/// Log posterior (up to a constant) and gradient in theta space.
inline std::optional<LmlResult> map_objective(const Eigen::VectorXd& theta, const Dataset& data, double tau,
                                              const FitOptions& opt) {
  auto lml = log_marginal_likelihood(theta, opt.family, data, true);
  if (!lml) return std::nullopt;
  const int d = data.dim();
  KernelParams p{theta.head(d).array().exp().matrix(), std::exp(theta[d + 1]), opt.family};
  const LogPrior prior = log_prior(p, NoiseModel{std::exp(theta[d])}, SaasPriors{tau, opt.prior_jacobian});
  lml->value += prior.value;
  lml->grad.head(d + 2) += prior.grad;
  return lml;
}

struct FitDiagnostics {
  std::vector<double> start_objectives;
  std::vector<double> final_objectives;
  double best_objective = -std::numeric_limits<double>::infinity();
  bool fallback = false;
};

/// MAP fit of one member with fixed global shrinkage tau. Restart 0 starts at the
/// prior mode; later restarts add N(0, 0.5^2) noise to every theta entry.
inline GPMember fit_map(std::shared_ptr<const Dataset> data, double tau, std::uint64_t seed,
                        const FitOptions& opt = {}, FitDiagnostics* diag = nullptr) {
  if (!data || data->size() < 1) throw std::invalid_argument("fit_map: empty dataset");
  if (opt.restarts < 1) throw std::invalid_argument("fit_map: restarts must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("fit_map: tau must be positive");
  const int d = data->dim();
  auto [lo, hi] = theta_bounds(d, opt);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, opt.init_perturbation);

  detail::BoxQnOptions qn;
  qn.max_iters = opt.max_iters;
  qn.grad_tol = opt.grad_tol;
  qn.max_step = 1.0;

  FitDiagnostics local;
  FitDiagnostics& dg = diag ? *diag : local;
  const Eigen::VectorXd base = initial_theta(d, tau).cwiseMax(lo).cwiseMin(hi);
  std::optional<Eigen::VectorXd> best;
  double best_val = -std::numeric_limits<double>::infinity();

  for (int r = 0; r < opt.restarts; ++r) {
    Eigen::VectorXd start = base;
    if (r > 0)
      for (Eigen::Index i = 0; i < start.size(); ++i) start[i] += normal(gen);
    start = start.cwiseMax(lo).cwiseMin(hi);
    auto fg = [&](const Eigen::VectorXd& th, Eigen::VectorXd& g) {
      auto obj = map_objective(th, *data, tau, opt);
      if (!obj) {
        g.setZero();
        return -std::numeric_limits<double>::infinity();
      }
      g = obj->grad;
      return obj->value;
    };
    Eigen::VectorXd g0(start.size());
    dg.start_objectives.push_back(fg(start, g0));
    auto res = detail::maximize_box(fg, start, lo, hi, qn);
    dg.final_objectives.push_back(res.value);
    if (std::isfinite(res.value) && res.value > best_val) {
      best_val = res.value;
      best = res.x;
    }
  }
  dg.best_objective = best_val;
  if (!best) {
    dg.fallback = true;
    GPMember m = GPMember::from_theta(base, opt.family, tau, std::move(data));
    m.mark_fallback();
    return m;
  }
  return GPMember::from_theta(*best, opt.family, tau, std::move(data));
}

struct MixturePrediction {
  double mean = 0.0;
  double sd = 0.0;
  std::vector<Prediction> members;
};

/// Uniform Gaussian mixture over independently fitted members.
class EnsembleGP {
 public:
  EnsembleGP(SearchSpace space, std::shared_ptr<const Dataset> data, std::vector<GPMember> members)
      : space_(std::move(space)), data_(std::move(data)), members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("EnsembleGP: need at least one member");
    if (!data_ || data_->dim() != space_.dim())
      throw std::invalid_argument("EnsembleGP: dataset does not match search space");
  }

  [[nodiscard]] const SearchSpace& space() const { return space_; }
  [[nodiscard]] const Dataset& data() const { return *data_; }
  [[nodiscard]] const std::vector<GPMember>& members() const { return members_; }
  [[nodiscard]] int size() const { return static_cast<int>(members_.size()); }
  [[nodiscard]] bool any_fallback() const {
    for (const auto& m : members_)
      if (m.fallback()) return true;
    return false;
  }

  [[nodiscard]] MixturePrediction predict_unit(const Eigen::VectorXd& u) const {
    MixturePrediction out;
    out.members.reserve(members_.size());
    double m1 = 0.0, m2 = 0.0;
    for (const auto& m : members_) {
      Prediction p = m.predict(u);
      m1 += p.mean;
      m2 += p.sd * p.sd + p.mean * p.mean;
      out.members.push_back(p);
    }
    const double M = static_cast<double>(members_.size());
    out.mean = m1 / M;
    const double var = m2 / M - out.mean * out.mean;
    out.sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return out;
  }

  [[nodiscard]] MixturePrediction predict(const Configuration& x) const {
    return predict_unit(space_.to_unit(x));
  }

  /// Kriging-believer style update: every member conditions on (x, z), z standardized.
  [[nodiscard]] EnsembleGP condition_on(const Configuration& x, double z) const {
    const Eigen::VectorXd u = space_.to_unit(x);
    auto data = std::make_shared<const Dataset>(data_->with_row(u, z));
    std::vector<GPMember> ms;
    ms.reserve(members_.size());
    for (const auto& m : members_) {
      GPMember c(m.params(), m.noise(), m.mean_const(), m.tau(), data);
      if (m.fallback()) c.mark_fallback();
      ms.push_back(std::move(c));
    }
    return EnsembleGP(space_, std::move(data), std::move(ms));
  }

 private:
  SearchSpace space_;
  std::shared_ptr<const Dataset> data_;
  std::vector<GPMember> members_;
};

/// tau = 0.1 * tan(pi u / 2), the HalfCauchy(0.1) quantile transform.
inline double half_cauchy_quantile(double u, double scale) {
  return scale * std::tan(0.5 * std::numbers::pi * u);
}

/// Samples M global shrinkage scales from HalfCauchy(0.1) and MAP-fits one member per scale.
inline EnsembleGP fit_ensemble(const SearchSpace& space, std::shared_ptr<const Dataset> data, int ensemble_size,
                               std::uint64_t seed, const FitOptions& opt = {},
                               std::vector<FitDiagnostics>* diags = nullptr) {
  if (ensemble_size < 1) throw std::invalid_argument("fit_ensemble: ensemble size must be >= 1");
  std::mt19937_64 gen(detail::derive_seed(seed, 0));
  std::vector<double> taus;
  for (int m = 0; m < ensemble_size; ++m) {
    double u = detail::uniform01(gen);
    double tau = half_cauchy_quantile(u, 0.1);
    if (!(tau > 0.0)) tau = std::numeric_limits<double>::min();
    taus.push_back(tau);
  }
  std::vector<GPMember> members;
  members.reserve(static_cast<std::size_t>(ensemble_size));
  if (diags) diags->assign(static_cast<std::size_t>(ensemble_size), {});
  for (int m = 0; m < ensemble_size; ++m) {
    members.push_back(fit_map(data, taus[static_cast<std::size_t>(m)],
                              detail::derive_seed(seed, static_cast<std::uint64_t>(m) + 1), opt,
                              diags ? &(*diags)[static_cast<std::size_t>(m)] : nullptr));
  }
  return EnsembleGP(space, std::move(data), std::move(members));
}

}  // namespace bonsai

#endif  // BONSAI_GP_HPP
