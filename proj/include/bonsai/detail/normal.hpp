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

#ifndef BONSAI_DETAIL_NORMAL_HPP
#define BONSAI_DETAIL_NORMAL_HPP

#include <cmath>
#include <numbers>

namespace bonsai::detail {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kHalfLog2Pi = 0.918938533204672741780329736405617639;

inline double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// h(z) = phi(z) + z Phi(z), the standardized expected improvement.
//
// Below z = -3 the difference cancels badly, so with w = -z we use
//   h = phi(w) * c / (w + c),  c = 1 / (w + 2/(w + 3/(w + ...)))
// which is the Laplace continued fraction for the Mills ratio rearranged so
// that no subtraction happens.
inline constexpr double kEiTailStart = -3.0;

inline double mills_tail_fraction(double w) {
  double t = w;
  for (int k = 120; k >= 2; --k) t = w + k / t;
  return 1.0 / t;
}

struct EiTerms {
  double log_h;  // log h(z)
  double ratio;  // Phi(z) / h(z) = d log h / dz
};

inline EiTerms ei_terms(double z) {
  if (z >= kEiTailStart) {
    const double cdf = normal_cdf(z);
    const double h = normal_pdf(z) + z * cdf;
    return {std::log(h), cdf / h};
  }
  const double w = -z;
  const double c = mills_tail_fraction(w);
  return {-0.5 * w * w - kHalfLog2Pi + std::log(c) - std::log(w + c), 1.0 / c};
}

inline double log_h(double z) { return ei_terms(z).log_h; }

inline double h(double z) {
  if (z >= kEiTailStart) return normal_pdf(z) + z * normal_cdf(z);
  return std::exp(log_h(z));
}

}  // namespace bonsai::detail

#endif  // BONSAI_DETAIL_NORMAL_HPP
