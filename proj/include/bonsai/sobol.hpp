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

#ifndef BONSAI_SOBOL_HPP
#define BONSAI_SOBOL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bonsai/detail/rng.hpp"
#include "bonsai/detail/sobol_directions.hpp"
#include "bonsai/space.hpp"

namespace bonsai {

/// Gray-code Sobol generator in [0,1)^d with 32-bit resolution.
///
/// The all-zeros point at index 0 is skipped, so the first point emitted is
/// (0.5, ..., 0.5). With a seed, every coordinate is XOR-ed with a per-dimension
/// random shift and then moved to the centre of its 2^-32 cell, which keeps
/// each (t,m,s)-net property intact and every point strictly inside (0,1).
class SobolSequence {
 public:
  static constexpr int kMaxDim = detail::kSobolMaxDim;
  static constexpr int kBits = 32;

  explicit SobolSequence(int dim, std::optional<std::uint64_t> shift_seed = std::nullopt)
      : dim_(dim), state_(static_cast<std::size_t>(dim), 0u), shift_(static_cast<std::size_t>(dim), 0u) {
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("Sobol: dimension " + std::to_string(dim) +
                                  " outside supported range [1, " + std::to_string(kMaxDim) + "]");
    directions_.resize(static_cast<std::size_t>(dim));
    for (int k = 0; k < kBits; ++k) directions_[0][static_cast<std::size_t>(k)] = 1u << (kBits - 1 - k);
    for (int j = 1; j < dim; ++j) init_dimension(j);
    if (shift_seed) {
      std::uint64_t s = *shift_seed;
      for (auto& v : shift_) {
        s = detail::splitmix64(s);
        v = static_cast<std::uint32_t>(s >> 32);
      }
      shifted_ = true;
    }
  }

  [[nodiscard]] int dim() const { return dim_; }

  Eigen::VectorXd next() {
    // Gray code: flip the direction number at the lowest zero bit of the index.
    std::uint64_t i = index_ - 1;
    ++index_;
    int c = 0;
    while (i & 1u) {
      i >>= 1;
      ++c;
    }
    if (c >= kBits) throw std::overflow_error("Sobol: sequence exhausted");
    Eigen::VectorXd out(dim_);
    for (int j = 0; j < dim_; ++j) {
      auto ju = static_cast<std::size_t>(j);
      state_[ju] ^= directions_[ju][static_cast<std::size_t>(c)];
      std::uint32_t v = state_[ju] ^ shift_[ju];
      out[j] = static_cast<double>(v) * 0x1.0p-32;
      if (shifted_) out[j] += 0x1.0p-33;
    }
    return out;
  }

 private:
  void init_dimension(int j) {
    const auto& row = detail::kSobolTable[static_cast<std::size_t>(j - 1)];
    const int s = row.degree;
    std::array<std::uint32_t, kBits> m{};
    for (int k = 0; k < s; ++k) m[static_cast<std::size_t>(k)] = row.m[static_cast<std::size_t>(k)];
    for (int k = s; k < kBits; ++k) {
      std::uint32_t v = m[static_cast<std::size_t>(k - s)] ^ (m[static_cast<std::size_t>(k - s)] << s);
      for (int i = 1; i < s; ++i) {
        if ((row.poly >> (s - i)) & 1u) v ^= m[static_cast<std::size_t>(k - i)] << i;
      }
      m[static_cast<std::size_t>(k)] = v;
    }
    auto& dir = directions_[static_cast<std::size_t>(j)];
    for (int k = 0; k < kBits; ++k)
      dir[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(k)] << (kBits - 1 - k);
  }

  int dim_;
  std::uint64_t index_ = 1;
  bool shifted_ = false;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shift_;
};

/// n seeded Sobol points scaled into the box. Prefix-stable in n.
inline std::vector<Configuration> sobol_sample(const SearchSpace& space, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sobol_sample: n must be >= 0");
  std::vector<Configuration> out;
  if (n == 0) return out;
  SobolSequence seq(space.dim(), seed);
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(space.from_unit(seq.next()));
  return out;
}

}  // namespace bonsai

#endif  // BONSAI_SOBOL_HPP
