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

#ifndef BONSAI_SPACE_HPP
#define BONSAI_SPACE_HPP

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bonsai {

/// A point in the search space, stored in natural (unnormalized) units.
using Configuration = Eigen::VectorXd;

/// Axis-aligned box [lower, upper] in R^d.
class SearchSpace {
 public:
  SearchSpace(Eigen::VectorXd lower, Eigen::VectorXd upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() < 1) throw std::invalid_argument("SearchSpace: dimension must be >= 1");
    if (lower_.size() != upper_.size())
      throw std::invalid_argument("SearchSpace: lower/upper dimension mismatch");
    for (Eigen::Index j = 0; j < lower_.size(); ++j) {
      if (!(lower_[j] < upper_[j]))
        throw std::invalid_argument("SearchSpace: lower[" + std::to_string(j) +
                                    "] must be < upper[" + std::to_string(j) + "]");
    }
  }

  /// Unit hypercube [0,1]^d.
  static SearchSpace unit(int dim) {
    if (dim < 1) throw std::invalid_argument("SearchSpace: dimension must be >= 1");
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
  }

  [[nodiscard]] int dim() const { return static_cast<int>(lower_.size()); }
  [[nodiscard]] const Eigen::VectorXd& lower() const { return lower_; }
  [[nodiscard]] const Eigen::VectorXd& upper() const { return upper_; }
  [[nodiscard]] Configuration center() const { return 0.5 * (lower_ + upper_); }

  [[nodiscard]] bool contains(const Configuration& x) const {
    if (x.size() != lower_.size()) return false;
    return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
  }

  [[nodiscard]] Configuration clip(const Configuration& x) const {
    check_dim(x);
    return x.cwiseMax(lower_).cwiseMin(upper_);
  }

  /// Map into [0,1]^d.
  [[nodiscard]] Eigen::VectorXd to_unit(const Configuration& x) const {
    check_dim(x);
    return ((x - lower_).array() / (upper_ - lower_).array()).matrix();
  }

  [[nodiscard]] Configuration from_unit(const Eigen::VectorXd& u) const {
    check_dim(u);
    return (lower_.array() + u.array() * (upper_ - lower_).array()).matrix();
  }

  void check_dim(const Eigen::VectorXd& x) const {
    if (x.size() != lower_.size())
      throw std::invalid_argument("configuration has dimension " + std::to_string(x.size()) +
                                  ", space has " + std::to_string(lower_.size()));
  }

  friend bool operator==(const SearchSpace& a, const SearchSpace& b) {
    return a.lower_ == b.lower_ && a.upper_ == b.upper_;
  }

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Sorted, duplicate-free set of coordinate indices.
class ActiveSet {
 public:
  ActiveSet() = default;
  ActiveSet(std::initializer_list<int> idx) : ActiveSet(std::vector<int>(idx)) {}
  explicit ActiveSet(std::vector<int> idx) : indices_(std::move(idx)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (!indices_.empty() && indices_.front() < 0)
      throw std::out_of_range("ActiveSet: negative index");
  }

  /// All indices 0..d-1.
  static ActiveSet full(int dim) {
    std::vector<int> idx(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) idx[static_cast<std::size_t>(j)] = j;
    return ActiveSet(std::move(idx));
  }

  [[nodiscard]] const std::vector<int>& indices() const { return indices_; }
  [[nodiscard]] std::size_t size() const { return indices_.size(); }
  [[nodiscard]] bool empty() const { return indices_.empty(); }
  [[nodiscard]] bool contains(int j) const {
    return std::binary_search(indices_.begin(), indices_.end(), j);
  }
  [[nodiscard]] bool is_subset_of(const ActiveSet& other) const {
    return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                         indices_.end());
  }
  [[nodiscard]] ActiveSet without(int j) const {
    ActiveSet out = *this;
    out.indices_.erase(std::remove(out.indices_.begin(), out.indices_.end(), j),
                       out.indices_.end());
    return out;
  }

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

 private:
  std::vector<int> indices_;
};

namespace detail {
inline void require_same_dim(const Configuration& a, const Configuration& b, const char* what) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                ")");
}
}  // namespace detail

/// Components in which x differs from the default. Exact stored-value comparison.
inline ActiveSet active_set(const Configuration& x, const Configuration& x_def) {
  detail::require_same_dim(x, x_def, "active_set");
  std::vector<int> idx;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x[j] != x_def[j]) idx.push_back(static_cast<int>(j));
  return ActiveSet(std::move(idx));
}

/// Keep components in `keep` from x, copy the default everywhere else.
inline Configuration project(const Configuration& x, const ActiveSet& keep,
                             const Configuration& x_def) {
  detail::require_same_dim(x, x_def, "project");
  if (!keep.empty() && keep.indices().back() >= x.size())
    throw std::out_of_range("project: index " + std::to_string(keep.indices().back()) +
                            " out of range for dimension " + std::to_string(x.size()));
  Configuration out = x_def;
  for (int j : keep) out[j] = x[j];
  return out;
}

inline int l0_distance(const Configuration& x, const Configuration& x_def) {
  return static_cast<int>(active_set(x, x_def).size());
}

}  // namespace bonsai

#endif  // BONSAI_SPACE_HPP
