#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "paro/errors.hpp"

namespace paro {

inline constexpr double kDefaultRelGap = 0.05;

// Partition of N ascending values into q contiguous clusters of sizes d_i.
class ClusterLayout {
 public:
  explicit ClusterLayout(std::vector<int> multiplicities)
      : d_(std::move(multiplicities)) {
    if (d_.empty()) throw Empty("ClusterLayout: no clusters");
    offsets_.resize(d_.size() + 1, 0);
    for (size_t i = 0; i < d_.size(); ++i) {
      if (d_[i] < 1) throw BadInput("ClusterLayout: multiplicities must be >= 1");
      offsets_[i + 1] = offsets_[i] + d_[i];
    }
  }

  int q() const { return static_cast<int>(d_.size()); }
  const std::vector<int>& d() const { return d_; }
  int total() const { return offsets_.back(); }
  int offset(int i) const { return offsets_[static_cast<size_t>(i)]; }

  int flat(int i, int j) const {
    if (i < 0 || i >= q() || j < 0 || j >= d_[static_cast<size_t>(i)])
      throw BadInput("ClusterLayout: pair index out of range");
    return offsets_[static_cast<size_t>(i)] + j;
  }

  std::pair<int, int> pair(int k) const {
    if (k < 0 || k >= total()) throw BadInput("ClusterLayout: flat index out of range");
    int i = 0;
    while (offsets_[static_cast<size_t>(i + 1)] <= k) ++i;
    return {i, k - offsets_[static_cast<size_t>(i)]};
  }

 private:
  std::vector<int> d_;
  std::vector<int> offsets_;
};

// Split between consecutive values whenever the jump exceeds
// rel_gap * max(1, |right value|).
inline ClusterLayout cluster_by_gap(const std::vector<double>& values, double rel_gap) {
  if (values.empty()) throw Empty("cluster_by_gap: no values");
  if (!(rel_gap > 0.0)) throw BadInput("cluster_by_gap: rel_gap must be positive");
  if (!std::is_sorted(values.begin(), values.end()))
    throw BadInput("cluster_by_gap: values must be ascending");
  std::vector<int> d;
  int run = 1;
  for (size_t k = 1; k < values.size(); ++k) {
    if (values[k] - values[k - 1] > rel_gap * std::max(1.0, std::abs(values[k]))) {
      d.push_back(run);
      run = 1;
    } else {
      ++run;
    }
  }
  d.push_back(run);
  return ClusterLayout(std::move(d));
}

// The arithmetic-mean combinator; always inside the cluster's value range.
inline double convex_shift(const std::vector<double>& cluster_values) {
  if (cluster_values.empty()) throw Empty("convex_shift: no values");
  const double sum = std::accumulate(cluster_values.begin(), cluster_values.end(), 0.0);
  const double mean = sum / static_cast<double>(cluster_values.size());
  const auto [lo, hi] = std::minmax_element(cluster_values.begin(), cluster_values.end());
  return std::clamp(mean, *lo, *hi);
}

enum class ShiftCombinator { mean };

struct ShiftState {
  std::vector<double> shifts;
  ShiftCombinator combinator = ShiftCombinator::mean;
};

}  // namespace paro
