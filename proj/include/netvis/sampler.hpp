#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "netvis/error.hpp"
#include "netvis/graph.hpp"
#include "netvis/kernels.hpp"

namespace netvis {

/// Dynamic weighted sampler over a growing list of positive weights.
///
/// Implicit Fenwick (binary indexed) prefix-sum tree: update, append and
/// sample are O(log n). Raw weights are kept alongside the tree so it can be
/// rebuilt exactly; after every kRebuildPeriod mutations the tree is rebuilt
/// to bound floating-point drift of the partial sums.
///
/// sample(u) returns i iff u * total() lies in [prefix(i), prefix(i+1)).
class WeightIndex {
 public:
  static constexpr std::size_t kRebuildPeriod = std::size_t{1} << 16;

  WeightIndex() : tree_(1, 0.0) {}

  static WeightIndex build(std::span<const double> weights) {
    WeightIndex idx;
    idx.raw_.reserve(weights.size());
    for (double w : weights) {
      check_weight(w);
      idx.raw_.push_back(w);
    }
    idx.rebuild_tree();
    return idx;
  }

  void reserve(std::size_t n) {
    raw_.reserve(n);
    tree_.reserve(n + 1);
  }

  std::size_t size() const { return raw_.size(); }
  std::size_t capacity() const { return raw_.capacity(); }
  bool empty() const { return raw_.empty(); }
  std::size_t rebuild_count() const { return rebuilds_; }

  double weight(std::size_t i) const {
    if (i >= raw_.size()) throw UsageError("WeightIndex: index out of range");
    return raw_[i];
  }

  double total() const { return prefix(raw_.size()); }

  void update(std::size_t i, double w) {
    if (i >= raw_.size()) throw UsageError("WeightIndex::update: index out of range");
    check_weight(w);
    const double delta = w - raw_[i];
    raw_[i] = w;
    for (std::size_t k = i + 1; k < tree_.size(); k += lowbit(k)) tree_[k] += delta;
    note_mutation();
  }

  void append(double w) {
    check_weight(w);
    raw_.push_back(w);
    const std::size_t k = raw_.size();
    // Node k covers (k - lowbit(k), k]; everything but the new leaf is already summed.
    tree_.push_back(w + prefix(k - 1) - prefix(k - lowbit(k)));
    note_mutation();
  }

  std::size_t sample(double u) const {
    if (raw_.empty()) throw UsageError("WeightIndex::sample: empty index");
    if (!(u >= 0.0 && u < 1.0)) throw UsageError("WeightIndex::sample: u must lie in [0,1)");
    const std::size_t n = raw_.size();
    double rem = u * total();
    std::size_t pos = 0;
    for (std::size_t mask = std::bit_floor(n); mask > 0; mask >>= 1) {
      const std::size_t next = pos + mask;
      if (next <= n && tree_[next] <= rem) {
        pos = next;
        rem -= tree_[next];
      }
    }
    // Rounding can walk past the last leaf when u*total sits at the very top.
    return std::min(pos, n - 1);
  }

  // Sum of the first n weights (1-based tree prefix).
  double prefix(std::size_t n) const {
    double s = 0.0;
    for (std::size_t k = n; k > 0; k -= lowbit(k)) s += tree_[k];
    return s;
  }

 private:
  static std::size_t lowbit(std::size_t k) { return k & (~k + 1); }

  static void check_weight(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) throw UsageError("WeightIndex: weights must be finite and > 0");
  }

  void note_mutation() {
    if (++mutations_ >= kRebuildPeriod) {
      rebuild_tree();
      ++rebuilds_;
    }
  }

  void rebuild_tree() {
    tree_.assign(raw_.size() + 1, 0.0);
    for (std::size_t k = 1; k < tree_.size(); ++k) {
      tree_[k] += raw_[k - 1];
      const std::size_t parent = k + lowbit(k);
      if (parent < tree_.size()) tree_[parent] += tree_[k];
    }
    mutations_ = 0;
  }

  std::vector<double> raw_;
  std::vector<double> tree_;
  std::size_t mutations_ = 0;
  std::size_t rebuilds_ = 0;
};

/// Spatial attachment weights for an arrival at `new_location`, scaled by the
/// common factor e^{gamma * d_min} so the nearest node's decay is 1. The
/// normalized law is unchanged and large gamma cannot underflow every weight.
inline void spatial_weights(const GraphState& g, const KernelSpec& k, Point new_location,
                            std::vector<double>& out) {
  if (!k.is_spatial()) throw UsageError("spatial_weights: kernel is not spatial");
  const std::size_t n = g.size();
  out.resize(n);
  double d_min = INFINITY;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = distance(g.nodes[j].location, new_location);
    d_min = std::min(d_min, out[j]);
  }
  const bool default_beta = !k.beta;
  for (std::size_t j = 0; j < n; ++j) {
    const NodeRecord& r = g.nodes[j];
    const double b = default_beta ? r.fitness * r.degree : k.beta(r.fitness, r.degree);
    out[j] = std::exp(-k.gamma * (out[j] - d_min)) * b;
  }
}

// Inverse-CDF selection over an explicit weight vector: first j with
// cumulative weight > u * total.
inline NodeId sample_linear(std::span<const double> weights, double u) {
  if (weights.empty()) throw UsageError("sample_linear: no candidates");
  if (!(u >= 0.0 && u < 1.0)) throw UsageError("sample_linear: u must lie in [0,1)");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw InternalError("total attachment weight is zero");
  const double target = u * total;
  double cum = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    cum += weights[j];
    if (cum > target) return static_cast<NodeId>(j);
  }
  return static_cast<NodeId>(weights.size() - 1);
}

/// One O(n) pass over the spatial weights, then inverse-CDF selection with u.
inline NodeId sample_spatial(const GraphState& g, const KernelSpec& k, Point new_location, double u,
                             std::vector<double>& scratch) {
  spatial_weights(g, k, new_location, scratch);
  return sample_linear(scratch, u);
}

inline NodeId sample_spatial(const GraphState& g, const KernelSpec& k, Point new_location, double u) {
  std::vector<double> scratch;
  return sample_spatial(g, k, new_location, u, scratch);
}

}  // namespace netvis
