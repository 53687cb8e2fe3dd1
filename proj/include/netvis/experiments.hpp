#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

#include "netvis/error.hpp"
#include "netvis/growth.hpp"
#include "netvis/kernels.hpp"
#include "netvis/numeric.hpp"
#include "netvis/parallel.hpp"
#include "netvis/rng.hpp"
#include "netvis/visibility.hpp"

namespace netvis {

enum class Protocol { TopK, Inject, SpatialTopK };

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::TopK: return "topk";
    case Protocol::Inject: return "inject";
    case Protocol::SpatialTopK: return "spatial-topk";
  }
  return "?";
}

inline std::vector<std::size_t> top50_ranks() {
  std::vector<std::size_t> r(50);
  std::iota(r.begin(), r.end(), std::size_t{1});
  return r;
}

inline std::vector<std::size_t> spatial_ranks() { return {1, 5, 10, 30, 50, 100, 200}; }

struct Scale {
  std::uint64_t T0;
  std::uint64_t T;
  std::size_t replicas;
};

inline constexpr Scale kPaperScale{10000, 100000, 50};
inline constexpr Scale kCiScale{1000, 10000, 10};

struct ExperimentSpec {
  Protocol protocol = Protocol::TopK;
  KernelSpec kernel = KernelSpec::ba();
  double alpha_p = 2.0;
  std::uint64_t T0 = kCiScale.T0;
  std::uint64_t T = kCiScale.T;
  std::size_t replicas = kCiScale.replicas;
  std::vector<std::size_t> ranks = top50_ranks();
  std::uint64_t record_every = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: default_threads()

  FitnessDistribution fitness() const { return FitnessDistribution::pareto(alpha_p); }

  void apply(Scale s) {
    T0 = s.T0;
    T = s.T;
    replicas = s.replicas;
  }

  void validate() const {
    kernel.validate();
    fitness().validate();
    if (T0 < 2) throw ConfigError("T0 must be >= 2");
    if (T < T0) throw ConfigError("T must be >= T0");
    if (replicas < 1) throw ConfigError("R must be >= 1");
    if (record_every < 1) throw ConfigError("record_every must be >= 1");
    for (std::size_t k : ranks) {
      if (k < 1) throw ConfigError("ranks must be positive");
      if (k > T0 + 1) throw ConfigError("rank " + std::to_string(k) + " exceeds the node count at T0");
    }
    const bool spatial = kernel.is_spatial();
    switch (protocol) {
      case Protocol::TopK:
        if (spatial) throw ConfigError("topk protocol takes a location-free model (ba, af, mf, gf)");
        break;
      case Protocol::Inject:
        if (kernel.kind == KernelKind::BA) throw ConfigError("inject protocol needs a fitness model (af, mf, gf), not ba");
        if (spatial) throw ConfigError("inject protocol takes af, mf or gf");
        break;
      case Protocol::SpatialTopK:
        if (!spatial) throw ConfigError("spatial-topk protocol needs the spatial model");
        break;
    }
  }
};

/// Replica-averaged visibility of the nodes ranked k at T0.
struct TrackedSeries {
  std::vector<std::uint64_t> times;
  std::vector<std::size_t> ranks;
  std::vector<std::vector<double>> mean;    // [rank][time]
  std::vector<std::vector<double>> stddev;  // [rank][time], sample std across replicas
  std::size_t replicas = 0;
  std::vector<std::vector<NodeId>> rank_nodes;  // [replica][rank]
  std::vector<std::vector<std::vector<double>>> per_replica;  // [replica][rank][time]
};

struct InjectedNodeSeries {
  std::vector<std::uint64_t> times;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::size_t replicas = 0;
  NodeId node = 0;
  std::vector<double> injected_fitness;            // [replica]
  std::vector<std::vector<double>> per_replica;    // [replica][time]
  std::vector<double> final_max_other;             // [replica] max visibility of any other node at T
};

namespace detail {

inline std::vector<std::uint64_t> time_grid(std::uint64_t first, std::uint64_t T0, std::uint64_t T,
                                            std::uint64_t every) {
  std::vector<std::uint64_t> grid{first};
  for (std::uint64_t t = T0 + every; t <= T; t += every) {
    if (t > grid.back()) grid.push_back(t);
  }
  if (grid.back() != T) grid.push_back(T);
  return grid;
}

struct MeanStd {
  double mean;
  double std;
};

// Reduction in replica order, so the float summation order is fixed.
inline MeanStd reduce(const std::vector<double>& xs) {
  CompensatedSum<double> s;
  for (double x : xs) s.add(x);
  const double n = static_cast<double>(xs.size());
  const double m = s.value() / n;
  if (xs.size() < 2) return {m, 0.0};
  CompensatedSum<double> ss;
  for (double x : xs) ss.add((x - m) * (x - m));
  return {m, std::sqrt(ss.value() / (n - 1.0))};
}

inline GrowthProcess grow_base(const ExperimentSpec& spec) {
  Rng rng(base_stream(spec.seed));
  GraphState seed = new_seed_graph(spec.kernel, spec.fitness(), rng);
  GrowthProcess proc(std::move(seed), spec.kernel, spec.fitness(), rng);
  proc.grow_to(spec.T0);
  return proc;
}

// Node ids ordered by decreasing value; ties go to the smaller id.
inline std::vector<NodeId> rank_order(const std::vector<double>& values) {
  std::vector<NodeId> order(values.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return values[a] > values[b]; });
  return order;
}

inline TrackedSeries track_ranks(const ExperimentSpec& spec) {
  spec.validate();
  const GrowthProcess base = grow_base(spec);
  const auto vis = snapshot_visibility(base.state(), spec.kernel);
  const auto order = rank_order(vis.values);
  std::vector<NodeId> tracked;
  for (std::size_t k : spec.ranks) tracked.push_back(order[k - 1]);

  TrackedSeries out;
  out.times = time_grid(spec.T0, spec.T0, spec.T, spec.record_every);
  out.ranks = spec.ranks;
  out.replicas = spec.replicas;

  const unsigned threads = spec.threads ? spec.threads : default_threads();
  out.per_replica = parallel_map(spec.replicas, threads, [&](std::size_t r) {
    GrowthProcess proc(base.state(), spec.kernel, spec.fitness(), Rng(replica_stream(spec.seed, r)));
    std::vector<std::vector<double>> values(tracked.size(), std::vector<double>(out.times.size()));
    for (std::size_t ti = 0; ti < out.times.size(); ++ti) {
      proc.grow_to(out.times[ti]);
      for (std::size_t k = 0; k < tracked.size(); ++k) values[k][ti] = proc.tracked_visibility(tracked[k]);
    }
    return values;
  });
  out.rank_nodes.assign(spec.replicas, tracked);

  out.mean.assign(tracked.size(), std::vector<double>(out.times.size()));
  out.stddev = out.mean;
  std::vector<double> column(spec.replicas);
  for (std::size_t k = 0; k < tracked.size(); ++k) {
    for (std::size_t ti = 0; ti < out.times.size(); ++ti) {
      for (std::size_t r = 0; r < spec.replicas; ++r) column[r] = out.per_replica[r][k][ti];
      const MeanStd ms = reduce(column);
      out.mean[k][ti] = ms.mean;
      out.stddev[k][ti] = ms.std;
    }
  }
  return out;
}

}  // namespace detail

/// Grows one base graph to T0, ranks its nodes by visibility, then follows the
/// rank-k nodes through R independent continuations of that same graph.
inline TrackedSeries experiment_topk(const ExperimentSpec& spec) {
  if (spec.protocol != Protocol::TopK) throw UsageError("experiment_topk: protocol must be topk");
  return detail::track_ranks(spec);
}

// As experiment_topk, with ranking and tracking by local visibility.
inline TrackedSeries experiment_spatial(const ExperimentSpec& spec) {
  if (spec.protocol != Protocol::SpatialTopK) throw UsageError("experiment_spatial: protocol must be spatial-topk");
  return detail::track_ranks(spec);
}

/// Node T0+1 enters every replica with twice the base graph's maximum fitness;
/// its visibility is then followed through R continuations.
inline InjectedNodeSeries experiment_inject(const ExperimentSpec& spec) {
  if (spec.protocol != Protocol::Inject) throw UsageError("experiment_inject: protocol must be inject");
  spec.validate();
  const GrowthProcess base = detail::grow_base(spec);
  double max_fitness = 0.0;
  for (const NodeRecord& n : base.state().nodes) max_fitness = std::max(max_fitness, n.fitness);
  const double injected = 2.0 * max_fitness;
  const NodeId node = static_cast<NodeId>(spec.T0 + 1);

  InjectedNodeSeries out;
  out.node = node;
  out.replicas = spec.replicas;
  out.times = detail::time_grid(spec.T0 + 1, spec.T0, std::max(spec.T, spec.T0 + 1), spec.record_every);

  struct ReplicaResult {
    std::vector<double> values;
    double max_other = 0.0;
  };
  const unsigned threads = spec.threads ? spec.threads : default_threads();
  auto results = parallel_map(spec.replicas, threads, [&](std::size_t r) {
    GrowthProcess proc(base.state(), spec.kernel, spec.fitness(), Rng(replica_stream(spec.seed, r)));
    proc.step(injected);
    ReplicaResult res;
    res.values.resize(out.times.size());
    for (std::size_t ti = 0; ti < out.times.size(); ++ti) {
      proc.grow_to(out.times[ti]);
      res.values[ti] = proc.tracked_visibility(node);
    }
    const auto vis = visibility_nonspatial(proc.state(), spec.kernel);
    for (std::size_t j = 0; j < vis.values.size(); ++j) {
      if (j != node) res.max_other = std::max(res.max_other, vis.values[j]);
    }
    return res;
  });

  out.injected_fitness.assign(spec.replicas, injected);
  std::vector<double> column(spec.replicas);
  out.mean.resize(out.times.size());
  out.stddev.resize(out.times.size());
  for (std::size_t ti = 0; ti < out.times.size(); ++ti) {
    for (std::size_t r = 0; r < spec.replicas; ++r) column[r] = results[r].values[ti];
    const auto ms = detail::reduce(column);
    out.mean[ti] = ms.mean;
    out.stddev[ti] = ms.std;
  }
  for (auto& r : results) {
    out.per_replica.push_back(std::move(r.values));
    out.final_max_other.push_back(r.max_other);
  }
  return out;
}

}  // namespace netvis
