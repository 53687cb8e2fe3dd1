#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netvis/error.hpp"
#include "netvis/graph.hpp"
#include "netvis/kernels.hpp"
#include "netvis/rng.hpp"
#include "netvis/sampler.hpp"
#include "netvis/visibility.hpp"

namespace netvis {

/// Two nodes joined by one edge at logical time t = 1, attributes drawn from
/// `fitness_dist` and the uniform location law.
inline GraphState new_seed_graph(const KernelSpec& kernel, const FitnessDistribution& fitness_dist, Rng& rng,
                                 bool keep_edges = false) {
  kernel.validate();
  fitness_dist.validate();
  GraphState g;
  g.time = 1;
  g.nodes.push_back(draw_node(fitness_dist, rng));
  g.nodes.push_back(draw_node(fitness_dist, rng));
  g.nodes[0].degree = 1;
  g.nodes[1].degree = 1;
  if (keep_edges) g.edges = std::vector<Edge>{{1, 0}};
  return g;
}

/// One replica's sequential growth loop.
///
/// Each step draws the arrival's attributes (fitness, x, y) and one attachment
/// uniform, picks the target with the kernel's law, then appends the arrival
/// with degree 1. The arrival joins the candidate pool from the next step on.
/// Location-free kernels sample from a WeightIndex maintained alongside the
/// state; the spatial kernel does a linear pass per arrival.
class GrowthProcess {
 public:
  GrowthProcess(GraphState state, KernelSpec kernel, FitnessDistribution fitness_dist, Rng rng)
      : state_(std::move(state)), kernel_(std::move(kernel)), dist_(fitness_dist), rng_(rng) {
    kernel_.validate();
    dist_.validate();
    if (state_.time < 1) throw UsageError("GrowthProcess: state must be at time >= 1");
    rebuild_index();
  }

  const GraphState& state() const { return state_; }
  GraphState& mutable_state() { return state_; }
  const KernelSpec& kernel() const { return kernel_; }
  const FitnessDistribution& fitness_distribution() const { return dist_; }
  const WeightIndex& index() const { return index_; }
  std::uint64_t time() const { return state_.time; }

  // Adds node t+1; returns the node it attached to. `fitness_override`
  // replaces the drawn fitness (the draw is still consumed).
  NodeId step(std::optional<double> fitness_override = std::nullopt) {
    NodeRecord arrival = draw_node(dist_, rng_);
    if (fitness_override) arrival.fitness = *fitness_override;
    const double u = rng_.uniform();

    NodeId target;
    if (kernel_.is_spatial()) {
      target = sample_spatial(state_, kernel_, arrival.location, u, scratch_);
    } else {
      if (!(index_.total() > 0.0)) throw InternalError("total attachment weight is zero");
      target = static_cast<NodeId>(index_.sample(u));
    }

    NodeRecord& t = state_.nodes[target];
    ++t.degree;
    if (!kernel_.is_spatial()) index_.update(target, attractiveness(kernel_, t.fitness, t.degree));
    arrival.degree = 1;
    state_.nodes.push_back(arrival);
    ++state_.time;
    if (state_.edges) state_.edges->push_back({static_cast<NodeId>(state_.time), target});
    if (!kernel_.is_spatial()) index_.append(attractiveness(kernel_, arrival.fitness, arrival.degree));
    return target;
  }

  void grow_to(std::uint64_t t) {
    if (t < state_.time) throw UsageError("grow_to: target time is before the current time");
    while (state_.time < t) step();
  }

  // Visibility of one node under a location-free kernel, from the index total.
  double tracked_visibility(NodeId i) const {
    if (kernel_.is_spatial()) return local_visibility(state_, i, kernel_.gamma, kernel_.beta);
    return index_.weight(i) / index_.total();
  }

 private:
  void rebuild_index() {
    if (kernel_.is_spatial()) return;
    std::vector<double> w(state_.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = attractiveness(kernel_, state_.nodes[i].fitness, state_.nodes[i].degree);
    }
    index_ = WeightIndex::build(w);
  }

  GraphState state_;
  KernelSpec kernel_;
  FitnessDistribution dist_;
  Rng rng_;
  WeightIndex index_;
  std::vector<double> scratch_;
};

// Advances `process` by one arrival; returns the attachment target.
inline NodeId grow_step(GrowthProcess& process) { return process.step(); }

// Location-free kernels record nonspatial visibility; the spatial kernel records local visibility.
inline VisibilityVector snapshot_visibility(const GraphState& g, const KernelSpec& k) {
  return k.is_spatial() ? local_visibility_all(g, k.gamma, k.beta) : visibility_nonspatial(g, k);
}

struct Trajectory {
  std::vector<VisibilityVector> snapshots;
  GraphState final_state;
};

/// Grows a single trajectory from the seed graph to time `T`.
///
/// Snapshots are taken of the seed state, at every t divisible by
/// `record_every`, and at T. All random draws, including the seed graph's
/// attributes, come from `stream`.
inline Trajectory run_growth(const KernelSpec& kernel, const FitnessDistribution& fitness_dist, std::uint64_t T,
                             RngStream stream, std::uint64_t record_every, bool keep_edges = false) {
  if (T < 1) throw UsageError("run_growth: T must be >= 1");
  if (record_every < 1) throw UsageError("run_growth: record_every must be >= 1");
  Rng rng(stream);
  GraphState seed = new_seed_graph(kernel, fitness_dist, rng, keep_edges);
  GrowthProcess proc(std::move(seed), kernel, fitness_dist, rng);
  Trajectory traj;
  traj.snapshots.push_back(snapshot_visibility(proc.state(), kernel));
  while (proc.time() < T) {
    proc.step();
    if (proc.time() % record_every == 0 || proc.time() == T) {
      traj.snapshots.push_back(snapshot_visibility(proc.state(), kernel));
    }
  }
  traj.final_state = proc.state();
  return traj;
}

}  // namespace netvis
