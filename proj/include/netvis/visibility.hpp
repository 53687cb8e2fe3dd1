#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "netvis/error.hpp"
#include "netvis/graph.hpp"
#include "netvis/kernels.hpp"
#include "netvis/numeric.hpp"
#include "netvis/rng.hpp"

namespace netvis {

enum class VisibilityVariant { Nonspatial, Local, GlobalMC, MaxGrid };

/// Per-node attachment probabilities at one time step.
struct VisibilityVector {
  std::uint64_t time = 0;
  VisibilityVariant variant = VisibilityVariant::Nonspatial;
  std::vector<double> values;
  std::vector<double> std_errors;      // GlobalMC only
  std::size_t mc_samples = 0;          // GlobalMC only
  std::vector<Point> argmax_locations; // MaxGrid only
};

inline VisibilityVector visibility_nonspatial(const GraphState& g, const KernelSpec& k) {
  if (k.is_spatial()) throw UsageError("visibility_nonspatial: spatial kernel has no single visibility vector");
  VisibilityVector v;
  v.time = g.time;
  v.variant = VisibilityVariant::Nonspatial;
  v.values.resize(g.size());
  CompensatedSum<double> total;
  for (std::size_t i = 0; i < g.size(); ++i) {
    v.values[i] = attractiveness(k, g.nodes[i].fitness, g.nodes[i].degree);
    total.add(v.values[i]);
  }
  const double z = total.value();
  for (double& x : v.values) x /= z;
  return v;
}

namespace detail {

inline double beta_of(const AttachFn& beta, const NodeRecord& n) {
  return beta ? beta(n.fitness, n.degree) : n.fitness * n.degree;
}

}  // namespace detail

/// Probability that an arrival at location `chi` attaches to node i.
/// Decays are taken relative to the nearest node so no term underflows to 0/0.
inline double attachment_probability_at(const GraphState& g, NodeId i, double gamma,
                                        const AttachFn& beta, Point chi) {
  const std::size_t n = g.size();
  double d_min = INFINITY;
  for (const NodeRecord& r : g.nodes) d_min = std::min(d_min, distance(r.location, chi));
  CompensatedSum<double> z;
  double num = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const NodeRecord& r = g.nodes[j];
    const double w = std::exp(-gamma * (distance(r.location, chi) - d_min)) * detail::beta_of(beta, r);
    z.add(w);
    if (j == i) num = w;
  }
  return num / z.value();
}

/// Local visibility: the attachment probability to i for an arrival at i's own
/// location. Local visibilities of different nodes need not sum to one.
inline double local_visibility(const GraphState& g, NodeId i, double gamma, const AttachFn& beta = {}) {
  if (i >= g.size()) throw UsageError("local_visibility: node id out of range");
  const Point at = g.nodes[i].location;
  CompensatedSum<double> z;
  for (const NodeRecord& r : g.nodes) z.add(std::exp(-gamma * distance(r.location, at)) * detail::beta_of(beta, r));
  return detail::beta_of(beta, g.nodes[i]) / z.value();
}

// All local visibilities; each pairwise decay is evaluated once.
inline VisibilityVector local_visibility_all(const GraphState& g, double gamma, const AttachFn& beta = {}) {
  const std::size_t n = g.size();
  std::vector<double> b(n);
  for (std::size_t j = 0; j < n; ++j) b[j] = detail::beta_of(beta, g.nodes[j]);
  std::vector<double> z(b);  // self term: decay 1
  for (std::size_t i = 0; i < n; ++i) {
    const Point pi = g.nodes[i].location;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double e = std::exp(-gamma * distance(pi, g.nodes[j].location));
      z[i] += e * b[j];
      z[j] += e * b[i];
    }
  }
  VisibilityVector v;
  v.time = g.time;
  v.variant = VisibilityVariant::Local;
  v.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) v.values[i] = b[i] / z[i];
  return v;
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

inline std::vector<Point> draw_locations(std::size_t m, Rng& rng) {
  std::vector<Point> pts(m);
  for (auto& p : pts) {
    p.x = rng.uniform();
    p.y = rng.uniform();
  }
  return pts;
}

/// Global visibility of node i: mean over uniform arrival locations of the
/// attachment probability to i. Pass the same `locations` for every node of a
/// time step (common random numbers).
inline McEstimate global_visibility_mc(const GraphState& g, NodeId i, double gamma, const AttachFn& beta,
                                       std::span<const Point> locations) {
  if (locations.empty()) throw UsageError("global_visibility_mc: need at least one sample");
  if (i >= g.size()) throw UsageError("global_visibility_mc: node id out of range");
  CompensatedSum<double> s, s2;
  for (Point chi : locations) {
    const double p = attachment_probability_at(g, i, gamma, beta, chi);
    s.add(p);
    s2.add(p * p);
  }
  const double m = static_cast<double>(locations.size());
  const double mean = s.value() / m;
  double var = locations.size() > 1 ? (s2.value() - m * mean * mean) / (m - 1.0) : 0.0;
  if (var < 0.0) var = 0.0;
  return {mean, std::sqrt(var / m)};
}

inline McEstimate global_visibility_mc(const GraphState& g, NodeId i, double gamma, const AttachFn& beta,
                                       std::size_t m, Rng& rng) {
  if (m < 1) throw UsageError("global_visibility_mc: M must be >= 1");
  const auto pts = draw_locations(m, rng);
  return global_visibility_mc(g, i, gamma, beta, pts);
}

// Whole-graph global visibility with one shared location sample.
inline VisibilityVector global_visibility_all(const GraphState& g, double gamma, const AttachFn& beta,
                                              std::size_t m, Rng& rng) {
  if (m < 1) throw UsageError("global_visibility_all: M must be >= 1");
  const auto pts = draw_locations(m, rng);
  const std::size_t n = g.size();
  std::vector<CompensatedSum<double>> s(n), s2(n);
  std::vector<double> w(n);
  for (Point chi : pts) {
    double d_min = INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      w[j] = distance(g.nodes[j].location, chi);
      d_min = std::min(d_min, w[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      w[j] = std::exp(-gamma * (w[j] - d_min)) * detail::beta_of(beta, g.nodes[j]);
      z += w[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double p = w[j] / z;
      s[j].add(p);
      s2[j].add(p * p);
    }
  }
  VisibilityVector v;
  v.time = g.time;
  v.variant = VisibilityVariant::GlobalMC;
  v.mc_samples = m;
  v.values.resize(n);
  v.std_errors.resize(n);
  const double md = static_cast<double>(m);
  for (std::size_t j = 0; j < n; ++j) {
    const double mean = s[j].value() / md;
    const double var = m > 1 ? std::max(0.0, (s2[j].value() - md * mean * mean) / (md - 1.0)) : 0.0;
    v.values[j] = mean;
    v.std_errors[j] = std::sqrt(var / md);
  }
  return v;
}

// Fraction of `locations` within eps of c.
inline double ball_fraction(std::span<const Point> locations, Point c, double eps) {
  if (locations.empty()) return 0.0;
  std::size_t hits = 0;
  for (Point chi : locations) hits += distance(chi, c) < eps;
  return static_cast<double>(hits) / static_cast<double>(locations.size());
}

/// Lower bound on global visibility from the eps-ball around chi_i:
/// e^{-2 gamma eps} P(d(chi, chi_i) < eps) p_local(i), the ball probability
/// estimated from the same location sample as the global estimate.
inline double global_lower_bound(const GraphState& g, NodeId i, double gamma, const AttachFn& beta, double eps,
                                 std::span<const Point> locations) {
  return std::exp(-2.0 * gamma * eps) * ball_fraction(locations, g.nodes[i].location, eps) *
         local_visibility(g, i, gamma, beta);
}

struct MaxVisibility {
  double probability = 0.0;
  Point location;  // candidate attaining the maximum
};

/// Maximum attachment probability to i over a finite candidate set: chi_i
/// itself, every node location, and a grid_g x grid_g lattice with corners on
/// the square's corners. Ties keep the earliest candidate, chi_i first.
inline MaxVisibility max_visibility_grid(const GraphState& g, NodeId i, double gamma, const AttachFn& beta,
                                         std::size_t grid_g) {
  if (grid_g < 2) throw UsageError("max_visibility_grid: grid_g must be >= 2");
  if (i >= g.size()) throw UsageError("max_visibility_grid: node id out of range");
  MaxVisibility best{local_visibility(g, i, gamma, beta), g.nodes[i].location};
  auto consider = [&](Point chi) {
    const double p = attachment_probability_at(g, i, gamma, beta, chi);
    if (p > best.probability) best = {p, chi};
  };
  for (const NodeRecord& r : g.nodes) consider(r.location);
  const double step = 1.0 / static_cast<double>(grid_g - 1);
  for (std::size_t a = 0; a < grid_g; ++a) {
    for (std::size_t b = 0; b < grid_g; ++b) consider({a * step, b * step});
  }
  return best;
}

}  // namespace netvis
