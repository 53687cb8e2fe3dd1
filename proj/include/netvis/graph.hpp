#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "netvis/error.hpp"
#include "netvis/rng.hpp"

namespace netvis {

// Node ids are arrival times: at logical time t the ids are exactly 0..t.
using NodeId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Euclidean distance on the plain unit square (no wraparound).
inline double distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

struct NodeRecord {
  double fitness = 1.0;
  Point location;
  std::uint32_t degree = 0;

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct Edge {
  NodeId child = 0;
  NodeId parent = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Arrival-ordered node records plus logical time.
///
/// Degrees, fitness and locations are a sufficient statistic for every
/// attachment rule; the edge log is kept only on request.
struct GraphState {
  std::uint64_t time = 0;
  std::vector<NodeRecord> nodes;
  std::optional<std::vector<Edge>> edges;

  std::size_t size() const { return nodes.size(); }
  const NodeRecord& operator[](NodeId i) const { return nodes[i]; }

  std::uint64_t degree_sum() const {
    return std::accumulate(nodes.begin(), nodes.end(), std::uint64_t{0},
                           [](std::uint64_t s, const NodeRecord& n) { return s + n.degree; });
  }

  friend bool operator==(const GraphState&, const GraphState&) = default;
};

// Checks node count = t + 1 and sum of degrees = 2t. Returns a description of
// the first violation, or nullopt.
inline std::optional<std::string> check_invariants(const GraphState& g) {
  if (g.nodes.size() != g.time + 1) {
    return "node count " + std::to_string(g.nodes.size()) + " != t+1 = " + std::to_string(g.time + 1);
  }
  if (g.degree_sum() != 2 * g.time) {
    return "degree sum " + std::to_string(g.degree_sum()) + " != 2t = " + std::to_string(2 * g.time);
  }
  for (const auto& n : g.nodes) {
    if (n.location.x < 0.0 || n.location.x > 1.0 || n.location.y < 0.0 || n.location.y > 1.0) {
      return "location outside the unit square";
    }
  }
  return std::nullopt;
}

/// Node fitness law. Pareto with survival (x_min/x)^alpha_p on x >= x_min,
/// drawn by inverse CDF; Constant is the degenerate law used in tests.
struct FitnessDistribution {
  enum class Kind { Pareto, Constant };

  Kind kind = Kind::Pareto;
  double alpha_p = 2.0;
  double x_min = 1.0;

  static FitnessDistribution pareto(double alpha_p, double x_min = 1.0) {
    return {Kind::Pareto, alpha_p, x_min};
  }
  static FitnessDistribution constant(double value) { return {Kind::Constant, 0.0, value}; }

  void validate() const {
    if (!(x_min > 0.0) || !std::isfinite(x_min)) throw ConfigError("fitness scale must be > 0");
    if (kind == Kind::Pareto && (!(alpha_p > 0.0) || !std::isfinite(alpha_p))) {
      throw ConfigError("alpha_p must be > 0");
    }
  }

  // u must lie in (0, 1].
  double draw(double u) const {
    if (kind == Kind::Constant) return x_min;
    return x_min * std::pow(u, -1.0 / alpha_p);
  }
};

// Node attributes for one arrival. Always consumes three uniforms (fitness, x, y).
inline NodeRecord draw_node(const FitnessDistribution& dist, Rng& rng) {
  NodeRecord n;
  n.fitness = dist.draw(rng.uniform_open_low());
  n.location.x = rng.uniform();
  n.location.y = rng.uniform();
  n.degree = 0;
  return n;
}

}  // namespace netvis
