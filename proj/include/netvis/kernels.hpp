#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netvis/error.hpp"
#include "netvis/graph.hpp"
#include "netvis/numeric.hpp"

namespace netvis {

enum class KernelKind { BA, AdditiveFitness, MultiplicativeFitness, GeneralFitness, Spatial };

// Fitness/degree factor: g for the general fitness rule, beta for the spatial rule.
using AttachFn = std::function<double(double fitness, double degree)>;

inline double quadratic_attach(double fitness, double degree) {
  const double p = fitness * degree;
  return p * p;
}

inline AttachFn power_attach(double exponent) {
  return [exponent](double fitness, double degree) { return std::pow(fitness * degree, exponent); };
}

/// Which attachment rule is in force.
///
/// An empty `g` means the quadratic (xi*D)^2; an empty `beta` means the
/// multiplicative xi*D. Empty handles take an inlined fast path.
struct KernelSpec {
  KernelKind kind = KernelKind::BA;
  AttachFn g;
  double gamma = 0.0;
  AttachFn beta;

  static KernelSpec ba() { return {KernelKind::BA, {}, 0.0, {}}; }
  static KernelSpec af() { return {KernelKind::AdditiveFitness, {}, 0.0, {}}; }
  static KernelSpec mf() { return {KernelKind::MultiplicativeFitness, {}, 0.0, {}}; }
  static KernelSpec gf(AttachFn g = {}) { return {KernelKind::GeneralFitness, std::move(g), 0.0, {}}; }
  static KernelSpec spatial(double gamma, AttachFn beta = {}) {
    return {KernelKind::Spatial, {}, gamma, std::move(beta)};
  }

  bool is_spatial() const { return kind == KernelKind::Spatial; }

  void validate() const {
    if (kind == KernelKind::Spatial && (!(gamma >= 0.0) || !std::isfinite(gamma))) {
      throw ConfigError("gamma must be >= 0");
    }
  }
};

inline std::string_view to_string(KernelKind k) {
  switch (k) {
    case KernelKind::BA: return "ba";
    case KernelKind::AdditiveFitness: return "af";
    case KernelKind::MultiplicativeFitness: return "mf";
    case KernelKind::GeneralFitness: return "gf";
    case KernelKind::Spatial: return "spatial";
  }
  return "?";
}

inline KernelKind parse_kernel_kind(std::string_view s) {
  if (s == "ba") return KernelKind::BA;
  if (s == "af") return KernelKind::AdditiveFitness;
  if (s == "mf") return KernelKind::MultiplicativeFitness;
  if (s == "gf") return KernelKind::GeneralFitness;
  if (s == "spatial") return KernelKind::Spatial;
  throw ConfigError("unknown model '" + std::string(s) + "' (expected ba, af, mf, gf, spatial)");
}

// Location-free part of the weight: D, xi+D, xi*D, g(xi,D) or beta(xi,D).
inline double attractiveness(const KernelSpec& k, double fitness, double degree) {
  switch (k.kind) {
    case KernelKind::BA: return degree;
    case KernelKind::AdditiveFitness: return fitness + degree;
    case KernelKind::MultiplicativeFitness: return fitness * degree;
    case KernelKind::GeneralFitness: return k.g ? k.g(fitness, degree) : quadratic_attach(fitness, degree);
    case KernelKind::Spatial: return k.beta ? k.beta(fitness, degree) : fitness * degree;
  }
  return 0.0;
}

inline double spatial_decay(double gamma, Point a, Point b) { return std::exp(-gamma * distance(a, b)); }

/// Unnormalized attachment weight of existing node i. `new_location` is the
/// arriving node's location and must be given exactly when the rule is spatial.
inline double node_weight(const GraphState& g, NodeId i, const KernelSpec& k,
                          std::optional<Point> new_location = std::nullopt) {
  if (i >= g.size()) throw UsageError("node_weight: node id out of range");
  if (k.is_spatial() != new_location.has_value()) {
    throw UsageError(k.is_spatial() ? "node_weight: spatial kernel needs the new node's location"
                                    : "node_weight: location given for a location-free kernel");
  }
  const NodeRecord& n = g.nodes[i];
  const double a = attractiveness(k, n.fitness, n.degree);
  if (!k.is_spatial()) return a;
  return spatial_decay(k.gamma, n.location, *new_location) * a;
}

/// Aggregates that appear in the one-step visibility-change formulas.
struct StepDecomposition {
  double Xi = 0.0;     // sum of fitness
  double psi = 0.0;    // sum of fitness * degree
  double Gamma = 0.0;  // sum of the kernel's location-free weight (g for GF)
  std::vector<double> delta_g;    // weight(D+1) - weight(D), per node
  std::vector<double> Gamma_loc;  // spatial only: sum_i e^{-gamma d(i,k)} beta_i at node k

  // Spatial increment of node i's weight seen from node j's location.
  static double delta_h(const GraphState& g, const KernelSpec& k, NodeId i, NodeId j) {
    const NodeRecord& n = g.nodes[i];
    const double step =
        attractiveness(k, n.fitness, n.degree + 1.0) - attractiveness(k, n.fitness, n.degree);
    return spatial_decay(k.gamma, n.location, g.nodes[j].location) * step;
  }
};

inline StepDecomposition decomposition(const GraphState& g, const KernelSpec& k) {
  StepDecomposition d;
  CompensatedSum<double> xi, psi, gamma;
  d.delta_g.reserve(g.size());
  for (const NodeRecord& n : g.nodes) {
    xi.add(n.fitness);
    psi.add(n.fitness * n.degree);
    const double w = attractiveness(k, n.fitness, n.degree);
    gamma.add(w);
    d.delta_g.push_back(attractiveness(k, n.fitness, n.degree + 1.0) - w);
  }
  d.Xi = xi.value();
  d.psi = psi.value();
  d.Gamma = gamma.value();
  if (k.is_spatial()) {
    d.Gamma_loc.resize(g.size());
    for (std::size_t kk = 0; kk < g.size(); ++kk) {
      CompensatedSum<double> s;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const NodeRecord& n = g.nodes[i];
        s.add(spatial_decay(k.gamma, n.location, g.nodes[kk].location) *
              attractiveness(k, n.fitness, n.degree));
      }
      d.Gamma_loc[kk] = s.value();
    }
  }
  return d;
}

}  // namespace netvis
