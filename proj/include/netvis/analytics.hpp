#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netvis/error.hpp"
#include "netvis/graph.hpp"
#include "netvis/kernels.hpp"
#include "netvis/numeric.hpp"
#include "netvis/rng.hpp"
#include "netvis/sampler.hpp"

// One-step visibility change of an existing node.
//
// Throughout, `state` is the graph G_{t-1} (state.time == t - 1), node i is
// one of its nodes, and the arriving node is t with fitness xi_t (and, for the
// spatial rule, location chi_t). The quantity of interest is
//
//   E[ p_i(t+1) - p_i(t) | G_{t-1}, xi_t (, chi_t) ]
//
// where p_i(t) is i's visibility in G_{t-1} and p_i(t+1) its visibility after
// node t has attached. For the spatial rule visibility means local visibility.

namespace netvis {

struct AnalyticChange {
  std::optional<double> value;  // exact (BA, AF) or approximate (GF) value
  std::optional<double> lower;  // MF lower bound; spatial lower bound
  std::optional<double> upper;  // spatial upper bound
};

// P(d(chi, c) < eps) for chi uniform on the unit square: area of the disk
// intersected with the square, by midpoint quadrature in x.
inline double ball_probability(Point c, double eps, std::size_t steps = 8192) {
  if (!(eps > 0.0)) return 0.0;
  const double a = std::max(0.0, c.x - eps);
  const double b = std::min(1.0, c.x + eps);
  if (b <= a) return 0.0;
  const double h = (b - a) / static_cast<double>(steps);
  CompensatedSum<double> area;
  for (std::size_t s = 0; s < steps; ++s) {
    const double x = a + (s + 0.5) * h;
    const double dx = x - c.x;
    const double half = std::sqrt(std::max(0.0, eps * eps - dx * dx));
    const double lo = std::max(0.0, c.y - half);
    const double hi = std::min(1.0, c.y + half);
    if (hi > lo) area.add((hi - lo) * h);
  }
  return area.value();
}

inline AnalyticChange analytic_expected_change(const GraphState& g, NodeId i, const KernelSpec& k, double xi_t,
                                               std::optional<Point> chi_t = std::nullopt,
                                               std::optional<double> epsilon = std::nullopt) {
  if (g.time < 1) throw UsageError("analytic_expected_change: need t - 1 >= 1");
  if (i >= g.size()) throw UsageError("analytic_expected_change: node id out of range");
  const double t = static_cast<double>(g.time) + 1.0;
  const NodeRecord& ni = g.nodes[i];
  const double D = ni.degree;
  AnalyticChange out;

  switch (k.kind) {
    case KernelKind::BA:
      out.value = -D / (4.0 * t * (t - 1.0));
      break;

    case KernelKind::AdditiveFitness: {
      CompensatedSum<double> xi;
      for (const NodeRecord& n : g.nodes) xi.add(n.fitness);
      const double before = xi.value() + 2.0 * (t - 1.0);
      const double after = xi.value() + xi_t + 2.0 * t;
      out.value = -(ni.fitness + D) * (xi_t + 1.0) / (before * after);
      break;
    }

    case KernelKind::MultiplicativeFitness: {
      CompensatedSum<double> psi, acc;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const NodeRecord& n = g.nodes[j];
        psi.add(n.fitness * n.degree);
        if (j != i) acc.add(n.fitness * n.degree * (ni.fitness - xi_t - n.fitness));
      }
      const double p = psi.value();
      out.lower = ni.fitness * D * acc.value() / (p * p * (p + ni.fitness + xi_t));
      break;
    }

    case KernelKind::GeneralFitness: {
      CompensatedSum<double> gamma;
      std::vector<double> w(g.size()), dg(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) {
        const NodeRecord& n = g.nodes[j];
        w[j] = attractiveness(k, n.fitness, n.degree);
        dg[j] = attractiveness(k, n.fitness, n.degree + 1.0) - w[j];
        gamma.add(w[j]);
      }
      const double G = gamma.value();
      const double g_new = attractiveness(k, xi_t, 1.0);
      CompensatedSum<double> bracket;
      bracket.add(w[i] / G * (dg[i] - g_new));
      for (std::size_t kk = 0; kk < g.size(); ++kk) {
        if (kk != i) bracket.add(w[kk] / G * (dg[i] - dg[kk] - g_new));
      }
      out.value = w[i] / (G * G) * bracket.value();
      break;
    }

    case KernelKind::Spatial: {
      const double gamma = k.gamma;
      const Point ci = ni.location;
      std::vector<double> decay(g.size()), beta(g.size());
      CompensatedSum<double> z;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const NodeRecord& n = g.nodes[j];
        decay[j] = spatial_decay(gamma, n.location, ci);
        beta[j] = attractiveness(k, n.fitness, n.degree);
        z.add(decay[j] * beta[j]);
      }
      const double Z = z.value();
      const double c1 = beta[i] / (Z * Z * Z);
      const double inc_i = attractiveness(k, ni.fitness, D + 1.0) - beta[i];
      const double b_new = attractiveness(k, xi_t, 1.0);
      CompensatedSum<double> up, lo;
      const double e1 = epsilon ? std::exp(gamma * *epsilon) : 1.0;
      for (std::size_t kk = 0; kk < g.size(); ++kk) {
        const NodeRecord& n = g.nodes[kk];
        const double inc_k = decay[kk] * (attractiveness(k, n.fitness, n.degree + 1.0) - beta[kk]);
        const double lead = beta[kk] * decay[kk];
        up.add(lead * (inc_i - inc_k - b_new));
        if (epsilon) lo.add(lead * (inc_i / e1 - e1 * inc_k - e1 * e1 * b_new));
      }
      out.upper = c1 * up.value();
      if (epsilon) out.lower = ball_probability(ci, *epsilon) * c1 * lo.value();
      (void)chi_t;
      break;
    }
  }
  return out;
}

/// Exact expectation over every attachment outcome l in V_{t-1}, plus the
/// range of the per-outcome changes and the arrival's own expected visibility
/// (nonspatial rules only; NaN for spatial).
struct EnumeratedChange {
  double expected = 0.0;
  double min_outcome = 0.0;
  double max_outcome = 0.0;
  double newcomer_expected = 0.0;
};

namespace detail {

// Attachment law for the step G_{t-1} -> G_t, plus what node i "sees": its
// own weight before/after an edge, and how each outcome moves its normalizer.
struct OneStepModel {
  std::vector<long double> law;    // unnormalized P(S_t = l)
  long double law_total = 0;
  long double z = 0;               // normalizer of p_i(t)
  long double wi = 0, wi_plus = 0; // numerator of p_i without / with the new edge
  std::vector<long double> z_shift;  // normalizer change if S_t = l (newcomer included)
  long double newcomer = 0;        // newcomer's numerator (nonspatial)
};

inline OneStepModel one_step_model(const GraphState& g, NodeId i, const KernelSpec& k, double xi_t,
                                   std::optional<Point> chi_t) {
  const std::size_t n = g.size();
  OneStepModel m;
  m.law.resize(n);
  m.z_shift.resize(n);
  const NodeRecord& ni = g.nodes[i];
  if (!k.is_spatial()) {
    CompensatedSum<long double> z;
    const long double w_new = attractiveness(k, xi_t, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      const NodeRecord& r = g.nodes[j];
      const long double w = node_weight(g, static_cast<NodeId>(j), k);
      const long double w_plus = attractiveness(k, r.fitness, r.degree + 1.0);
      m.law[j] = w;
      z.add(w);
      m.z_shift[j] = (w_plus - w) + w_new;
    }
    m.z = z.value();
    m.law_total = m.z;
    m.wi = m.law[i];
    m.wi_plus = attractiveness(k, ni.fitness, ni.degree + 1.0);
    m.newcomer = w_new;
    return m;
  }
  if (!chi_t) throw UsageError("spatial one-step change needs the arrival's location");
  std::vector<double> law;
  spatial_weights(g, k, *chi_t, law);
  CompensatedSum<long double> lt, z;
  for (std::size_t j = 0; j < n; ++j) {
    const NodeRecord& r = g.nodes[j];
    m.law[j] = law[j];
    lt.add(law[j]);
    const long double decay = std::exp(-static_cast<long double>(k.gamma) * distance(r.location, ni.location));
    const long double b = attractiveness(k, r.fitness, r.degree);
    z.add(decay * b);
    m.z_shift[j] = decay * (attractiveness(k, r.fitness, r.degree + 1.0) - b);
  }
  const long double new_term =
      std::exp(-static_cast<long double>(k.gamma) * distance(*chi_t, ni.location)) * attractiveness(k, xi_t, 1.0);
  for (auto& s : m.z_shift) s += new_term;
  m.law_total = lt.value();
  m.z = z.value();
  m.wi = attractiveness(k, ni.fitness, ni.degree);
  m.wi_plus = attractiveness(k, ni.fitness, ni.degree + 1.0);
  return m;
}

}  // namespace detail

inline EnumeratedChange enumerate_expected_change(const GraphState& g, NodeId i, const KernelSpec& k, double xi_t,
                                                  std::optional<Point> chi_t = std::nullopt) {
  if (g.time < 1) throw UsageError("enumerate_expected_change: need t - 1 >= 1");
  if (i >= g.size()) throw UsageError("enumerate_expected_change: node id out of range");
  const auto m = detail::one_step_model(g, i, k, xi_t, chi_t);
  const long double before = m.wi / m.z;
  CompensatedSum<long double> e, nc;
  long double lo = INFINITY, hi = -INFINITY;
  for (std::size_t l = 0; l < g.size(); ++l) {
    const long double after = (l == i ? m.wi_plus : m.wi) / (m.z + m.z_shift[l]);
    const long double change = after - before;
    const long double prob = m.law[l] / m.law_total;
    e.add(prob * change);
    lo = std::min(lo, change);
    hi = std::max(hi, change);
    if (!k.is_spatial()) nc.add(prob * m.newcomer / (m.z + m.z_shift[l]));
  }
  EnumeratedChange out;
  out.expected = static_cast<double>(e.value());
  out.min_outcome = static_cast<double>(lo);
  out.max_outcome = static_cast<double>(hi);
  out.newcomer_expected = k.is_spatial() ? NAN : static_cast<double>(nc.value());
  return out;
}

struct McChange {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Monte-Carlo estimate of the same expectation: attachment outcomes are drawn
/// through a WeightIndex over the attachment law, one uniform per trial.
inline McChange monte_carlo_expected_change(const GraphState& g, NodeId i, const KernelSpec& k, double xi_t,
                                            std::optional<Point> chi_t, std::size_t trials, Rng& rng) {
  if (trials < 2) throw UsageError("monte_carlo_expected_change: need at least 2 trials");
  if (i >= g.size()) throw UsageError("monte_carlo_expected_change: node id out of range");
  const auto m = detail::one_step_model(g, i, k, xi_t, chi_t);
  std::vector<double> law(m.law.begin(), m.law.end());
  const WeightIndex index = WeightIndex::build(law);
  const double z = static_cast<double>(m.z);
  const double wi = static_cast<double>(m.wi);
  const double wi_plus = static_cast<double>(m.wi_plus);
  const double before = wi / z;
  // Welford running mean / variance.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t n = 1; n <= trials; ++n) {
    const std::size_t l = index.sample(rng.uniform());
    const double change = (l == i ? wi_plus : wi) / (z + static_cast<double>(m.z_shift[l])) - before;
    const double delta = change - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (change - mean);
  }
  const double var = m2 / static_cast<double>(trials - 1);
  return {mean, std::sqrt(var / static_cast<double>(trials)), trials};
}

enum class Verdict { Pass, Fail, NotApplicable };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "n/a";
  }
  return "?";
}

/// How each lemma is judged.
///
/// BA and AF formulas are exact and compared at `exact_rel`. The MF, GF and
/// spatial expressions are asymptotic (derived through approximate steps), so
/// they are only judged for t >= asymptotic_min_t and only on what they
/// assert: MF, a positive bound implies a positive change; GF, the sign of
/// the approximation; spatial, the exact change stays below the upper
/// expression up to `bound_slack_rel` of its magnitude, wherever one
/// attachment moves i's normalizer by at most `linear_max` of itself.
struct TolerancePolicy {
  double exact_rel = 1e-12;
  double sigma = 3.0;
  std::uint64_t asymptotic_min_t = 1000;
  double bound_slack_rel = 0.05;
  double linear_max = 0.05;   // spatial: judged only if max_l shift_l / normalizer <= this
  std::size_t mc_trials = 0;  // 0 disables the Monte-Carlo column
};

struct LemmaReport {
  std::string lemma_id;
  std::uint64_t t = 0;  // arrival time; the conditioning graph is G_{t-1}
  NodeId node = 0;
  double xi_t = 0.0;
  std::optional<Point> chi_t;
  std::optional<double> epsilon;
  std::optional<double> analytic;
  std::optional<double> lower;
  std::optional<double> upper;
  EnumeratedChange enumerated;
  std::optional<double> mc_mean;
  std::optional<double> mc_stderr;
  Verdict verdict = Verdict::NotApplicable;
  std::string tolerance;
};

inline std::string_view lemma_id_for(KernelKind k) {
  switch (k) {
    case KernelKind::BA: return "lemma1-ba";
    case KernelKind::AdditiveFitness: return "lemma1-af";
    case KernelKind::MultiplicativeFitness: return "lemma1-mf";
    case KernelKind::GeneralFitness: return "lemma2-gf";
    case KernelKind::Spatial: return "lemma5-spatial";
  }
  return "?";
}

inline LemmaReport verify_lemma(const GraphState& g, NodeId i, const KernelSpec& k, double xi_t,
                                std::optional<Point> chi_t, std::optional<double> epsilon,
                                const TolerancePolicy& policy, Rng& rng) {
  LemmaReport r;
  r.lemma_id = lemma_id_for(k.kind);
  r.t = g.time + 1;
  r.node = i;
  r.xi_t = xi_t;
  r.chi_t = chi_t;
  r.epsilon = epsilon;
  const AnalyticChange a = analytic_expected_change(g, i, k, xi_t, chi_t, epsilon);
  r.analytic = a.value;
  r.lower = a.lower;
  r.upper = a.upper;
  r.enumerated = enumerate_expected_change(g, i, k, xi_t, chi_t);
  if (policy.mc_trials > 0) {
    const McChange mc = monte_carlo_expected_change(g, i, k, xi_t, chi_t, policy.mc_trials, rng);
    r.mc_mean = mc.mean;
    r.mc_stderr = mc.std_error;
  }
  const double e = r.enumerated.expected;
  const bool asymptotic = r.t >= policy.asymptotic_min_t;
  auto to_verdict = [](bool ok) { return ok ? Verdict::Pass : Verdict::Fail; };

  switch (k.kind) {
    case KernelKind::BA:
    case KernelKind::AdditiveFitness:
      r.verdict = to_verdict(std::abs(*a.value - e) <= policy.exact_rel * std::abs(*a.value));
      r.tolerance = "exact rel " + shortest(policy.exact_rel);
      break;
    case KernelKind::MultiplicativeFitness: {
      r.tolerance = "sign: bound>0 => change>0, mc not below -" + shortest(policy.sigma) + " se, t>=" +
                    std::to_string(policy.asymptotic_min_t);
      if (!asymptotic) break;
      // Monte Carlo can only refute: a significantly negative mean fails.
      bool ok = *a.lower <= 0.0 || e > 0.0;
      if (ok && *a.lower > 0.0 && r.mc_mean) ok = *r.mc_mean >= -policy.sigma * *r.mc_stderr;
      r.verdict = to_verdict(ok);
      break;
    }
    case KernelKind::GeneralFitness:
      r.tolerance = "sign agreement, t>=" + std::to_string(policy.asymptotic_min_t);
      if (!asymptotic) break;
      r.verdict = to_verdict((*a.value > 0.0) == (e > 0.0) || *a.value == 0.0);
      break;
    case KernelKind::Spatial: {
      // The upper expression is first order in the normalizer shift; outside
      // that regime it is reported but not judged.
      const auto m = detail::one_step_model(g, i, k, xi_t, chi_t);
      long double shift = 0;
      for (long double s : m.z_shift) shift = std::max(shift, s / m.z);
      r.tolerance = "change <= upper + " + shortest(policy.bound_slack_rel) + "|upper|, t>=" +
                    std::to_string(policy.asymptotic_min_t) + ", shift/normalizer " +
                    shortest(static_cast<double>(shift)) + " <= " + shortest(policy.linear_max);
      if (!asymptotic || shift > policy.linear_max) break;
      r.verdict = to_verdict(e <= *a.upper + policy.bound_slack_rel * std::abs(*a.upper));
      break;
    }
  }
  return r;
}

}  // namespace netvis
