// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: netvis_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"

using namespace netvis;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

NodeId max_degree_node(const GraphState& g) {
  NodeId top = 0;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (g[i].degree > g[top].degree) top = i;
  }
  return top;
}

GraphState grow(const KernelSpec& k, double alpha_p, std::uint64_t t, RngStream stream) {
  const auto fit = FitnessDistribution::pareto(alpha_p);
  Rng rng(stream);
  GrowthProcess p(new_seed_graph(k, fit, rng), k, fit, rng);
  p.grow_to(t);
  return p.state();
}

Outcome exact_formula(const KernelSpec& k, std::uint64_t seed) {
  Rng r({seed, 0});
  const auto fit = FitnessDistribution::pareto(2.0);
  double worst = 0.0;
  std::size_t checked = 0, bad = 0;
  for (int graph = 0; graph < 200; ++graph) {
    const std::uint64_t t = 3 + static_cast<std::uint64_t>(r.uniform() * 198);  // t in [3, 200]
    const GraphState g = oracle::random_tree(t - 1, fit, r);
    for (int s = 0; s < 5; ++s) {
      const auto i = static_cast<NodeId>(r.uniform() * g.size());
      const double xi_t = k.kind == KernelKind::BA ? 1.0 : fit.draw(r.uniform_open_low());
      const double a = *analytic_expected_change(g, i, k, xi_t).value;
      const double e = enumerate_expected_change(g, i, k, xi_t).expected;
      const double rel = std::abs(a - e) / std::abs(a);
      worst = std::max(worst, rel);
      bad += rel > 1e-12;
      ++checked;
    }
  }
  return {bad == 0, std::to_string(checked) + " checks, max rel err " + fmt(worst) + " (tol 1e-12)"};
}

// Time index of t in a grid.
std::size_t at(const std::vector<std::uint64_t>& grid, std::uint64_t t) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  return static_cast<std::size_t>(it - grid.begin());
}

ExperimentSpec ci_spec(Protocol p, KernelSpec k, double alpha_p, std::uint64_t seed) {
  ExperimentSpec s;
  s.protocol = p;
  s.kernel = std::move(k);
  s.alpha_p = alpha_p;
  s.apply(kCiScale);
  s.record_every = 100;
  s.ranks = p == Protocol::SpatialTopK ? spatial_ranks() : top50_ranks();
  s.seed = seed;
  return s;
}

std::size_t count_final_above(const TrackedSeries& s, double threshold) {
  std::size_t c = 0;
  for (const auto& row : s.mean) c += row.back() > threshold;
  return c;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Cached CI topk runs shared by 9(a) and 9(b).
const TrackedSeries& ci_topk(const std::string& name, const KernelSpec& k, double alpha_p) {
  static std::map<std::string, TrackedSeries> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, experiment_topk(ci_spec(Protocol::TopK, k, alpha_p, 2024))).first;
  return it->second;
}

std::vector<Criterion> criteria() {
  std::vector<Criterion> c;

  c.push_back({1, "BA one-step change formula is exact", 10, [] { return exact_formula(KernelSpec::ba(), 101); }});
  c.push_back({2, "AF one-step change formula is exact", 10, [] { return exact_formula(KernelSpec::af(), 102); }});

  c.push_back({3, "worked values on the path 0-1-2", 1, [] {
                 const double ba = enumerate_expected_change(oracle::path3(), 1, KernelSpec::ba(), 1.0).expected;
                 const double af = enumerate_expected_change(oracle::path3(), 1, KernelSpec::af(), 1.0).expected;
                 const double mf =
                     enumerate_expected_change(oracle::path3(1, 4, 1), 1, KernelSpec::mf(), 1.0).expected;
                 const double e1 = std::abs(ba + 1.0 / 12.0), e2 = std::abs(af + 3.0 / 35.0),
                              e3 = std::abs(mf + 4.0 / 150.0);
                 return Outcome{e1 <= 1e-15 && e2 <= 1e-15 && e3 <= 1e-15,
                                "BA " + digits17(ba) + ", AF " + digits17(af) + ", MF " + digits17(mf) +
                                    ", max err " + fmt(std::max({e1, e2, e3})) + " (tol 1e-15)"};
               }});

  c.push_back({4, "MF dominant node gains visibility at t=2000 (Monte Carlo)", 120, [] {
                 bool ok = true;
                 std::string d;
                 for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                   GraphState g = grow(KernelSpec::mf(), 2.0, 1999, {400 + seed, 0});
                   const NodeId i = max_degree_node(g);
                   const double xi_t = 1.0;
                   double fmax = 0.0;
                   for (NodeId j = 0; j < g.size(); ++j) {
                     if (j != i) fmax = std::max(fmax, g[j].fitness);
                   }
                   g.nodes[i].fitness = 10.0 * (fmax + xi_t);
                   Rng rng({400 + seed, 99});
                   const auto mc = monte_carlo_expected_change(g, i, KernelSpec::mf(), xi_t, std::nullopt, 100000, rng);
                   const double z = mc.mean / mc.std_error;
                   ok = ok && z >= 3.0;
                   d += (d.empty() ? "" : "; ") + std::string("mean ") + fmt(mc.mean) + " z=" + fmt(z);
                 }
                 return Outcome{ok, d + " (need z >= 3)"};
               }});

  c.push_back({5, "GF dominant node gains, injected newcomer loses, t=2000", 120, [] {
                 bool ok = true;
                 std::string d;
                 const KernelSpec k = KernelSpec::gf();
                 const auto fit = FitnessDistribution::pareto(2.0);
                 for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                   Rng rng({500 + seed, 0});
                   GrowthProcess p(new_seed_graph(k, fit, rng), k, fit, rng);
                   p.grow_to(1998);
                   double fmax = 0.0;
                   for (const auto& n : p.state().nodes) fmax = std::max(fmax, n.fitness);
                   const NodeId injected = p.step(2.0 * fmax);  // G_{1999}; arrival 2000 is next
                   (void)injected;
                   const NodeId newcomer = static_cast<NodeId>(p.state().size() - 1);
                   const GraphState& g = p.state();
                   const auto dec = decomposition(g, k);
                   const NodeId i = static_cast<NodeId>(
                       std::max_element(dec.delta_g.begin(), dec.delta_g.end()) - dec.delta_g.begin());
                   const double xi_t = 1.0;
                   const bool dominant = dec.delta_g[i] >= attractiveness(k, xi_t, 1.0);
                   const double e_dom = enumerate_expected_change(g, i, k, xi_t).expected;
                   const double e_new = enumerate_expected_change(g, newcomer, k, xi_t).expected;
                   ok = ok && dominant && e_dom > 0.0 && e_new < 0.0;
                   d += (d.empty() ? "" : "; ") + std::string("dominant ") + fmt(e_dom) + ", newcomer " + fmt(e_new);
                 }
                 return Outcome{ok, d};
               }});

  c.push_back({6, "visibility sums to 1 and degree sum is 2t, CI runs of all kernels", 300, [] {
                 const std::vector<KernelSpec> ks{KernelSpec::ba(), KernelSpec::af(), KernelSpec::mf(),
                                                  KernelSpec::gf(), KernelSpec::spatial(10.0)};
                 double worst = 0.0;
                 std::size_t vectors = 0, states = 0;
                 bool degree_ok = true;
                 for (const auto& k : ks) {
                   const auto spec = ci_spec(k.is_spatial() ? Protocol::SpatialTopK : Protocol::TopK, k, 2.0, 606);
                   const GrowthProcess base = [&] {
                     Rng rng(base_stream(spec.seed));
                     GrowthProcess p(new_seed_graph(k, spec.fitness(), rng), k, spec.fitness(), rng);
                     p.grow_to(spec.T0);
                     return p;
                   }();
                   for (std::size_t r = 0; r < spec.replicas; ++r) {
                     GrowthProcess p(base.state(), k, spec.fitness(), Rng(replica_stream(spec.seed, r)));
                     for (std::uint64_t t = spec.T0; t <= spec.T; t += spec.record_every) {
                       p.grow_to(t);
                       const GraphState& g = p.state();
                       ++states;
                       degree_ok = degree_ok && g.degree_sum() == 2 * g.time && !check_invariants(g);
                       if (k.is_spatial()) continue;
                       CompensatedSum<double> s;
                       for (double v : visibility_nonspatial(g, k).values) s.add(v);
                       worst = std::max(worst, std::abs(s.value() - 1.0));
                       ++vectors;
                     }
                   }
                 }
                 return Outcome{degree_ok && worst <= 1e-9, std::to_string(vectors) + " vectors, max |sum-1| " +
                                                                fmt(worst) + "; " + std::to_string(states) +
                                                                " states, degree sum " + (degree_ok ? "ok" : "BROKEN")};
               }});

  c.push_back({7, "local visibility rises to 1 along the gamma ladder", 30, [] {
                 const std::vector<double> ladder{1, 10, 100, 1000, 1e4};
                 bool mono = true;
                 double min_top = 1.0, max_gap = 0.0;
                 for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                   const GraphState g = grow(KernelSpec::spatial(5.0), 2.0, 19, {700 + seed, 0});
                   for (NodeId i = 0; i < g.size(); ++i) {
                     double prev = 0.0;
                     for (double gamma : ladder) {
                       const double p = local_visibility(g, i, gamma);
                       mono = mono && p >= prev;
                       prev = p;
                     }
                     min_top = std::min(min_top, prev);
                     max_gap = std::max(max_gap, max_visibility_grid(g, i, 1e4, {}, 32).probability - prev);
                   }
                 }
                 return Outcome{mono && min_top > 1.0 - 1e-3 && max_gap < 1e-3,
                                std::string("monotone ") + (mono ? "yes" : "no") + ", min p_local at 1e4 " +
                                    digits17(min_top) + ", max |p_max - p_local| " + fmt(max_gap)};
               }});

  c.push_back({8, "global visibility sandwiched between the ball bound and max-grid", 120, [] {
                 std::size_t cases = 0, inside = 0;
                 const double gammas[] = {5.0, 10.0, 50.0};
                 for (std::uint64_t s = 0; s < 20; ++s) {
                   const double gamma = gammas[s % 3];
                   const GraphState g = grow(KernelSpec::spatial(gamma), 2.0, 99, {800 + s, 0});
                   Rng rng({800 + s, 1});
                   const auto pts = draw_locations(4096, rng);
                   for (int q = 0; q < 3; ++q) {
                     const auto i = static_cast<NodeId>(rng.uniform() * g.size());
                     const auto est = global_visibility_mc(g, i, gamma, {}, pts);
                     const double hi = max_visibility_grid(g, i, gamma, {}, 32).probability;
                     for (double eps : {0.01, 0.05, 0.1}) {
                       const double lo = global_lower_bound(g, i, gamma, {}, eps, pts);
                       ++cases;
                       inside += lo - 3 * est.std_error <= est.estimate && est.estimate <= hi + 3 * est.std_error;
                     }
                   }
                 }
                 const double frac = double(inside) / double(cases);
                 return Outcome{frac >= 0.95, std::to_string(inside) + "/" + std::to_string(cases) + " inside (" +
                                                  fmt(100 * frac) + "%, need >= 95%)"};
               }});

  c.push_back({9, "top-k and injected-node behaviour at CI scale", 900, [] {
                 std::string d;
                 // (a)
                 bool a_ok = true;
                 for (auto [name, k] : {std::pair{"ba", KernelSpec::ba()}, std::pair{"af", KernelSpec::af()}}) {
                   const auto& s = ci_topk(name, k, 2.0);
                   std::size_t lower = 0;
                   for (const auto& row : s.mean) lower += row.back() < row.front();
                   a_ok = a_ok && lower * 10 >= s.ranks.size() * 9;
                   d += std::string("(a) ") + name + " " + std::to_string(lower) + "/" + std::to_string(s.ranks.size()) +
                        " decline; ";
                 }
                 // (b)
                 const std::size_t ba_hi = count_final_above(ci_topk("ba", KernelSpec::ba(), 2.0), 0.05);
                 const std::size_t mf_hi = count_final_above(ci_topk("mf1", KernelSpec::mf(), 1.0), 0.05);
                 const bool b_ok = mf_hi < ba_hi;
                 d += "(b) above 0.05: mf(a=1) " + std::to_string(mf_hi) + " vs ba " + std::to_string(ba_hi) + "; ";
                 // (c)
                 bool c_ok = true;
                 for (auto [name, k] : {std::pair{"af", KernelSpec::af()}, std::pair{"gf", KernelSpec::gf()}}) {
                   const auto s = experiment_inject(ci_spec(Protocol::Inject, k, 2.0, 2024));
                   const double early = s.mean[at(s.times, s.node - 1 + 10 * 100)];
                   const bool dec = s.mean.back() < early;
                   c_ok = c_ok && dec;
                   d += std::string("(c) ") + name + " " + fmt(early) + " -> " + fmt(s.mean.back()) + "; ";
                 }
                 const auto mf3 = experiment_inject(ci_spec(Protocol::Inject, KernelSpec::mf(), 3.0, 2024));
                 double max_other = 0.0;
                 for (double m : mf3.final_max_other) max_other += m;
                 max_other /= double(mf3.final_max_other.size());
                 const bool rises = mf3.mean.back() > mf3.mean.front();
                 const bool top = mf3.mean.back() >= max_other;
                 c_ok = c_ok && rises && top;
                 d += "mf(a=3) " + fmt(mf3.mean.front()) + " -> " + fmt(mf3.mean.back()) + ", others' max " +
                      fmt(max_other);
                 d += std::string(" [a ") + (a_ok ? "ok" : "FAIL") + ", b " + (b_ok ? "ok" : "FAIL") + ", c " +
                      (c_ok ? "ok" : "FAIL") + "]";
                 return Outcome{a_ok && b_ok && c_ok, d};
               }});

  c.push_back({10, "high local visibility count grows with gamma", 900, [] {
                 bool ok = true;
                 std::string d;
                 for (double alpha : {1.0, 2.0, 3.0}) {
                   std::size_t prev = 0;
                   d += (d.empty() ? "" : "; ") + std::string("a=") + fmt(alpha) + ":";
                   for (double gamma : {5.0, 10.0, 50.0}) {
                     const auto s =
                         experiment_spatial(ci_spec(Protocol::SpatialTopK, KernelSpec::spatial(gamma), alpha, 3030));
                     const std::size_t n = count_final_above(s, 0.2);
                     ok = ok && n >= prev;
                     prev = n;
                     d += " " + std::to_string(n);
                   }
                 }
                 return Outcome{ok, "counts over gamma 5,10,50 " + d};
               }});

  c.push_back({11, "sampler chi-square fit and drift", 30, [] {
                 Rng r({1100, 0});
                 double min_p = 1.0;
                 for (std::size_t size : {2u, 10u, 1000u}) {
                   std::vector<double> w(size);
                   for (auto& x : w) x = 0.05 + r.uniform() * 10.0;
                   const auto idx = WeightIndex::build(w);
                   std::vector<std::uint64_t> counts(size);
                   for (int n = 0; n < 100000; ++n) ++counts[idx.sample(r.uniform())];
                   min_p = std::min(min_p, oracle::chi_square_p(counts, w));
                 }
                 std::vector<double> w(1000);
                 for (auto& x : w) x = 1.0 + r.uniform();
                 auto idx = WeightIndex::build(w);
                 for (int m = 0; m < 1000000; ++m) {
                   const auto i = static_cast<std::size_t>(r.uniform() * w.size());
                   w[i] = 1e-3 + 1e3 * r.uniform();
                   idx.update(i, w[i]);
                 }
                 const double fold = compensated_total(std::span<const double>(w));
                 const double drift = std::abs(idx.total() - fold) / fold;
                 return Outcome{min_p > 0.001 && drift < 1e-9,
                                "min p-value " + fmt(min_p) + ", relative drift " + fmt(drift)};
               }});

  c.push_back({12, "CI experiments are byte-identical across runs and thread counts", 900, [] {
                 const fs::path root = fs::temp_directory_path() / "netvis_acceptance_12";
                 fs::remove_all(root);
                 bool ok = true;
                 std::string d;
                 struct Run {
                   std::string sub, model, file;
                 };
                 for (const Run& run : {Run{"exp-topk", "mf", "topk.csv"}, Run{"exp-inject", "gf", "inject.csv"}}) {
                   std::vector<std::string> blobs;
                   for (const char* threads : {"1", "1", "3"}) {
                     const fs::path out = root / (run.sub + "_" + threads + "_" + std::to_string(blobs.size()));
                     const std::string cmd = std::string("NETVIS_THREADS=") + threads + " '" + NETVIS_CLI_PATH + "' " +
                                             run.sub + " --model " + run.model +
                                             " --preset ci --seed 12 --out '" + out.string() + "' 2>/dev/null";
                     if (std::system(cmd.c_str()) != 0) return Outcome{false, "cli failed: " + cmd};
                     blobs.push_back(read_file(out / run.file));
                   }
                   const bool same = !blobs[0].empty() && blobs[0] == blobs[1] && blobs[0] == blobs[2];
                   ok = ok && same;
                   d += run.sub + " " + std::to_string(blobs[0].size()) + " bytes " + (same ? "identical" : "DIFFER") +
                        "; ";
                 }
                 // library path with a spatial run as well
                 auto s = ci_spec(Protocol::SpatialTopK, KernelSpec::spatial(10.0), 2.0, 12);
                 s.replicas = 3;
                 s.threads = 1;
                 const auto a = series_csv(series_rows(experiment_spatial(s), {"spatial-topk", "spatial", 2, 10}));
                 s.threads = 2;
                 const auto b = series_csv(series_rows(experiment_spatial(s), {"spatial-topk", "spatial", 2, 10}));
                 ok = ok && a == b;
                 d += std::string("spatial (R=3) ") + (a == b ? "identical" : "DIFFER");
                 fs::remove_all(root);
                 return Outcome{ok, d};
               }});

  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int a = 1; a < argc; ++a) only.insert(std::atoi(argv[a]));
  int failed = 0, ran = 0;
  for (const Criterion& c : criteria()) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = o.pass && in_budget;
    ++ran;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " | " << o.detail << " | "
              << fmt(secs) << " s (budget " << fmt(c.budget_s) << " s" << (in_budget ? "" : ", EXCEEDED") << ")"
              << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << ran - failed << "/" << ran << std::endl;
  return failed ? 1 : 0;
}
