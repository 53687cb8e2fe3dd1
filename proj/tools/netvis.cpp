// netvis: command-line front end for growth runs, experiments and lemma checks.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netvis.hpp"

namespace fs = std::filesystem;
using namespace netvis;

namespace {

struct SharedFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string preset;
  std::vector<std::string> sets;
};

RunConfig resolve_config(const SharedFlags& f, const std::string& default_model) {
  std::string text;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + f.config_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  std::vector<std::pair<std::string, std::string>> kv;
  if (!default_model.empty()) kv.emplace_back("model", default_model);
  if (!f.preset.empty()) {
    const Scale s = f.preset == "paper" ? kPaperScale : kCiScale;
    kv.emplace_back("T0", std::to_string(s.T0));
    kv.emplace_back("T", std::to_string(s.T));
    kv.emplace_back("R", std::to_string(s.replicas));
  }
  if (f.seed) kv.emplace_back("seed", std::to_string(*f.seed));
  if (!f.out.empty()) kv.emplace_back("out", f.out);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    kv.emplace_back(std::string(detail::trim(s.substr(0, eq))), std::string(detail::trim(s.substr(eq + 1))));
  }
  try {
    return parse_config(override_config(text, kv));
  } catch (const ParseError& e) {
    if (!f.config_path.empty()) throw ParseError(e.key(), e.line(), f.config_path + ": " + e.what());
    throw;
  }
}

fs::path output_dir(const RunConfig& c) {
  fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

SeriesLabels labels_for(const RunConfig& c, Protocol p) {
  return {std::string(to_string(p)), c.model, c.alpha_p, c.gamma.value_or(0.0)};
}

void write_config_echo(const RunConfig& c, const fs::path& dir) {
  std::ofstream f(dir / "run.cfg", std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + (dir / "run.cfg").string() + "'");
  f << serialize_config(c);
}

int cmd_grow(const RunConfig& c) {
  const KernelSpec kernel = kernel_from_config(c);
  const FitnessDistribution fit = FitnessDistribution::pareto(c.alpha_p);
  const Trajectory traj = run_growth(kernel, fit, c.T, base_stream(c.seed), c.record_every, true);
  const std::vector<std::size_t> ranks = c.ranks ? *c.ranks : top50_ranks();

  std::vector<SeriesRow> rows;
  for (const VisibilityVector& v : traj.snapshots) {
    std::vector<double> sorted = v.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::size_t k : ranks) {
      if (k > sorted.size()) continue;
      rows.push_back({"grow", c.model, c.alpha_p, c.gamma.value_or(0.0), k, v.time, sorted[k - 1], 0.0, 1});
    }
  }
  const fs::path dir = output_dir(c);
  write_config_echo(c, dir);
  write_series_csv(rows, dir / "grow.csv");
  save_snapshot(traj.final_state, dir / "snapshot.txt");
  std::cerr << "grow: t=" << traj.final_state.time << " nodes=" << traj.final_state.size() << " -> " << dir.string()
            << "\n";
  return 0;
}

int cmd_experiment(const RunConfig& c, Protocol p) {
  const ExperimentSpec spec = experiment_from_config(c, p);
  spec.validate();
  std::vector<SeriesRow> rows;
  if (p == Protocol::Inject) {
    rows = series_rows(experiment_inject(spec), labels_for(c, p));
  } else if (p == Protocol::TopK) {
    rows = series_rows(experiment_topk(spec), labels_for(c, p));
  } else {
    rows = series_rows(experiment_spatial(spec), labels_for(c, p));
  }
  const fs::path dir = output_dir(c);
  write_config_echo(c, dir);
  const fs::path file = dir / (std::string(to_string(p)) + ".csv");
  write_series_csv(rows, file);
  std::cerr << to_string(p) << ": " << rows.size() << " rows -> " << file.string() << "\n";
  return 0;
}

// Grows R graphs to T and checks the one-step lemma at each rank-selected node.
int cmd_verify(const RunConfig& c) {
  const KernelSpec kernel = kernel_from_config(c);
  const FitnessDistribution fit = FitnessDistribution::pareto(c.alpha_p);
  const std::vector<std::size_t> ranks = c.ranks ? *c.ranks : std::vector<std::size_t>{1, 2, 5, 10};
  TolerancePolicy policy;
  policy.mc_trials = c.mc_trials;

  auto per_graph = parallel_map(c.R, default_threads(), [&](std::size_t r) {
    Rng rng(replica_stream(c.seed, r));
    GraphState g = new_seed_graph(kernel, fit, rng);
    GrowthProcess proc(std::move(g), kernel, fit, rng);
    proc.grow_to(c.T);
    Rng probe(RngStream{c.seed ^ 0x6c656d6d61ULL, r + 1});
    const GraphState& s = proc.state();
    const auto order = detail::rank_order(snapshot_visibility(s, kernel).values);
    std::vector<LemmaReport> reports;
    for (std::size_t k : ranks) {
      if (k > order.size()) throw ConfigError("rank " + std::to_string(k) + " exceeds the node count at T");
      const double xi_t = fit.draw(probe.uniform_open_low());
      std::optional<Point> chi;
      if (kernel.is_spatial()) chi = s[order[k - 1]].location;
      reports.push_back(verify_lemma(s, order[k - 1], kernel, xi_t, chi, c.epsilon, policy, probe));
    }
    return reports;
  });

  std::vector<LemmaReport> all;
  std::size_t fails = 0;
  for (auto& v : per_graph) {
    for (auto& rep : v) {
      fails += rep.verdict == Verdict::Fail;
      all.push_back(std::move(rep));
    }
  }
  const fs::path dir = output_dir(c);
  write_config_echo(c, dir);
  write_lemma_csv(all, dir / "lemmas.csv");
  std::cerr << "verify-lemmas: " << all.size() << " reports, " << fails << " fail -> " << (dir / "lemmas.csv").string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netvis: visibility in growing networks"};
  app.require_subcommand(1);
  SharedFlags flags;
  std::string model;

  std::vector<std::pair<CLI::App*, std::string>> subs{
      {app.add_subcommand("grow", "single trajectory, per-rank visibility CSV and final snapshot"), "grow"},
      {app.add_subcommand("exp-topk", "top-k tracking experiment"), "exp-topk"},
      {app.add_subcommand("exp-inject", "injected high-fitness node experiment"), "exp-inject"},
      {app.add_subcommand("exp-spatial", "spatial top-k local visibility experiment"), "exp-spatial"},
      {app.add_subcommand("verify-lemmas", "one-step expected change checks, lemma CSV"), "verify-lemmas"},
  };
  for (auto& [sub, name] : subs) {
    sub->add_option("--config", flags.config_path, "config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--preset", flags.preset, "scale preset")->check(CLI::IsMember({"paper", "ci"}));
    sub->add_option("--model", model, "model when no config is given")
        ->check(CLI::IsMember({"ba", "af", "mf", "gf", "spatial"}));
    sub->add_option("--set", flags.sets, "config override key=value (repeatable)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig c = resolve_config(flags, model);
    if (app.got_subcommand("grow")) return cmd_grow(c);
    if (app.got_subcommand("exp-topk")) return cmd_experiment(c, Protocol::TopK);
    if (app.got_subcommand("exp-inject")) return cmd_experiment(c, Protocol::Inject);
    if (app.got_subcommand("exp-spatial")) return cmd_experiment(c, Protocol::SpatialTopK);
    if (app.got_subcommand("verify-lemmas")) return cmd_verify(c);
  } catch (const Error& e) {
    std::cerr << "netvis: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "netvis: internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
