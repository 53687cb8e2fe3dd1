#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netvis/error.hpp"
#include "netvis/experiments.hpp"
#include "netvis/kernels.hpp"
#include "netvis/numeric.hpp"

namespace netvis {

/// Everything a CLI run needs. Text form: optional `[section]` headers, then
/// one `key = value` per line, `#` comments. Sections only group keys.
///
///   [model]       model alpha_p gamma g_kernel
///   [run]         T0 T R record_every ranks seed
///   [visibility]  M grid_g
///   [lemmas]      epsilon mc_trials
///   [output]      out
///
/// `model` is required; `gamma` is required when model = spatial. Every other
/// key has a default, see RunConfig's member initializers.
struct RunConfig {
  std::string model;
  double alpha_p = 2.0;
  std::optional<double> gamma;
  std::string g_kernel = "quadratic";
  std::uint64_t T0 = 1000;
  std::uint64_t T = 10000;
  std::uint64_t R = 10;
  std::uint64_t record_every = 100;
  std::optional<std::vector<std::size_t>> ranks;  // absent: protocol default
  std::uint64_t seed = 1;
  std::uint64_t M = 1024;
  std::uint64_t grid_g = 32;
  double epsilon = 0.05;
  std::uint64_t mc_trials = 10000;
  std::string out = ".";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(std::string_view v, const std::string& key, std::size_t line) {
  double x = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ParseError(key, line, "expected a number, got '" + std::string(v) + "'");
  }
  return x;
}

inline std::uint64_t parse_uint(std::string_view v, const std::string& key, std::size_t line) {
  std::uint64_t x = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ParseError(key, line, "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return x;
}

// "1,5,10" or "1-50" or a mix: "1-10,30,50".
inline std::vector<std::size_t> parse_ranks(std::string_view v, const std::string& key, std::size_t line) {
  std::vector<std::size_t> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
    if (item.empty()) throw ParseError(key, line, "empty rank entry");
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      out.push_back(parse_uint(item, key, line));
    } else {
      const auto lo = parse_uint(trim(item.substr(0, dash)), key, line);
      const auto hi = parse_uint(trim(item.substr(dash + 1)), key, line);
      if (hi < lo) throw ParseError(key, line, "descending rank range");
      for (auto r = lo; r <= hi; ++r) out.push_back(r);
    }
  }
  if (out.empty()) throw ParseError(key, line, "no ranks given");
  for (auto r : out) {
    if (r < 1) throw ParseError(key, line, "ranks must be >= 1");
  }
  return out;
}

inline bool valid_g_kernel(std::string_view v) {
  if (v == "quadratic") return true;
  if (v.substr(0, 6) != "power:") return false;
  double p = 0.0;
  const auto num = v.substr(6);
  auto res = std::from_chars(num.data(), num.data() + num.size(), p);
  return res.ec == std::errc() && res.ptr == num.data() + num.size() && p > 0.0 && std::isfinite(p);
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
  using detail::trim;
  static const std::vector<std::string_view> sections{"model", "run", "visibility", "lemmas", "output"};
  RunConfig c;
  std::map<std::string, std::size_t> seen;  // key -> line
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("", line_no, "malformed section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (std::find(sections.begin(), sections.end(), name) == sections.end()) {
        throw ParseError("", line_no, "unknown section [" + std::string(name) + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("", line_no, "expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view val = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("", line_no, "missing key");
    if (seen.count(key)) throw ParseError(key, line_no, "duplicate key");
    seen[key] = line_no;
    const auto L = line_no;

    if (key == "model") {
      try {
        parse_kernel_kind(val);
      } catch (const ConfigError& e) {
        throw ParseError(key, L, e.what());
      }
      c.model = std::string(val);
    } else if (key == "alpha_p") {
      c.alpha_p = detail::parse_real(val, key, L);
      if (!(c.alpha_p > 0.0)) throw ParseError(key, L, "alpha_p must be > 0");
    } else if (key == "gamma") {
      c.gamma = detail::parse_real(val, key, L);
      if (!(*c.gamma >= 0.0)) throw ParseError(key, L, "gamma must be >= 0");
    } else if (key == "g_kernel") {
      if (!detail::valid_g_kernel(val)) throw ParseError(key, L, "expected 'quadratic' or 'power:<p>' with p > 0");
      c.g_kernel = std::string(val);
    } else if (key == "T0") {
      c.T0 = detail::parse_uint(val, key, L);
      if (c.T0 < 2) throw ParseError(key, L, "T0 must be >= 2");
    } else if (key == "T") {
      c.T = detail::parse_uint(val, key, L);
      if (c.T < 1) throw ParseError(key, L, "T must be >= 1");
    } else if (key == "R") {
      c.R = detail::parse_uint(val, key, L);
      if (c.R < 1) throw ParseError(key, L, "R must be >= 1");
    } else if (key == "record_every") {
      c.record_every = detail::parse_uint(val, key, L);
      if (c.record_every < 1) throw ParseError(key, L, "record_every must be >= 1");
    } else if (key == "ranks") {
      c.ranks = detail::parse_ranks(val, key, L);
    } else if (key == "seed") {
      c.seed = detail::parse_uint(val, key, L);
    } else if (key == "M") {
      c.M = detail::parse_uint(val, key, L);
      if (c.M < 1) throw ParseError(key, L, "M must be >= 1");
    } else if (key == "grid_g") {
      c.grid_g = detail::parse_uint(val, key, L);
      if (c.grid_g < 2) throw ParseError(key, L, "grid_g must be >= 2");
    } else if (key == "epsilon") {
      c.epsilon = detail::parse_real(val, key, L);
      if (!(c.epsilon > 0.0)) throw ParseError(key, L, "epsilon must be > 0");
    } else if (key == "mc_trials") {
      c.mc_trials = detail::parse_uint(val, key, L);
      if (c.mc_trials == 1) throw ParseError(key, L, "mc_trials must be 0 (off) or >= 2");
    } else if (key == "out") {
      if (val.empty()) throw ParseError(key, L, "empty output directory");
      c.out = std::string(val);
    } else {
      throw ParseError(key, L, "unknown key");
    }
  }

  auto line_of = [&](const char* k) { return seen.count(k) ? seen[k] : std::size_t{0}; };
  if (c.model.empty()) throw ParseError("model", 0, "missing required key");
  if (c.model == "spatial" && !c.gamma) throw ParseError("gamma", line_of("model"), "gamma required for spatial");
  if (c.T < c.T0) throw ParseError("T", line_of("T"), "T must be >= T0");
  if (c.ranks) {
    for (auto r : *c.ranks) {
      if (r > c.T0 + 1) throw ParseError("ranks", line_of("ranks"), "rank exceeds the node count at T0");
    }
  }
  return c;
}

inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[model]\n";
  os << "model = " << c.model << "\n";
  os << "alpha_p = " << shortest(c.alpha_p) << "\n";
  if (c.gamma) os << "gamma = " << shortest(*c.gamma) << "\n";
  os << "g_kernel = " << c.g_kernel << "\n";
  os << "\n[run]\n";
  os << "T0 = " << c.T0 << "\nT = " << c.T << "\nR = " << c.R << "\nrecord_every = " << c.record_every << "\n";
  if (c.ranks) {
    os << "ranks = ";
    for (std::size_t i = 0; i < c.ranks->size(); ++i) os << (i ? "," : "") << (*c.ranks)[i];
    os << "\n";
  }
  os << "seed = " << c.seed << "\n";
  os << "\n[visibility]\nM = " << c.M << "\ngrid_g = " << c.grid_g << "\n";
  os << "\n[lemmas]\nepsilon = " << shortest(c.epsilon) << "\nmc_trials = " << c.mc_trials << "\n";
  os << "\n[output]\nout = " << c.out << "\n";
  return os.str();
}

// Replaces (or adds) `key = value` lines of a config text. Later layers win:
// callers stack file, preset and flag overrides in that order.
inline std::string override_config(std::string_view text, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    std::string_view body = line.substr(0, line.find('#'));
    const auto eq = body.find('=');
    bool replaced = false;
    if (eq != std::string_view::npos) {
      const auto key = detail::trim(body.substr(0, eq));
      for (const auto& [k, v] : kv) replaced = replaced || (k == key);
    }
    out += replaced ? std::string("# overridden: ") + std::string(line) : std::string(line);
    out += '\n';
  }
  std::map<std::string, std::string> last;
  std::vector<std::string> order;
  for (const auto& [k, v] : kv) {
    if (!last.count(k)) order.push_back(k);
    last[k] = v;
  }
  for (const auto& k : order) out += k + " = " + last[k] + "\n";
  return out;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline KernelSpec kernel_from_config(const RunConfig& c) {
  switch (parse_kernel_kind(c.model)) {
    case KernelKind::BA: return KernelSpec::ba();
    case KernelKind::AdditiveFitness: return KernelSpec::af();
    case KernelKind::MultiplicativeFitness: return KernelSpec::mf();
    case KernelKind::GeneralFitness:
      if (c.g_kernel == "quadratic") return KernelSpec::gf();
      return KernelSpec::gf(power_attach(detail::parse_real(std::string_view(c.g_kernel).substr(6), "g_kernel", 0)));
    case KernelKind::Spatial:
      if (!c.gamma) throw ConfigError("gamma required for spatial");
      return KernelSpec::spatial(*c.gamma);
  }
  throw ConfigError("unknown model");
}

inline ExperimentSpec experiment_from_config(const RunConfig& c, Protocol protocol, unsigned threads = 0) {
  ExperimentSpec s;
  s.protocol = protocol;
  s.kernel = kernel_from_config(c);
  s.alpha_p = c.alpha_p;
  s.T0 = c.T0;
  s.T = c.T;
  s.replicas = c.R;
  s.ranks = c.ranks ? *c.ranks : (protocol == Protocol::SpatialTopK ? spatial_ranks() : top50_ranks());
  s.record_every = c.record_every;
  s.seed = c.seed;
  s.threads = threads;
  return s;
}

}  // namespace netvis
