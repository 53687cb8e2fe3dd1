#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "netvis/analytics.hpp"
#include "netvis/error.hpp"
#include "netvis/experiments.hpp"
#include "netvis/numeric.hpp"

namespace netvis {

// One row of the series CSV. rank_k = 0 denotes the injected node.
struct SeriesRow {
  std::string protocol;
  std::string model;
  double alpha_p = 0.0;
  double gamma = 0.0;
  std::size_t rank_k = 0;
  std::uint64_t t = 0;
  double mean_visibility = 0.0;
  double std_visibility = 0.0;
  std::size_t replicas = 0;
};

inline constexpr const char* kSeriesHeader =
    "protocol,model,alpha_p,gamma,rank_k,t,mean_visibility,std_visibility,replicas";
inline constexpr const char* kLemmaHeader =
    "lemma_id,t,node,analytic,lower,upper,enumerated,mc_mean,mc_stderr,verdict";

struct SeriesLabels {
  std::string protocol;
  std::string model;
  double alpha_p = 0.0;
  double gamma = 0.0;
};

inline std::vector<SeriesRow> series_rows(const TrackedSeries& s, const SeriesLabels& l) {
  std::vector<SeriesRow> rows;
  for (std::size_t k = 0; k < s.ranks.size(); ++k) {
    for (std::size_t ti = 0; ti < s.times.size(); ++ti) {
      rows.push_back({l.protocol, l.model, l.alpha_p, l.gamma, s.ranks[k], s.times[ti], s.mean[k][ti],
                      s.stddev[k][ti], s.replicas});
    }
  }
  return rows;
}

inline std::vector<SeriesRow> series_rows(const InjectedNodeSeries& s, const SeriesLabels& l) {
  std::vector<SeriesRow> rows;
  for (std::size_t ti = 0; ti < s.times.size(); ++ti) {
    rows.push_back({l.protocol, l.model, l.alpha_p, l.gamma, 0, s.times[ti], s.mean[ti], s.stddev[ti], s.replicas});
  }
  return rows;
}

// Header plus rows sorted by (rank_k, t); reals at 17 significant digits.
inline std::string series_csv(std::vector<SeriesRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SeriesRow& a, const SeriesRow& b) {
    return a.rank_k != b.rank_k ? a.rank_k < b.rank_k : a.t < b.t;
  });
  std::string out = kSeriesHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.protocol + ',' + r.model + ',' + digits17(r.alpha_p) + ',' + digits17(r.gamma) + ',' +
           std::to_string(r.rank_k) + ',' + std::to_string(r.t) + ',' + digits17(r.mean_visibility) + ',' +
           digits17(r.std_visibility) + ',' + std::to_string(r.replicas) + '\n';
  }
  return out;
}

namespace detail {

inline std::string opt_field(const std::optional<double>& x) { return x ? digits17(*x) : std::string(); }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace detail

// Absent values are empty fields.
inline std::string lemma_csv(const std::vector<LemmaReport>& reports) {
  std::string out = kLemmaHeader;
  out += '\n';
  for (const auto& r : reports) {
    out += r.lemma_id + ',' + std::to_string(r.t) + ',' + std::to_string(r.node) + ',' +
           detail::opt_field(r.analytic) + ',' + detail::opt_field(r.lower) + ',' + detail::opt_field(r.upper) +
           ',' + digits17(r.enumerated.expected) + ',' + detail::opt_field(r.mc_mean) + ',' +
           detail::opt_field(r.mc_stderr) + ',' + std::string(to_string(r.verdict)) + '\n';
  }
  return out;
}

inline void write_series_csv(const std::vector<SeriesRow>& rows, const std::filesystem::path& path) {
  detail::write_text(path, series_csv(rows));
}

inline void write_lemma_csv(const std::vector<LemmaReport>& reports, const std::filesystem::path& path) {
  detail::write_text(path, lemma_csv(reports));
}

}  // namespace netvis
