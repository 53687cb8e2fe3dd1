#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "netvis/error.hpp"
#include "netvis/graph.hpp"
#include "netvis/numeric.hpp"

// Canonical snapshot text format, version 1:
//
//   netvis-snapshot 1
//   time <t>
//   nodes <n>
//   <id> <degree> <fitness> <x> <y>        (n lines, id = 0..n-1)
//   edges <m>                              (or "edges none" when no log is kept)
//   <child> <parent>                       (m lines)
//
// Reals are written with 17 significant digits, so load(save(g)) == g bit for
// bit. Lines end in '\n'; fields are separated by one space.

namespace netvis {

inline constexpr std::string_view kSnapshotMagic = "netvis-snapshot";
inline constexpr int kSnapshotVersion = 1;

inline std::string serialize_snapshot(const GraphState& g) {
  std::string out;
  out += std::string(kSnapshotMagic) + ' ' + std::to_string(kSnapshotVersion) + '\n';
  out += "time " + std::to_string(g.time) + '\n';
  out += "nodes " + std::to_string(g.size()) + '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    const NodeRecord& n = g.nodes[i];
    out += std::to_string(i) + ' ' + std::to_string(n.degree) + ' ' + digits17(n.fitness) + ' ' +
           digits17(n.location.x) + ' ' + digits17(n.location.y) + '\n';
  }
  if (g.edges) {
    out += "edges " + std::to_string(g.edges->size()) + '\n';
    for (const Edge& e : *g.edges) out += std::to_string(e.child) + ' ' + std::to_string(e.parent) + '\n';
  } else {
    out += "edges none\n";
  }
  return out;
}

namespace detail {

class SnapshotReader {
 public:
  explicit SnapshotReader(std::string_view text) : text_(text) {}

  std::string_view token() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n')) ++pos_;
    const std::size_t b = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\n') ++pos_;
    if (b == pos_) throw IoError("snapshot: unexpected end of input");
    return text_.substr(b, pos_ - b);
  }

  void expect(std::string_view word) {
    if (token() != word) throw IoError("snapshot: expected '" + std::string(word) + "'");
  }

  template <typename T>
  T number() {
    const auto tok = token();
    T x{};
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw IoError("snapshot: bad number '" + std::string(tok) + "'");
    }
    return x;
  }

  bool at_end() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n')) ++pos_;
    return pos_ == text_.size();
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GraphState parse_snapshot(std::string_view text) {
  detail::SnapshotReader rd(text);
  rd.expect(kSnapshotMagic);
  if (rd.number<int>() != kSnapshotVersion) throw IoError("snapshot: unsupported version");
  GraphState g;
  rd.expect("time");
  g.time = rd.number<std::uint64_t>();
  rd.expect("nodes");
  const auto n = rd.number<std::size_t>();
  g.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rd.number<std::size_t>() != i) throw IoError("snapshot: node ids must be 0..n-1 in order");
    NodeRecord& r = g.nodes[i];
    r.degree = rd.number<std::uint32_t>();
    r.fitness = rd.number<double>();
    r.location.x = rd.number<double>();
    r.location.y = rd.number<double>();
  }
  rd.expect("edges");
  const auto m = rd.token();
  if (m != "none") {
    std::size_t count = 0;
    auto res = std::from_chars(m.data(), m.data() + m.size(), count);
    if (res.ec != std::errc()) throw IoError("snapshot: bad edge count");
    g.edges.emplace();
    g.edges->reserve(count);
    for (std::size_t e = 0; e < count; ++e) {
      const auto child = rd.number<NodeId>();
      const auto parent = rd.number<NodeId>();
      g.edges->push_back({child, parent});
    }
  }
  if (!rd.at_end()) throw IoError("snapshot: trailing data");
  return g;
}

inline void save_snapshot(const GraphState& g, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << serialize_snapshot(g);
  f.flush();
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

inline GraphState load_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open snapshot '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_snapshot(ss.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace netvis
