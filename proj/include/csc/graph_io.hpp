#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "csc/error.hpp"
#include "csc/graph.hpp"

namespace csc {

// Edge-list text format
// ---------------------
// One edge per line: `src dst [weight]`, whitespace separated, 0-based node
// ids, weight defaulting to 1.0. Lines starting with '#' are comments, which
// makes SNAP listings readable as is. A comment of the form `# nodes N` fixes
// the node count (so trailing isolated nodes survive a round trip); otherwise
// the count is 1 + the largest id seen.

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::optional<std::size_t> parse_node_directive(std::string_view comment) {
  auto body = trim(comment.substr(1));
  auto toks = split_ws(body);
  std::size_t n = 0;
  if (toks.size() == 2 && toks[0] == "nodes" && parse_number(toks[1], n)) return n;
  return std::nullopt;
}

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline Graph read_edge_list(std::istream& in, BuildOptions options = {}) {
  std::vector<Edge> edges;
  std::optional<std::size_t> declared;
  std::size_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (auto n = detail::parse_node_directive(s)) declared = n;
      continue;
    }
    auto toks = detail::split_ws(s);
    if (toks.size() < 2 || toks.size() > 3)
      throw ParseError(lineno, "expected `src dst [weight]`, got '" + std::string(s) + "'");
    Edge e;
    if (!detail::parse_number(toks[0], e.src) || !detail::parse_number(toks[1], e.dst))
      throw ParseError(lineno, "node ids must be non-negative integers");
    if (toks.size() == 3 && !detail::parse_number(toks[2], e.weight))
      throw ParseError(lineno, "bad weight '" + std::string(toks[2]) + "'");
    max_id = std::max({max_id, e.src, e.dst});
    any = true;
    edges.push_back(e);
  }
  std::size_t n = any ? max_id + 1 : 0;
  if (declared) {
    if (any && *declared <= max_id)
      throw ValidationError("node id " + std::to_string(max_id) + " exceeds declared count " +
                            std::to_string(*declared));
    n = *declared;
  }
  return build_graph(n, edges, options);
}

inline Graph read_edge_list(const std::string& path, BuildOptions options = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_edge_list(in, options);
}

/// Writes each undirected edge once (src < dst) with a shortest round-trip
/// weight representation.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  out << "# nodes " << g.num_nodes() << '\n';
  for (const Edge& e : g.edges())
    out << e.src << ' ' << e.dst << ' ' << detail::format_double(e.weight) << '\n';
}

inline void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_edge_list(g, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// Labels as CSV `node_id,label` with a header row.
inline void write_labels_csv(std::span<const std::size_t> labels, std::ostream& out) {
  out << "node_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

inline void write_labels_csv(std::span<const std::size_t> labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_labels_csv(labels, out);
}

inline std::vector<std::size_t> read_labels_csv(std::istream& in) {
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (s.empty() || s.front() == '#' || (lineno == 1 && s.starts_with("node_id"))) continue;
    const auto comma = s.find(',');
    std::size_t id = 0, label = 0;
    if (comma == std::string_view::npos || !detail::parse_number(s.substr(0, comma), id) ||
        !detail::parse_number(detail::trim(s.substr(comma + 1)), label))
      throw ParseError(lineno, "expected `node_id,label`");
    rows.emplace_back(id, label);
  }
  std::vector<std::size_t> labels(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (auto [id, label] : rows) {
    if (id >= labels.size() || seen[id])
      throw ValidationError("labels file must list each node 0..N-1 exactly once");
    labels[id] = label;
    seen[id] = true;
  }
  return labels;
}

inline std::vector<std::size_t> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_labels_csv(in);
}

}  // namespace csc
