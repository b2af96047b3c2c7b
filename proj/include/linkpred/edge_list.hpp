#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "linkpred/graph.hpp"

namespace linkpred {

/// Parse failure with the 1-based line number of the offending record.
class EdgeListError : public std::runtime_error {
public:
  EdgeListError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_record(std::string_view s) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
    if (i > start) fields.push_back(s.substr(start, i - start));
  }
  return fields;
}

}  // namespace detail

/// Reads an edge list: one record per line, "nodeA nodeB [weight]", separated
/// by whitespace or commas. Lines starting with '#' are comments, blank lines
/// are skipped, a missing weight column defaults to 1.0. Node labels are
/// arbitrary strings; ids are assigned in order of first appearance.
///
/// Throws EdgeListError (with line number) on malformed records, nonpositive
/// weights, self-loops and duplicate unordered pairs.
inline WeightedGraph load_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<WeightedEdge> edges;
  std::unordered_set<std::uint64_t> seen;

  auto intern = [&](std::string_view label) -> NodeId {
    auto it = ids.find(std::string(label));
    if (it != ids.end()) return it->second;
    const NodeId id = static_cast<NodeId>(labels.size());
    labels.emplace_back(label);
    ids.emplace(labels.back(), id);
    return id;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = detail::split_record(line);
    if (fields.empty()) continue;
    if (fields[0].front() == '#') continue;
    if (fields.size() < 2 || fields.size() > 3)
      throw EdgeListError("expected 'nodeA nodeB [weight]', got " +
                              std::to_string(fields.size()) + " field(s)",
                          lineno);

    double weight = 1.0;
    if (fields.size() == 3) {
      const auto f = fields[2];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), weight);
      if (ec != std::errc{} || ptr != f.data() + f.size())
        throw EdgeListError("unparseable weight '" + std::string(f) + "'", lineno);
      if (!(weight > 0.0) || !std::isfinite(weight))
        throw EdgeListError("nonpositive weight '" + std::string(f) + "'", lineno);
    }

    const NodeId a = intern(fields[0]);
    const NodeId b = intern(fields[1]);
    if (a == b) throw EdgeListError("self-loop on node '" + std::string(fields[0]) + "'", lineno);
    if (!seen.insert(pack_pair(a, b)).second)
      throw EdgeListError("duplicate edge '" + std::string(fields[0]) + "' -- '" +
                              std::string(fields[1]) + "'",
                          lineno);
    const NodePair p = make_pair_of(a, b);
    edges.push_back({p.lo, p.hi, weight});
  }
  return WeightedGraph::from_edges(std::move(labels), std::move(edges));
}

inline WeightedGraph load_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_edge_list(in);
}

inline WeightedGraph load_edge_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path.string());
  return load_edge_list(in);
}

/// Writes the graph back as "labelA labelB weight" lines, canonical edge
/// order, weights in shortest round-trip form. Reloading yields an equal
/// graph.
inline void write_edge_list(const WeightedGraph& g, std::ostream& out) {
  char buf[32];
  for (const WeightedEdge& e : g.edges()) {
    const auto res = std::to_chars(buf, buf + sizeof buf, e.weight);
    out << g.label(e.u) << ' ' << g.label(e.v) << ' '
        << std::string_view(buf, res.ptr - buf) << '\n';
  }
}

inline std::string to_edge_list(const WeightedGraph& g) {
  std::ostringstream out;
  write_edge_list(g, out);
  return out.str();
}

}  // namespace linkpred
