#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "linkpred/graph.hpp"
#include "linkpred/rng.hpp"

namespace testutil {

/// Random simple graph with m distinct edges over n nodes labeled v0..v{n-1}
/// (note: label order is lexicographic, not numeric). Weights are uniform in
/// (0, max_weight], or exactly 1 when unit_weights is set.
inline linkpred::WeightedGraph random_graph(std::size_t n, std::size_t m, std::uint64_t seed,
                                            double max_weight = 5.0,
                                            bool unit_weights = false) {
  if (m > n * (n - 1) / 2) throw std::invalid_argument("random_graph: too many edges");
  linkpred::Rng rng(seed);
  std::unordered_set<std::uint64_t> used;
  std::vector<linkpred::WeightedEdge> edges;
  edges.reserve(m);
  while (edges.size() < m) {
    const auto u = static_cast<linkpred::NodeId>(rng.below(n));
    const auto v = static_cast<linkpred::NodeId>(rng.below(n));
    if (u == v) continue;
    if (!used.insert(linkpred::pack_pair(u, v)).second) continue;
    const double w = unit_weights ? 1.0 : max_weight * (1.0 - rng.unit());
    edges.push_back({u, v, w});
  }
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = "v" + std::to_string(i);
  return linkpred::WeightedGraph::from_edges(std::move(labels), std::move(edges));
}

}  // namespace testutil
