#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace linkpred {

using NodeId = std::uint32_t;

/// Unordered node pair in canonical form (lo < hi).
struct NodePair {
  NodeId lo = 0;
  NodeId hi = 0;

  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

inline NodePair make_pair_of(NodeId a, NodeId b) {
  return a < b ? NodePair{a, b} : NodePair{b, a};
}

inline std::uint64_t pack_pair(NodeId a, NodeId b) {
  const NodePair p = make_pair_of(a, b);
  return (static_cast<std::uint64_t>(p.lo) << 32) | p.hi;
}

/// Undirected edge in canonical form (u < v) with a positive weight.
struct WeightedEdge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;

  NodePair pair() const { return {u, v}; }
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

struct Neighbor {
  NodeId id;
  double weight;
};

/// Immutable undirected graph with strictly positive link weights.
///
/// Nodes are dense ids 0..n-1; the original string labels are retained for
/// reporting. Adjacency is CSR with per-node neighbor lists sorted by id.
/// No self-loops, no parallel edges. Node strengths (sum of incident
/// weights), the global maximum weight and a structural fingerprint are
/// computed at construction. Instances are safe for concurrent reads.
class WeightedGraph {
public:
  WeightedGraph() : labels_(std::make_shared<const std::vector<std::string>>()) {}

  /// Builds a graph from labels and canonical edges. Throws
  /// std::invalid_argument on self-loops, duplicate edges, nonpositive or
  /// non-finite weights, or ids outside 0..labels.size()-1.
  static WeightedGraph from_edges(std::vector<std::string> labels,
                                  std::vector<WeightedEdge> edges) {
    auto shared = std::make_shared<const std::vector<std::string>>(std::move(labels));
    auto ids = std::make_shared<std::unordered_map<std::string_view, NodeId>>();
    ids->reserve(shared->size());
    for (NodeId i = 0; i < shared->size(); ++i) {
      if (!ids->emplace((*shared)[i], i).second)
        throw std::invalid_argument("duplicate node label: " + (*shared)[i]);
    }
    return WeightedGraph(std::move(shared), std::move(ids), std::move(edges));
  }

  /// Graph with the same node set (labels shared, not copied) but a
  /// different edge set.
  WeightedGraph with_edges(std::vector<WeightedEdge> edges) const {
    return WeightedGraph(labels_, label_ids_, std::move(edges));
  }

  std::size_t node_count() const { return labels_->size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_node(NodeId v) const { return v < node_count(); }

  std::span<const Neighbor> neighbors(NodeId v) const {
    check_node(v);
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const {
    check_node(v);
    return offsets_[v + 1] - offsets_[v];
  }

  /// Sum of weights of incident edges; 0 for isolated nodes.
  double strength(NodeId v) const {
    check_node(v);
    return strengths_[v];
  }

  bool has_edge(NodeId a, NodeId b) const { return find_edge_weight(a, b).has_value(); }

  std::optional<double> find_edge_weight(NodeId a, NodeId b) const {
    check_node(a);
    check_node(b);
    auto nbrs = neighbors(a);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b,
                               [](const Neighbor& n, NodeId id) { return n.id < id; });
    if (it != nbrs.end() && it->id == b) return it->weight;
    return std::nullopt;
  }

  /// Edges in canonical (u,v) order.
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  /// Global maximum edge weight; 0 for an edgeless graph.
  double max_weight() const { return max_weight_; }

  const std::string& label(NodeId v) const {
    check_node(v);
    return (*labels_)[v];
  }

  std::optional<NodeId> find_node(std::string_view label) const {
    auto it = label_ids_->find(label);
    if (it == label_ids_->end()) return std::nullopt;
    return it->second;
  }

  std::shared_ptr<const std::vector<std::string>> labels() const { return labels_; }

  /// Structural hash over node count, edges and weight bit patterns. Used to
  /// tie score tables and fits back to the graph they were computed from.
  std::uint64_t fingerprint() const { return fingerprint_; }

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return *a.labels_ == *b.labels_ && a.edges_ == b.edges_;
  }

private:
  using LabelIds = std::unordered_map<std::string_view, NodeId>;

  WeightedGraph(std::shared_ptr<const std::vector<std::string>> labels,
                std::shared_ptr<const LabelIds> ids, std::vector<WeightedEdge> edges)
      : labels_(std::move(labels)), label_ids_(std::move(ids)), edges_(std::move(edges)) {
    const std::size_t n = labels_->size();
    for (auto& e : edges_) {
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.u >= n || e.v >= n) throw std::invalid_argument("edge references unknown node id");
      if (e.u == e.v) throw std::invalid_argument("self-loop on node " + (*labels_)[e.u]);
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw std::invalid_argument("nonpositive weight on edge " + (*labels_)[e.u] + " -- " +
                                    (*labels_)[e.v]);
    }
    std::sort(edges_.begin(), edges_.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return a.pair() < b.pair();
    });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i].pair() == edges_[i - 1].pair())
        throw std::invalid_argument("duplicate edge " + (*labels_)[edges_[i].u] + " -- " +
                                    (*labels_)[edges_[i].v]);
    }

    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[cursor[e.u]++] = {e.v, e.weight};
      adjacency_[cursor[e.v]++] = {e.u, e.weight};
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1],
                [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
    }

    strengths_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += adjacency_[k].weight;
      strengths_[i] = s;
    }
    for (const auto& e : edges_) max_weight_ = std::max(max_weight_, e.weight);

    // FNV-1a over the structure.
    std::uint64_t h = 1469598103934665603ull;
    auto fold = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    fold(n);
    fold(edges_.size());
    for (const auto& e : edges_) {
      fold((static_cast<std::uint64_t>(e.u) << 32) | e.v);
      std::uint64_t bits;
      static_assert(sizeof bits == sizeof e.weight);
      std::memcpy(&bits, &e.weight, sizeof bits);
      fold(bits);
    }
    fingerprint_ = h;
  }

  void check_node(NodeId v) const {
    if (!has_node(v)) throw std::out_of_range("unknown node id " + std::to_string(v));
  }

  std::shared_ptr<const std::vector<std::string>> labels_;
  std::shared_ptr<const LabelIds> label_ids_ = std::make_shared<LabelIds>();
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<double> strengths_;
  double max_weight_ = 0.0;
  std::uint64_t fingerprint_ = 0;
};

/// 2|E|/|V|. Throws on an empty graph.
inline double average_degree(const WeightedGraph& g) {
  if (g.node_count() == 0) throw std::invalid_argument("average_degree: empty graph");
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

/// Local clustering coefficient of v, unweighted or weighted variant.
/// Undefined (nullopt) when degree(v) < 2.
///
/// Both variants sum over ordered pairs (j,k), j != k, of neighbors of v.
/// Unweighted: fraction of those pairs that are themselves linked.
/// Weighted: sum of w_vj*w_jk*w_kv over linked pairs, divided by the global
/// maximum edge weight times sum of w_vj*w_vk over all pairs.
inline std::optional<double> local_clustering(const WeightedGraph& g, NodeId v, bool weighted) {
  const auto nbrs = g.neighbors(v);
  const std::size_t k = nbrs.size();
  if (k < 2) return std::nullopt;

  if (!weighted) {
    std::size_t linked = 0;  // ordered pairs
    for (const Neighbor& j : nbrs) {
      const auto jn = g.neighbors(j.id);
      std::size_t a = 0, b = 0;
      while (a < nbrs.size() && b < jn.size()) {
        if (nbrs[a].id < jn[b].id) {
          ++a;
        } else if (jn[b].id < nbrs[a].id) {
          ++b;
        } else {
          if (nbrs[a].id != j.id) ++linked;
          ++a;
          ++b;
        }
      }
    }
    return static_cast<double>(linked) / (static_cast<double>(k) * static_cast<double>(k - 1));
  }

  double numer = 0.0;
  for (const Neighbor& j : nbrs) {
    const auto jn = g.neighbors(j.id);
    std::size_t a = 0, b = 0;
    while (a < nbrs.size() && b < jn.size()) {
      if (nbrs[a].id < jn[b].id) {
        ++a;
      } else if (jn[b].id < nbrs[a].id) {
        ++b;
      } else {
        if (nbrs[a].id != j.id) numer += j.weight * jn[b].weight * nbrs[a].weight;
        ++a;
        ++b;
      }
    }
  }
  double sum = 0.0, sum_sq = 0.0;
  for (const Neighbor& j : nbrs) {
    sum += j.weight;
    sum_sq += j.weight * j.weight;
  }
  const double denom = g.max_weight() * (sum * sum - sum_sq);
  return numer / denom;
}

/// Mean local clustering over exactly the nodes of degree >= 2. Throws when
/// no node qualifies.
inline double network_clustering(const WeightedGraph& g, bool weighted) {
  double total = 0.0;
  std::size_t count = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (auto c = local_clustering(g, v, weighted)) {
      total += *c;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("network_clustering: no node has degree >= 2");
  return total / static_cast<double>(count);
}

/// New graph with the given edges removed; node set unchanged. Throws when
/// `removed` contains a pair that is not an edge (or a repeated pair).
inline WeightedGraph remove_edges(const WeightedGraph& g, std::span<const NodePair> removed) {
  std::vector<NodePair> sorted(removed.begin(), removed.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1])
      throw std::invalid_argument("remove_edges: pair listed twice");
  }
  for (const NodePair& p : sorted) {
    if (p.lo >= p.hi || !g.has_node(p.hi) || !g.has_edge(p.lo, p.hi))
      throw std::invalid_argument("remove_edges: not an edge of the graph");
  }
  std::vector<WeightedEdge> kept;
  kept.reserve(g.edge_count() - sorted.size());
  for (const WeightedEdge& e : g.edges()) {
    if (!std::binary_search(sorted.begin(), sorted.end(), e.pair())) kept.push_back(e);
  }
  return g.with_edges(std::move(kept));
}

}  // namespace linkpred
