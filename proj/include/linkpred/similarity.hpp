#pragma once

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

#include "linkpred/graph.hpp"

namespace linkpred {

/// The nine local similarity indices.
///
/// CN/AA/RA are the unweighted classics. WCN/WAA/WRA weight each common
/// neighbor by the SUM of the two link weights. rWCN/rWAA/rWRA value the
/// two-hop route by the PRODUCT of its link weights, the way a most-reliable
/// route is valued when weights are link reliabilities.
enum class IndexKind : std::uint8_t { CN, AA, RA, WCN, WAA, WRA, rWCN, rWAA, rWRA };

inline constexpr std::array<IndexKind, 9> kAllIndexKinds = {
    IndexKind::CN,   IndexKind::AA,   IndexKind::RA,
    IndexKind::WCN,  IndexKind::WAA,  IndexKind::WRA,
    IndexKind::rWCN, IndexKind::rWAA, IndexKind::rWRA,
};

inline std::string_view to_string(IndexKind k) {
  switch (k) {
    case IndexKind::CN: return "CN";
    case IndexKind::AA: return "AA";
    case IndexKind::RA: return "RA";
    case IndexKind::WCN: return "WCN";
    case IndexKind::WAA: return "WAA";
    case IndexKind::WRA: return "WRA";
    case IndexKind::rWCN: return "rWCN";
    case IndexKind::rWAA: return "rWAA";
    case IndexKind::rWRA: return "rWRA";
  }
  return "?";
}

inline std::optional<IndexKind> index_kind_from(std::string_view name) {
  for (IndexKind k : kAllIndexKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

/// True for the six indices whose scores depend on link weights.
inline constexpr bool uses_weights(IndexKind k) {
  return k != IndexKind::CN && k != IndexKind::AA && k != IndexKind::RA;
}

/// True for the reliable-route (product) family.
inline constexpr bool reliable_route(IndexKind k) {
  return k == IndexKind::rWCN || k == IndexKind::rWAA || k == IndexKind::rWRA;
}

/// Maps a positive weight into (0,1): w' = exp(-1/w). Bijective, so the
/// original weight is recoverable (see unregularize_weight). Throws
/// std::domain_error on nonpositive input and on inputs so extreme that the
/// result would leave (0,1) in double precision.
inline double regularize_weight(double w) {
  if (!(w > 0.0) || !std::isfinite(w))
    throw std::domain_error("regularize_weight: weight must be positive");
  const double wp = std::exp(-1.0 / w);
  if (wp <= 0.0) throw std::domain_error("regularize_weight: weight too small, maps to 0");
  if (wp >= 1.0) throw std::domain_error("regularize_weight: weight too large, maps to 1");
  return wp;
}

/// Inverse of regularize_weight: w = -1/ln(w'). Throws std::domain_error
/// unless 0 < w' < 1.
inline double unregularize_weight(double wp) {
  if (!(wp > 0.0) || !(wp < 1.0))
    throw std::domain_error("unregularize_weight: value must lie in (0,1)");
  return -1.0 / std::log(wp);
}

/// Graph with every weight mapped through regularize_weight; topology and
/// node set unchanged.
inline WeightedGraph regularize_weights(const WeightedGraph& g) {
  std::vector<WeightedEdge> edges = g.edges();
  for (WeightedEdge& e : edges) e.weight = regularize_weight(e.weight);
  return g.with_edges(std::move(edges));
}

namespace detail {

/// Per-common-neighbor contribution of index `kind` for the pair (x,y).
/// `z` is the common neighbor, wxz/wyz the weights of the two links.
inline double index_contribution(const WeightedGraph& g, IndexKind kind, NodeId z, double wxz,
                                 double wyz) {
  switch (kind) {
    case IndexKind::CN: return 1.0;
    case IndexKind::AA: return 1.0 / std::log(static_cast<double>(g.degree(z)));
    case IndexKind::RA: return 1.0 / static_cast<double>(g.degree(z));
    case IndexKind::WCN: return wxz + wyz;
    case IndexKind::WAA: return (wxz + wyz) / std::log(1.0 + g.strength(z));
    case IndexKind::WRA: return (wxz + wyz) / g.strength(z);
    case IndexKind::rWCN: return wxz * wyz;
    case IndexKind::rWAA: return (wxz * wyz) / std::log(1.0 + g.strength(z));
    case IndexKind::rWRA: return (wxz * wyz) / g.strength(z);
  }
  return 0.0;
}

}  // namespace detail

/// Similarity score of one pair under one index: the sum over common
/// neighbors z of the per-index contribution; 0 when the pair shares no
/// neighbor. The pair may be an edge (diagnostic use); score_all excludes
/// edges. Throws on x == y or unknown nodes.
inline double score_pair(const WeightedGraph& g, IndexKind kind, NodeId x, NodeId y) {
  if (x == y) throw std::invalid_argument("score_pair: x == y");
  const auto nx = g.neighbors(x);
  const auto ny = g.neighbors(y);
  double score = 0.0;
  std::size_t a = 0, b = 0;
  while (a < nx.size() && b < ny.size()) {
    if (nx[a].id < ny[b].id) {
      ++a;
    } else if (ny[b].id < nx[a].id) {
      ++b;
    } else {
      score += detail::index_contribution(g, kind, nx[a].id, nx[a].weight, ny[b].weight);
      ++a;
      ++b;
    }
  }
  return score;
}

namespace detail {

/// Reusable per-worker scratch for the wedge scan. Epoch stamps avoid
/// clearing the O(n) arrays between source nodes.
struct WedgeScratch {
  std::vector<std::uint32_t> nbr_epoch;
  std::vector<double> nbr_weight;
  std::vector<std::uint32_t> seen_epoch;
  std::vector<double> acc;
  std::vector<NodeId> found;
  std::uint32_t epoch = 0;

  explicit WedgeScratch(std::size_t n)
      : nbr_epoch(n, 0), nbr_weight(n, 0.0), seen_epoch(n, 0), acc(n, 0.0) {}

  void next_epoch() {
    if (++epoch == 0) {  // wrapped: reset stamps once
      std::fill(nbr_epoch.begin(), nbr_epoch.end(), 0);
      std::fill(seen_epoch.begin(), seen_epoch.end(), 0);
      epoch = 1;
    }
    found.clear();
  }
};

/// Scans all length-2 routes u-z-v with v > u and v not adjacent to u,
/// accumulating f(z, w_uz, w_zv) into per-v sums. Calls emit(v, sum) in
/// ascending v order. The z iteration follows u's sorted neighbor list, so
/// sums are reproducible bit for bit regardless of how sources are
/// distributed over workers.
template <class Contribution, class Emit>
void scan_wedges_from(const WeightedGraph& g, NodeId u, WedgeScratch& s, Contribution&& f,
                      Emit&& emit) {
  s.next_epoch();
  const auto nbrs = g.neighbors(u);
  for (const Neighbor& n : nbrs) {
    s.nbr_epoch[n.id] = s.epoch;
    s.nbr_weight[n.id] = n.weight;
  }
  for (const Neighbor& zn : nbrs) {
    const NodeId z = zn.id;
    const double wuz = zn.weight;
    for (const Neighbor& vn : g.neighbors(z)) {
      const NodeId v = vn.id;
      if (v <= u || s.nbr_epoch[v] == s.epoch) continue;
      if (s.seen_epoch[v] != s.epoch) {
        s.seen_epoch[v] = s.epoch;
        s.acc[v] = 0.0;
        s.found.push_back(v);
      }
      s.acc[v] += f(z, wuz, vn.weight);
    }
  }
  std::sort(s.found.begin(), s.found.end());
  for (NodeId v : s.found) emit(v, s.acc[v]);
}

}  // namespace detail

/// Calls f(lo, hi) for every unordered non-adjacent pair at graph distance 2
/// (the pairs sharing at least one common neighbor), each exactly once, in
/// ascending (lo, hi) order. Every index in IndexKind is zero outside this
/// set.
template <class F>
void for_each_candidate_pair(const WeightedGraph& g, F&& f) {
  detail::WedgeScratch scratch(g.node_count());
  auto one = [](NodeId, double, double) { return 1.0; };
  for (NodeId u = 0; u < g.node_count(); ++u) {
    detail::scan_wedges_from(g, u, scratch, one,
                             [&](NodeId v, double) { f(u, v); });
  }
}

inline std::vector<NodePair> candidate_pairs(const WeightedGraph& g) {
  std::vector<NodePair> pairs;
  for_each_candidate_pair(g, [&](NodeId lo, NodeId hi) { pairs.push_back({lo, hi}); });
  return pairs;
}

/// Sparse map from candidate pairs to positive similarity scores, tied to the
/// graph it was computed from by fingerprint. Entries are kept in canonical
/// (lo,hi) order; adjacent pairs of the source graph and self-pairs never
/// appear, and zero scores are omitted.
class ScoreTable {
public:
  struct Entry {
    NodeId lo;
    NodeId hi;
    double score;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  ScoreTable() = default;

  /// Assembles a table from raw entries (they are sorted if needed).
  /// Validates pair canonicality and score positivity; staying off the source
  /// graph's edge set is the producer's responsibility.
  static ScoreTable from_entries(IndexKind kind, std::uint64_t source_fingerprint,
                                 std::shared_ptr<const std::vector<std::string>> labels,
                                 std::vector<Entry> entries) {
    ScoreTable t;
    t.kind_ = kind;
    t.fingerprint_ = source_fingerprint;
    t.labels_ = std::move(labels);
    t.entries_ = std::move(entries);
    if (!std::is_sorted(t.entries_.begin(), t.entries_.end(),
                        [](const Entry& a, const Entry& b) {
                          return NodePair{a.lo, a.hi} < NodePair{b.lo, b.hi};
                        })) {
      std::sort(t.entries_.begin(), t.entries_.end(), [](const Entry& a, const Entry& b) {
        return NodePair{a.lo, a.hi} < NodePair{b.lo, b.hi};
      });
    }
    const std::size_t n = t.labels_ ? t.labels_->size() : 0;
    for (std::size_t i = 0; i < t.entries_.size(); ++i) {
      const Entry& e = t.entries_[i];
      if (e.lo >= e.hi || e.hi >= n)
        throw std::invalid_argument("ScoreTable: entry is not a canonical node pair");
      if (!(e.score > 0.0)) throw std::invalid_argument("ScoreTable: nonpositive score");
      if (i > 0 && NodePair{e.lo, e.hi} == NodePair{t.entries_[i - 1].lo, t.entries_[i - 1].hi})
        throw std::invalid_argument("ScoreTable: duplicate pair");
      t.max_score_ = std::max(t.max_score_, e.score);
    }
    return t;
  }

  IndexKind kind() const { return kind_; }
  std::uint64_t source_fingerprint() const { return fingerprint_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Score of a pair; 0 when absent (absent pairs are implicitly zero).
  double score_of(NodeId a, NodeId b) const {
    const NodePair p = make_pair_of(a, b);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                               [](const Entry& e, const NodePair& q) {
                                 return NodePair{e.lo, e.hi} < q;
                               });
    if (it != entries_.end() && NodePair{it->lo, it->hi} == p) return it->score;
    return 0.0;
  }

  /// Maximum score in the table (M_ST); 0 when empty.
  double max_score() const { return max_score_; }

  const std::string& label(NodeId v) const { return (*labels_)[v]; }

  /// The pair's labels, lexicographically smaller one first.
  std::pair<std::string_view, std::string_view> pair_labels(const Entry& e) const {
    std::string_view a = (*labels_)[e.lo];
    std::string_view b = (*labels_)[e.hi];
    if (b < a) std::swap(a, b);
    return {a, b};
  }

  /// Entry indices ranked by descending score; ties broken by lexicographic
  /// pair label, so the ranking is independent of input order.
  std::vector<std::size_t> ranking() const {
    std::vector<std::size_t> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [this](std::size_t i, std::size_t j) {
      const Entry& a = entries_[i];
      const Entry& b = entries_[j];
      if (a.score != b.score) return a.score > b.score;
      return pair_labels(a) < pair_labels(b);
    });
    return order;
  }

  /// Text export: "labelA labelB score", descending score, ties by
  /// lexicographic pair label.
  void write_text(std::ostream& out) const {
    char buf[32];
    for (std::size_t i : ranking()) {
      const Entry& e = entries_[i];
      const auto [a, b] = pair_labels(e);
      const auto res = std::to_chars(buf, buf + sizeof buf, e.score);
      out << a << ' ' << b << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  }

private:
  IndexKind kind_ = IndexKind::CN;
  std::uint64_t fingerprint_ = 0;
  std::shared_ptr<const std::vector<std::string>> labels_;
  std::vector<Entry> entries_;
  double max_score_ = 0.0;
};

struct ScoreOptions {
  unsigned workers = 1;
};

namespace detail {

template <IndexKind K>
void score_block(const WeightedGraph& g, NodeId begin, NodeId end, WedgeScratch& scratch,
                 std::vector<ScoreTable::Entry>& out) {
  auto contrib = [&g](NodeId z, double wuz, double wzv) {
    return index_contribution(g, K, z, wuz, wzv);
  };
  for (NodeId u = begin; u < end; ++u) {
    scan_wedges_from(g, u, scratch, contrib, [&](NodeId v, double score) {
      if (score > 0.0) out.push_back({u, v, score});  // guards underflown products
    });
  }
}

inline void score_block_dispatch(const WeightedGraph& g, IndexKind kind, NodeId begin,
                                 NodeId end, WedgeScratch& scratch,
                                 std::vector<ScoreTable::Entry>& out) {
  switch (kind) {
    case IndexKind::CN: return score_block<IndexKind::CN>(g, begin, end, scratch, out);
    case IndexKind::AA: return score_block<IndexKind::AA>(g, begin, end, scratch, out);
    case IndexKind::RA: return score_block<IndexKind::RA>(g, begin, end, scratch, out);
    case IndexKind::WCN: return score_block<IndexKind::WCN>(g, begin, end, scratch, out);
    case IndexKind::WAA: return score_block<IndexKind::WAA>(g, begin, end, scratch, out);
    case IndexKind::WRA: return score_block<IndexKind::WRA>(g, begin, end, scratch, out);
    case IndexKind::rWCN: return score_block<IndexKind::rWCN>(g, begin, end, scratch, out);
    case IndexKind::rWAA: return score_block<IndexKind::rWAA>(g, begin, end, scratch, out);
    case IndexKind::rWRA: return score_block<IndexKind::rWRA>(g, begin, end, scratch, out);
  }
}

}  // namespace detail

/// Scores every candidate pair (distance-2 non-edge) of g under one index.
/// Work is partitioned into fixed node blocks claimed by workers and merged
/// in block order, so the result is identical for any worker count.
inline ScoreTable score_all(const WeightedGraph& g, IndexKind kind, ScoreOptions opts = {}) {
  const std::size_t n = g.node_count();
  const unsigned workers = std::max(1u, opts.workers);
  constexpr std::size_t kBlock = 512;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<ScoreTable::Entry>> block_entries(blocks);

  auto run = [&](std::size_t block) {
    const NodeId begin = static_cast<NodeId>(block * kBlock);
    const NodeId end = static_cast<NodeId>(std::min(n, (block + 1) * kBlock));
    thread_local std::unique_ptr<detail::WedgeScratch> scratch;
    if (!scratch || scratch->nbr_epoch.size() < n)
      scratch = std::make_unique<detail::WedgeScratch>(n);
    detail::score_block_dispatch(g, kind, begin, end, *scratch, block_entries[block]);
  };

  if (workers == 1 || blocks <= 1) {
    detail::WedgeScratch scratch(n);
    for (std::size_t b = 0; b < blocks; ++b) {
      const NodeId begin = static_cast<NodeId>(b * kBlock);
      const NodeId end = static_cast<NodeId>(std::min(n, (b + 1) * kBlock));
      detail::score_block_dispatch(g, kind, begin, end, scratch, block_entries[b]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t b = next.fetch_add(1);
          if (b >= blocks) break;
          run(b);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::size_t total = 0;
  for (const auto& v : block_entries) total += v.size();
  std::vector<ScoreTable::Entry> entries;
  entries.reserve(total);
  for (auto& v : block_entries) entries.insert(entries.end(), v.begin(), v.end());
  return ScoreTable::from_entries(kind, g.fingerprint(), g.labels(), std::move(entries));
}

}  // namespace linkpred
