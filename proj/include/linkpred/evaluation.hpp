#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "linkpred/graph.hpp"
#include "linkpred/rng.hpp"
#include "linkpred/similarity.hpp"

namespace linkpred {

/// One train/probe partition of a graph's edge set. The train graph keeps the
/// full node set (including nodes isolated by the removal); test_edges carry
/// the held-out weights and are in canonical order.
struct SplitResult {
  WeightedGraph train;
  std::vector<WeightedEdge> test_edges;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
};

/// Removes a uniform random fraction of edges as the probe set. The probe
/// count is round(test_fraction * m), required to leave both sides nonempty.
/// Identical seeds give identical splits on any platform.
inline SplitResult split_edges(const WeightedGraph& g, double test_fraction,
                               std::uint64_t seed) {
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
    throw std::invalid_argument("split_edges: test_fraction must lie in (0,1)");
  const std::size_t m = g.edge_count();
  const std::size_t k =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(m)));
  if (k == 0) throw std::invalid_argument("split_edges: probe set would be empty");
  if (k >= m) throw std::invalid_argument("split_edges: train set would be empty");

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  Rng rng(seed);
  // Partial Fisher-Yates: the first k slots become the probe set.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
    std::swap(order[i], order[j]);
  }

  const std::vector<WeightedEdge>& edges = g.edges();
  std::vector<bool> held(m, false);
  SplitResult out;
  out.seed = seed;
  out.test_fraction = test_fraction;
  out.test_edges.reserve(k);
  for (std::size_t i = 0; i < k; ++i) held[order[i]] = true;
  std::vector<WeightedEdge> train_edges;
  train_edges.reserve(m - k);
  for (std::size_t i = 0; i < m; ++i)
    (held[i] ? out.test_edges : train_edges).push_back(edges[i]);
  out.train = g.with_edges(std::move(train_edges));
  return out;
}

enum class TieBreak : std::uint8_t { Lexicographic, SeededShuffle };

/// Fraction of the top-L ranked candidate pairs that are probe links.
/// L defaults to the probe count. Score ties are broken lexicographically by
/// label pair (or by a seeded shuffle). A table shorter than L counts the
/// missing tail as misses.
inline double precision_at(const ScoreTable& table, std::span<const NodePair> test_pairs,
                           std::size_t top_l, TieBreak tiebreak = TieBreak::Lexicographic,
                           std::uint64_t seed = 0) {
  if (top_l == 0) throw std::invalid_argument("precision_at: L must be positive");

  std::vector<std::size_t> order;
  if (tiebreak == TieBreak::Lexicographic) {
    order = table.ranking();
  } else {
    order.resize(table.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    shuffle(order, rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return table.entries()[i].score > table.entries()[j].score;
    });
  }

  std::vector<NodePair> test_sorted(test_pairs.begin(), test_pairs.end());
  std::sort(test_sorted.begin(), test_sorted.end());

  const std::size_t take = std::min(top_l, order.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < take; ++i) {
    const auto& e = table.entries()[order[i]];
    if (std::binary_search(test_sorted.begin(), test_sorted.end(), NodePair{e.lo, e.hi}))
      ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(top_l);
}

/// Which pairs enter the lambda objective's denominator: every scored
/// candidate pair, or only the probe pairs.
enum class LambdaSupport : std::uint8_t { Full, TestOnly };

struct LambdaFit {
  double lambda = 0.0;
  double upper_bound = 0.0;  // M_V / M_ST
  bool clamped = false;
  double residual_norm = 0.0;  // Frobenius norm of lambda*S - W over the support
  LambdaSupport support = LambdaSupport::Full;
  std::uint64_t source_fingerprint = 0;
};

/// Least-squares scale from similarity scores to observed probe weights:
/// minimizes the Frobenius norm of lambda*S - W subject to
/// 0 < lambda <= max probe weight / max score. W is zero off the probe set.
/// The unconstrained optimum sum(S*W)/sum(S^2) is clamped into the feasible
/// interval; a nonpositive optimum is replaced by the smallest positive
/// normal double (and reported as clamped).
inline LambdaFit fit_lambda(const ScoreTable& scores, std::span<const WeightedEdge> test_edges,
                            LambdaSupport support = LambdaSupport::Full) {
  if (scores.empty()) throw std::invalid_argument("fit_lambda: empty score table");
  if (test_edges.empty()) throw std::invalid_argument("fit_lambda: empty probe set");

  std::vector<WeightedEdge> test(test_edges.begin(), test_edges.end());
  std::sort(test.begin(), test.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return make_pair_of(a.u, a.v) < make_pair_of(b.u, b.v);
  });
  double max_w = 0.0;
  for (const WeightedEdge& e : test) {
    if (!(e.weight > 0.0)) throw std::invalid_argument("fit_lambda: nonpositive probe weight");
    max_w = std::max(max_w, e.weight);
  }

  auto test_weight = [&](NodeId lo, NodeId hi) -> double {
    auto it = std::lower_bound(test.begin(), test.end(), NodePair{lo, hi},
                               [](const WeightedEdge& e, const NodePair& p) {
                                 return make_pair_of(e.u, e.v) < p;
                               });
    if (it != test.end() && make_pair_of(it->u, it->v) == NodePair{lo, hi}) return it->weight;
    return 0.0;
  };

  double sum_sw = 0.0;
  double sum_ss = 0.0;
  if (support == LambdaSupport::Full) {
    for (const auto& e : scores.entries()) {
      sum_sw += e.score * test_weight(e.lo, e.hi);
      sum_ss += e.score * e.score;
    }
  } else {
    for (const WeightedEdge& e : test) {
      const double s = scores.score_of(e.u, e.v);
      sum_sw += s * e.weight;
      sum_ss += s * s;
    }
  }

  LambdaFit fit;
  fit.support = support;
  fit.source_fingerprint = scores.source_fingerprint();
  fit.upper_bound = max_w / scores.max_score();

  double lambda = sum_ss > 0.0 ? sum_sw / sum_ss : 0.0;
  if (!(lambda > 0.0)) {
    lambda = std::numeric_limits<double>::min();
    fit.clamped = true;
  }
  if (lambda > fit.upper_bound) {
    lambda = fit.upper_bound;
    fit.clamped = true;
  }
  fit.lambda = lambda;

  // Residual over the union of scored pairs and probe pairs (elsewhere both
  // lambda*S and W vanish).
  double sq = 0.0;
  if (support == LambdaSupport::Full) {
    for (const auto& e : scores.entries()) {
      const double d = lambda * e.score - test_weight(e.lo, e.hi);
      sq += d * d;
    }
    for (const WeightedEdge& e : test) {
      if (scores.score_of(e.u, e.v) == 0.0) sq += e.weight * e.weight;
    }
  } else {
    for (const WeightedEdge& e : test) {
      const double d = lambda * scores.score_of(e.u, e.v) - e.weight;
      sq += d * d;
    }
  }
  fit.residual_norm = std::sqrt(sq);
  return fit;
}

/// One predicted weight. back_mapped is present only when the immediate
/// prediction lies in (0,1), the domain of the inverse transform.
struct WeightPrediction {
  NodePair pair;
  double predicted = 0.0;
  std::optional<double> back_mapped;
};

/// Predicted weight lambda * S for each requested pair. When back_map is set
/// the inverse of the (0,1) regularization is attached where defined. Throws
/// if the fit and the table disagree about their source graph.
inline std::vector<WeightPrediction> predict_weights(const ScoreTable& scores,
                                                     const LambdaFit& fit,
                                                     std::span<const NodePair> pairs,
                                                     bool back_map = false) {
  if (fit.source_fingerprint != scores.source_fingerprint())
    throw std::invalid_argument("predict_weights: fit and scores come from different graphs");
  std::vector<WeightPrediction> out;
  out.reserve(pairs.size());
  for (const NodePair& p : pairs) {
    WeightPrediction wp;
    wp.pair = p;
    wp.predicted = fit.lambda * scores.score_of(p.lo, p.hi);
    if (back_map && wp.predicted > 0.0 && wp.predicted < 1.0)
      wp.back_mapped = unregularize_weight(wp.predicted);
    out.push_back(wp);
  }
  return out;
}

/// Sample Pearson correlation; nullopt when either vector is constant (the
/// correlation is undefined there). Throws on length mismatch or fewer than
/// two points.
inline std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace linkpred
