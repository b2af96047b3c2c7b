#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "linkpred/edge_list.hpp"
#include "linkpred/evaluation.hpp"
#include "linkpred/graph.hpp"
#include "linkpred/manifest.hpp"
#include "linkpred/rng.hpp"
#include "linkpred/similarity.hpp"

namespace linkpred {

/// Which trials apply the (0,1) weight transform when a dataset's manifest
/// entry requests it: only the reliable-route indices, or every trial of the
/// dataset (the default; link weights and probe weights stay in one space
/// across all indices).
enum class TransformScope : std::uint8_t { ReliableOnly, AllWeighted };

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<IndexKind> indices{kAllIndexKinds.begin(), kAllIndexKinds.end()};
  double test_fraction = 0.1;
  std::size_t repetitions = 100;
  std::uint64_t master_seed = 0;
  TransformScope transform_scope = TransformScope::AllWeighted;
  LambdaSupport lambda_support = LambdaSupport::Full;
  bool paired_splits = true;  // reuse one split per (dataset, repetition) across indices
  std::optional<std::size_t> explicit_l;  // ranking depth; default is the probe count
  unsigned workers = 1;
};

/// Seed of one trial. With paired splits the index does not enter, so every
/// index sees the same split for a given (dataset, repetition); either way a
/// trial is reproducible in isolation.
inline std::uint64_t trial_seed(const ExperimentConfig& cfg, std::string_view dataset,
                                IndexKind kind, std::size_t repetition) {
  if (cfg.paired_splits)
    return derive_seed(cfg.master_seed, dataset, static_cast<std::uint64_t>(repetition));
  return derive_seed(cfg.master_seed, dataset, to_string(kind),
                     static_cast<std::uint64_t>(repetition));
}

/// Metrics of a single split of a single dataset under a single index.
/// lambda, residual_norm and pearson are absent when nothing was scored;
/// pearson is also absent when it is undefined (constant vector, or fewer
/// than two probe edges).
struct TrialResult {
  std::uint64_t seed = 0;
  double precision = 0.0;
  std::size_t scored_pairs = 0;
  std::size_t test_count = 0;
  bool transformed = false;
  std::optional<double> lambda;
  bool lambda_clamped = false;
  std::optional<double> residual_norm;
  std::optional<double> pearson;
};

/// One full split-score-evaluate pass: split the raw graph, optionally map
/// train and probe weights into (0,1), score every candidate pair, rank for
/// precision (depth = probe count unless configured), fit the weight scale
/// and correlate predicted against held-out weights.
inline TrialResult run_trial(const WeightedGraph& g, IndexKind kind,
                             const ExperimentConfig& cfg, bool needs_transform,
                             std::uint64_t seed, unsigned score_workers = 1) {
  SplitResult split = split_edges(g, cfg.test_fraction, seed);

  TrialResult r;
  r.seed = seed;
  r.test_count = split.test_edges.size();
  const bool transform =
      needs_transform &&
      (cfg.transform_scope == TransformScope::AllWeighted || reliable_route(kind));
  r.transformed = transform;

  WeightedGraph train =
      transform ? regularize_weights(split.train) : std::move(split.train);
  std::vector<WeightedEdge> test = std::move(split.test_edges);
  if (transform)
    for (WeightedEdge& e : test) e.weight = regularize_weight(e.weight);

  ScoreTable scores = score_all(train, kind, {.workers = score_workers});
  r.scored_pairs = scores.size();
  if (scores.empty()) return r;  // precision 0, no fit, undefined pearson

  std::vector<NodePair> test_pairs;
  test_pairs.reserve(test.size());
  for (const WeightedEdge& e : test) test_pairs.push_back(make_pair_of(e.u, e.v));
  r.precision = precision_at(scores, test_pairs, cfg.explicit_l.value_or(test.size()));

  const LambdaFit fit = fit_lambda(scores, test, cfg.lambda_support);
  r.lambda = fit.lambda;
  r.lambda_clamped = fit.clamped;
  r.residual_norm = fit.residual_norm;

  if (test.size() >= 2) {
    std::vector<double> predicted, actual;
    predicted.reserve(test.size());
    actual.reserve(test.size());
    for (const WeightedEdge& e : test) {
      predicted.push_back(fit.lambda * scores.score_of(e.u, e.v));
      actual.push_back(e.weight);
    }
    r.pearson = pearson(predicted, actual);
  }
  return r;
}

struct TrialRecord {
  std::string dataset;
  IndexKind kind = IndexKind::CN;
  std::size_t repetition = 0;
  TrialResult result;
};

struct LoadFailure {
  std::string dataset;
  std::string message;
};

struct DatasetTopology {
  std::string name;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double average_degree = 0.0;
  std::optional<double> clustering;           // absent when no node has degree >= 2
  std::optional<double> weighted_clustering;
};

inline DatasetTopology summarize_topology(std::string name, const WeightedGraph& g) {
  DatasetTopology t;
  t.name = std::move(name);
  t.nodes = g.node_count();
  t.edges = g.edge_count();
  t.average_degree = t.nodes ? average_degree(g) : 0.0;
  try {
    t.clustering = network_clustering(g, false);
    t.weighted_clustering = network_clustering(g, true);
  } catch (const std::exception&) {
    // graphs with no degree-2 node have no clustering coefficient
  }
  return t;
}

/// Per (dataset, index) aggregate over repetitions. pearson_defined counts
/// the trials whose correlation existed; only those enter the pearson mean,
/// and the mean is absent when none did.
struct MetricAggregate {
  std::string dataset;
  IndexKind kind = IndexKind::CN;
  std::size_t trials = 0;
  double precision_mean = 0.0;
  double precision_std = 0.0;
  std::optional<double> pearson_mean;
  std::optional<double> pearson_std;
  std::size_t pearson_defined = 0;
};

struct ExperimentSummary {
  std::size_t repetitions = 0;
  std::vector<IndexKind> indices;
  std::vector<DatasetTopology> topology;      // loaded datasets, manifest order
  std::vector<MetricAggregate> aggregates;    // dataset-major, index order within
  std::vector<TrialRecord> trials;            // canonical (dataset, index, repetition)
  std::vector<LoadFailure> failures;
};

namespace detail {

inline double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

inline double sample_std(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

/// Runs repetitions x indices x datasets trials and aggregates them. A
/// dataset that fails to load (or is too small to split) is reported in
/// `failures` and skipped. Trials are independent units handed to a worker
/// pool; every result lands in a preassigned slot and aggregation folds in
/// canonical order, so the summary does not depend on the worker count.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1)
    throw std::invalid_argument("run_experiment: repetitions must be at least 1");
  if (!(cfg.test_fraction > 0.0) || !(cfg.test_fraction < 1.0))
    throw std::invalid_argument("run_experiment: test_fraction must lie in (0,1)");
  if (cfg.indices.empty()) throw std::invalid_argument("run_experiment: no indices selected");
  if (cfg.explicit_l && *cfg.explicit_l == 0)
    throw std::invalid_argument("run_experiment: ranking depth must be positive");

  ExperimentSummary sum;
  sum.repetitions = cfg.repetitions;
  sum.indices = cfg.indices;

  struct Loaded {
    DatasetSpec spec;
    WeightedGraph graph;
  };
  std::vector<Loaded> loaded;
  for (const DatasetSpec& spec : cfg.datasets) {
    try {
      WeightedGraph g = load_edge_list_file(spec.path);
      const std::size_t m = g.edge_count();
      const auto k = static_cast<std::size_t>(
          std::llround(cfg.test_fraction * static_cast<double>(m)));
      if (k == 0 || k >= m)
        throw std::runtime_error("test fraction leaves an empty train or probe set");
      sum.topology.push_back(summarize_topology(spec.name, g));
      loaded.push_back({spec, std::move(g)});
    } catch (const std::exception& e) {
      sum.failures.push_back({spec.name, e.what()});
    }
  }

  const std::size_t per_dataset = cfg.indices.size() * cfg.repetitions;
  const std::size_t total = loaded.size() * per_dataset;
  sum.trials.resize(total);
  for (std::size_t d = 0; d < loaded.size(); ++d)
    for (std::size_t i = 0; i < cfg.indices.size(); ++i)
      for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        TrialRecord& rec = sum.trials[(d * cfg.indices.size() + i) * cfg.repetitions + r];
        rec.dataset = loaded[d].spec.name;
        rec.kind = cfg.indices[i];
        rec.repetition = r;
      }

  auto run_one = [&](std::size_t t) {
    const std::size_t d = t / per_dataset;
    TrialRecord& rec = sum.trials[t];
    rec.result = run_trial(loaded[d].graph, rec.kind, cfg,
                           loaded[d].spec.weights_need_transform,
                           trial_seed(cfg, rec.dataset, rec.kind, rec.repetition));
  };

  const unsigned workers = std::max(1u, cfg.workers);
  if (workers == 1 || total <= 1) {
    for (std::size_t t = 0; t < total; ++t) run_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    const auto count = static_cast<unsigned>(std::min<std::size_t>(workers, total));
    pool.reserve(count);
    for (unsigned w = 0; w < count; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= total) break;
          try {
            run_one(t);
          } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            break;
          }
        }
      });
    }
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (std::size_t d = 0; d < loaded.size(); ++d)
    for (std::size_t i = 0; i < cfg.indices.size(); ++i) {
      MetricAggregate a;
      a.dataset = loaded[d].spec.name;
      a.kind = cfg.indices[i];
      a.trials = cfg.repetitions;
      std::vector<double> precisions, pearsons;
      precisions.reserve(cfg.repetitions);
      for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        const TrialResult& tr =
            sum.trials[(d * cfg.indices.size() + i) * cfg.repetitions + r].result;
        precisions.push_back(tr.precision);
        if (tr.pearson) pearsons.push_back(*tr.pearson);
      }
      a.precision_mean = detail::mean_of(precisions);
      a.precision_std = detail::sample_std(precisions, a.precision_mean);
      a.pearson_defined = pearsons.size();
      if (!pearsons.empty()) {
        a.pearson_mean = detail::mean_of(pearsons);
        a.pearson_std = detail::sample_std(pearsons, *a.pearson_mean);
      }
      sum.aggregates.push_back(std::move(a));
    }
  return sum;
}

/// Correlations between per-dataset accuracy and clustering. A dataset's
/// accuracy is its best mean over indices (the flagged table cells); each
/// correlation pairs that against the plain or weighted clustering
/// coefficient, and is absent when fewer than two datasets have both values
/// or when either vector is constant.
struct ClusteringAccuracyCorrelation {
  std::optional<double> precision_vs_clustering;
  std::optional<double> precision_vs_weighted_clustering;
  std::optional<double> pearson_vs_clustering;
  std::optional<double> pearson_vs_weighted_clustering;
};

inline ClusteringAccuracyCorrelation correlate_clustering_accuracy(
    const ExperimentSummary& sum) {
  if (sum.topology.size() < 3)
    throw std::invalid_argument(
        "correlate_clustering_accuracy: need at least 3 datasets");

  struct Point {
    double best_precision = 0.0;
    std::optional<double> best_pearson;
    std::optional<double> c;
    std::optional<double> cw;
  };
  std::vector<Point> points;
  for (const DatasetTopology& t : sum.topology) {
    Point p;
    p.c = t.clustering;
    p.cw = t.weighted_clustering;
    bool any = false;
    for (const MetricAggregate& a : sum.aggregates) {
      if (a.dataset != t.name) continue;
      any = true;
      p.best_precision = std::max(p.best_precision, a.precision_mean);
      if (a.pearson_mean && (!p.best_pearson || *a.pearson_mean > *p.best_pearson))
        p.best_pearson = a.pearson_mean;
    }
    if (any) points.push_back(p);
  }

  auto correlate = [&](auto&& accuracy, auto&& clustering) -> std::optional<double> {
    std::vector<double> xs, ys;
    for (const Point& p : points) {
      const std::optional<double> a = accuracy(p);
      const std::optional<double> c = clustering(p);
      if (a && c) {
        xs.push_back(*a);
        ys.push_back(*c);
      }
    }
    if (xs.size() < 2) return std::nullopt;
    return pearson(xs, ys);
  };

  auto prec = [](const Point& p) { return std::optional<double>(p.best_precision); };
  auto corr = [](const Point& p) { return p.best_pearson; };
  auto c = [](const Point& p) { return p.c; };
  auto cw = [](const Point& p) { return p.cw; };

  ClusteringAccuracyCorrelation out;
  out.precision_vs_clustering = correlate(prec, c);
  out.precision_vs_weighted_clustering = correlate(prec, cw);
  out.pearson_vs_clustering = correlate(corr, c);
  out.pearson_vs_weighted_clustering = correlate(corr, cw);
  return out;
}

/// Synthetic benchmark family: `clique_count` disjoint cliques of
/// `clique_size` nodes plus `noise_edges` random links between distinct
/// cliques. Within a clique every pair shares exactly one group, so clique
/// weights are 1; noise links also get weight 1. Clustering starts at 1.0
/// and falls as noise grows.
inline WeightedGraph generate_clique_family(std::size_t clique_count, std::size_t clique_size,
                                            std::size_t noise_edges, std::uint64_t seed) {
  if (clique_count < 1)
    throw std::invalid_argument("generate_clique_family: need at least one clique");
  if (clique_size < 3)
    throw std::invalid_argument("generate_clique_family: clique_size must be at least 3");
  const std::size_t n = clique_count * clique_size;
  if (n > std::numeric_limits<NodeId>::max())
    throw std::invalid_argument("generate_clique_family: too many nodes");

  const std::size_t intra = clique_count * clique_size * (clique_size - 1) / 2;
  const std::size_t cross = n * (n - 1) / 2 - intra;
  if (noise_edges > cross)
    throw std::invalid_argument(
        "generate_clique_family: more noise edges than inter-clique pairs");

  std::vector<std::string> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = "n" + std::to_string(v);

  std::vector<WeightedEdge> edges;
  edges.reserve(intra + noise_edges);
  for (std::size_t c0 = 0; c0 < clique_count; ++c0) {
    const auto base = static_cast<NodeId>(c0 * clique_size);
    for (std::size_t u = 0; u < clique_size; ++u)
      for (std::size_t v = u + 1; v < clique_size; ++v)
        edges.push_back({static_cast<NodeId>(base + u), static_cast<NodeId>(base + v), 1.0});
  }
  if (noise_edges > 0) {
    std::vector<NodePair> cross_pairs;
    cross_pairs.reserve(cross);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (u / clique_size != v / clique_size)
          cross_pairs.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    Rng rng(seed);
    for (std::size_t i = 0; i < noise_edges; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(cross_pairs.size() - i));
      std::swap(cross_pairs[i], cross_pairs[j]);
      edges.push_back({cross_pairs[i].lo, cross_pairs[i].hi, 1.0});
    }
  }
  return WeightedGraph::from_edges(std::move(labels), std::move(edges));
}

}  // namespace linkpred
