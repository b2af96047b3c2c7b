#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "linkpred/linkpred.hpp"

namespace lp = linkpred;
namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 2 usage, 3 load failure, 4 runtime failure.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_full(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Fixed three decimals with trailing zeros trimmed: 1.000 -> "1",
/// 0.250 -> "0.25". Full precision bypasses the rounding entirely.
std::string format_number(double x, bool full_precision) {
  if (full_precision) return format_full(x);
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 3);
  std::string s(buf, res.ptr);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

lp::WeightedGraph load_graph(const fs::path& path) {
  try {
    return lp::load_edge_list_file(path);
  } catch (const std::exception& e) {
    throw LoadError(e.what());
  }
}

std::vector<lp::DatasetSpec> load_manifest(const fs::path& path) {
  try {
    return lp::load_manifest_file(path);
  } catch (const std::exception& e) {
    throw LoadError(e.what());
  }
}

struct SelectedDataset {
  std::string name;
  lp::WeightedGraph graph;
  bool weights_need_transform = false;
};

/// `--dataset` names a manifest entry when `--manifest` is given, otherwise
/// it is an edge-list path (no weight transform).
SelectedDataset select_dataset(const std::string& dataset, const std::string& manifest) {
  if (dataset.empty()) throw UsageError("--dataset is required");
  if (!manifest.empty()) {
    for (lp::DatasetSpec& spec : load_manifest(manifest))
      if (spec.name == dataset)
        return {spec.name, load_graph(spec.path), spec.weights_need_transform};
    throw UsageError("dataset '" + dataset + "' not found in manifest");
  }
  return {fs::path(dataset).stem().string(), load_graph(dataset), false};
}

std::string valid_index_names() {
  std::string names;
  for (lp::IndexKind k : lp::kAllIndexKinds) {
    if (!names.empty()) names += ' ';
    names += lp::to_string(k);
  }
  return names;
}

lp::IndexKind parse_index(const std::string& name) {
  const std::optional<lp::IndexKind> k = lp::index_kind_from(name);
  if (!k) throw UsageError("unknown index '" + name + "'; valid kinds: " + valid_index_names());
  return *k;
}

struct Options {
  std::string dataset;
  std::string manifest;
  std::string index;
  std::vector<std::string> indices;
  std::string out_dir;
  std::string format = "table";
  std::string transform_scope = "all_weighted";
  std::string lambda_support = "full";
  std::string paired_splits = "on";
  std::uint64_t seed = 0;
  std::size_t reps = 100;
  double test_fraction = 0.1;
  unsigned workers = 1;
  std::size_t top = 0;
  std::optional<std::size_t> top_l;
  bool full_precision = false;
};

lp::TransformScope scope_of(const Options& o) {
  return o.transform_scope == "reliable_only" ? lp::TransformScope::ReliableOnly
                                              : lp::TransformScope::AllWeighted;
}

lp::ExperimentConfig experiment_config(const Options& o) {
  lp::ExperimentConfig cfg;
  if (!(o.test_fraction > 0.0) || !(o.test_fraction < 1.0))
    throw UsageError("--test-fraction must lie strictly between 0 and 1");
  cfg.test_fraction = o.test_fraction;
  cfg.repetitions = o.reps;
  cfg.master_seed = o.seed;
  cfg.transform_scope = scope_of(o);
  cfg.lambda_support =
      o.lambda_support == "test_only" ? lp::LambdaSupport::TestOnly : lp::LambdaSupport::Full;
  cfg.paired_splits = o.paired_splits == "on";
  cfg.explicit_l = o.top_l;
  cfg.workers = o.workers;
  if (!o.indices.empty()) {
    cfg.indices.clear();
    for (const std::string& name : o.indices) cfg.indices.push_back(parse_index(name));
  }
  return cfg;
}

lp::ReportFormat report_format(const Options& o) {
  return *lp::report_format_from(o.format);  // choices restricted at parse time
}

int cmd_stats(const Options& o) {
  const SelectedDataset sel = select_dataset(o.dataset, o.manifest);
  lp::ExperimentSummary sum;
  sum.topology.push_back(lp::summarize_topology(sel.name, sel.graph));
  lp::emit_topology_table(std::cout, sum, report_format(o), o.full_precision);
  return 0;
}

int cmd_predict(const Options& o) {
  const lp::IndexKind kind = parse_index(o.index);
  SelectedDataset sel = select_dataset(o.dataset, o.manifest);
  const bool transform =
      sel.weights_need_transform &&
      (scope_of(o) == lp::TransformScope::AllWeighted || lp::reliable_route(kind));
  const lp::WeightedGraph graph =
      transform ? lp::regularize_weights(sel.graph) : std::move(sel.graph);

  const lp::ScoreTable table = lp::score_all(graph, kind, {.workers = o.workers});
  const std::vector<std::size_t> order = table.ranking();
  const std::size_t take = o.top == 0 ? order.size() : std::min(o.top, order.size());
  for (std::size_t i = 0; i < take; ++i) {
    const lp::ScoreTable::Entry& e = table.entries()[order[i]];
    const auto [a, b] = table.pair_labels(e);
    std::cout << a << ' ' << b << ' ' << format_number(e.score, o.full_precision) << '\n';
  }
  return 0;
}

int cmd_weights(const Options& o) {
  const lp::IndexKind kind = parse_index(o.index);
  const SelectedDataset sel = select_dataset(o.dataset, o.manifest);
  if (!(o.test_fraction > 0.0) || !(o.test_fraction < 1.0))
    throw UsageError("--test-fraction must lie strictly between 0 and 1");

  lp::SplitResult split = lp::split_edges(sel.graph, o.test_fraction, o.seed);
  const bool transform =
      sel.weights_need_transform &&
      (scope_of(o) == lp::TransformScope::AllWeighted || lp::reliable_route(kind));
  const lp::WeightedGraph train =
      transform ? lp::regularize_weights(split.train) : std::move(split.train);
  std::vector<lp::WeightedEdge> test = split.test_edges;
  if (transform)
    for (lp::WeightedEdge& e : test) e.weight = lp::regularize_weight(e.weight);

  const lp::ScoreTable scores = lp::score_all(train, kind, {.workers = o.workers});
  std::optional<lp::LambdaFit> fit;
  if (!scores.empty())
    fit = lp::fit_lambda(scores, test,
                         o.lambda_support == "test_only" ? lp::LambdaSupport::TestOnly
                                                         : lp::LambdaSupport::Full);

  auto num = [&](double x) { return format_number(x, o.full_precision); };
  std::cout << (transform ? "# pair actual predicted back_mapped\n" : "# pair actual predicted\n");
  std::vector<double> predicted, actual;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const lp::WeightedEdge& e = test[i];
    const double p = fit ? fit->lambda * scores.score_of(e.u, e.v) : 0.0;
    predicted.push_back(p);
    actual.push_back(e.weight);
    std::string_view la = sel.graph.label(e.u);
    std::string_view lb = sel.graph.label(e.v);
    if (lb < la) std::swap(la, lb);
    std::cout << la << ' ' << lb << ' ' << num(split.test_edges[i].weight) << ' ' << num(p);
    if (transform) {
      if (p > 0.0 && p < 1.0)
        std::cout << ' ' << num(lp::unregularize_weight(p));
      else
        std::cout << " undefined";
    }
    std::cout << '\n';
  }

  std::optional<double> corr;
  if (test.size() >= 2) corr = lp::pearson(predicted, actual);
  std::cout << "# lambda " << (fit ? num(fit->lambda) : "undefined") << '\n';
  std::cout << "# clamped " << (fit ? (fit->clamped ? "1" : "0") : "undefined") << '\n';
  std::cout << "# pearson " << (corr ? num(*corr) : "undefined") << '\n';
  return 0;
}

void write_report_file(const fs::path& path, const lp::ExperimentSummary& sum,
                       void (*emit)(std::ostream&, const lp::ExperimentSummary&,
                                    lp::ReportFormat, bool),
                       lp::ReportFormat format, bool full_precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit(out, sum, format, full_precision);
  std::cout << "wrote " << path.string() << '\n';
}

int cmd_benchmark(const Options& o) {
  lp::ExperimentConfig cfg = experiment_config(o);
  cfg.datasets = load_manifest(o.manifest);

  const lp::ExperimentSummary sum = lp::run_experiment(cfg);
  for (const lp::LoadFailure& f : sum.failures)
    std::cerr << "dataset " << f.dataset << " failed: " << f.message << '\n';
  if (sum.topology.empty()) {
    std::cerr << "error: no dataset could be loaded\n";
    return 3;
  }

  const lp::ReportFormat fmt = report_format(o);
  const fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  const std::string ext = "." + std::string(lp::format_extension(fmt));
  write_report_file(dir / ("topology" + ext), sum, &lp::emit_topology_table, fmt,
                    o.full_precision);
  write_report_file(dir / ("precision" + ext), sum, &lp::emit_precision_table, fmt,
                    o.full_precision);
  write_report_file(dir / ("pearson" + ext), sum, &lp::emit_pearson_table, fmt,
                    o.full_precision);
  const fs::path log_path = dir / "trials.log";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw std::runtime_error("cannot write " + log_path.string());
  lp::write_trial_log(log, sum);
  std::cout << "wrote " << log_path.string() << '\n';
  return 0;
}

int cmd_correlate(const Options& o) {
  lp::ExperimentConfig cfg = experiment_config(o);
  cfg.datasets = load_manifest(o.manifest);

  const lp::ExperimentSummary sum = lp::run_experiment(cfg);
  for (const lp::LoadFailure& f : sum.failures)
    std::cerr << "dataset " << f.dataset << " failed: " << f.message << '\n';

  const lp::ClusteringAccuracyCorrelation corr = lp::correlate_clustering_accuracy(sum);
  auto line = [&](std::string_view name, const std::optional<double>& v) {
    std::cout << name << ' ' << (v ? format_number(*v, o.full_precision) : "undefined")
              << '\n';
  };
  line("best_precision_vs_clustering", corr.precision_vs_clustering);
  line("best_precision_vs_weighted_clustering", corr.precision_vs_weighted_clustering);
  line("best_pearson_vs_clustering", corr.pearson_vs_clustering);
  line("best_pearson_vs_weighted_clustering", corr.pearson_vs_weighted_clustering);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Link and weight prediction for weighted graphs"};
  app.require_subcommand(1);

  auto add_dataset_opts = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", o.dataset,
                    "Edge-list path, or dataset name when --manifest is given");
    cmd->add_option("--manifest", o.manifest, "Dataset manifest file");
  };
  auto add_format_opts = [&](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "md"}));
    cmd->add_flag("--full-precision", o.full_precision,
                  "Print full float precision instead of 3 decimals");
  };
  auto add_experiment_opts = [&](CLI::App* cmd) {
    cmd->add_option("--reps", o.reps, "Repetitions per (dataset, index)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
    cmd->add_option("--test-fraction", o.test_fraction, "Held-out edge fraction");
    cmd->add_option("--workers", o.workers, "Worker threads")
        ->check(CLI::Range(1u, 1024u));
    cmd->add_option("--index", o.indices, "Indices to evaluate (default: all nine)")
        ->delimiter(',');
    cmd->add_option("--transform-scope", o.transform_scope,
                    "Which indices see transformed weights on datasets that need it")
        ->check(CLI::IsMember({"reliable_only", "all_weighted"}));
    cmd->add_option("--lambda-support", o.lambda_support,
                    "Pairs entering the lambda fit denominator")
        ->check(CLI::IsMember({"full", "test_only"}));
    cmd->add_option("--paired-splits", o.paired_splits,
                    "Reuse the same splits across indices")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--top-l", o.top_l, "Ranking depth (default: probe-set size)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 40));
  };

  CLI::App* stats = app.add_subcommand("stats", "Topology summary of one dataset");
  add_dataset_opts(stats);
  add_format_opts(stats);

  CLI::App* predict = app.add_subcommand("predict", "Rank candidate links by score");
  add_dataset_opts(predict);
  predict->add_option("--index", o.index, "Similarity index")->required();
  predict->add_option("--top", o.top, "Print only the top K pairs (0 = all)");
  predict->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  predict->add_option("--transform-scope", o.transform_scope,
                      "Which indices see transformed weights on datasets that need it")
      ->check(CLI::IsMember({"reliable_only", "all_weighted"}));
  predict->add_flag("--full-precision", o.full_precision,
                    "Print full float precision instead of 3 decimals");

  CLI::App* weights = app.add_subcommand("weights", "Predict held-out weights for one split");
  add_dataset_opts(weights);
  weights->add_option("--index", o.index, "Similarity index")->required();
  weights->add_option("--seed", o.seed, "Split seed")->required();
  weights->add_option("--test-fraction", o.test_fraction, "Held-out edge fraction");
  weights->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  weights->add_option("--transform-scope", o.transform_scope,
                      "Which indices see transformed weights on datasets that need it")
      ->check(CLI::IsMember({"reliable_only", "all_weighted"}));
  weights->add_option("--lambda-support", o.lambda_support,
                      "Pairs entering the lambda fit denominator")
      ->check(CLI::IsMember({"full", "test_only"}));
  weights->add_flag("--full-precision", o.full_precision,
                    "Print full float precision instead of 3 decimals");

  CLI::App* benchmark =
      app.add_subcommand("benchmark", "Repeated-split evaluation over a manifest");
  benchmark->add_option("--manifest", o.manifest, "Dataset manifest file")->required();
  benchmark->add_option("--seed", o.seed, "Master seed")->required();
  benchmark->add_option("--out", o.out_dir, "Report directory")->required();
  add_experiment_opts(benchmark);
  add_format_opts(benchmark);

  CLI::App* correlate =
      app.add_subcommand("correlate", "Correlate best accuracy with clustering");
  correlate->add_option("--manifest", o.manifest, "Dataset manifest file")->required();
  correlate->add_option("--seed", o.seed, "Master seed")->required();
  add_experiment_opts(correlate);
  correlate->add_flag("--full-precision", o.full_precision,
                      "Print full float precision instead of 3 decimals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (stats->parsed()) return cmd_stats(o);
    if (predict->parsed()) return cmd_predict(o);
    if (weights->parsed()) return cmd_weights(o);
    if (benchmark->parsed()) return cmd_benchmark(o);
    return cmd_correlate(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
