#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "linkpred/experiment.hpp"

namespace linkpred {

enum class ReportFormat : std::uint8_t { Plain, Csv, Markdown };

inline std::string_view format_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Plain: return "txt";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Markdown: return "md";
  }
  return "txt";
}

inline std::optional<ReportFormat> report_format_from(std::string_view name) {
  if (name == "table") return ReportFormat::Plain;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

namespace detail {

/// Shortest representation that parses back to the same double.
inline std::string format_full(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Three decimal places, the precision the report tables use by default.
inline std::string format_fixed3(double x) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

inline std::string format_value(double x, bool full_precision) {
  return full_precision ? format_full(x) : format_fixed3(x);
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// rows[0] is the header. Columns are padded to a common width; numeric-ish
/// alignment is not attempted, tables stay grep-friendly.
inline void render_plain_table(std::ostream& out,
                               const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << row[c];
      if (c + 1 < row.size())
        out << std::string(widths[c] - row[c].size(), ' ');
    }
    out << '\n';
  }
}

inline void render_markdown_table(std::ostream& out,
                                  const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return;
  auto line = [&](const std::vector<std::string>& row) {
    out << '|';
    for (const std::string& cell : row) out << ' ' << cell << " |";
    out << '\n';
  };
  line(rows[0]);
  out << '|';
  for (std::size_t c = 0; c < rows[0].size(); ++c) out << " --- |";
  out << '\n';
  for (std::size_t r = 1; r < rows.size(); ++r) line(rows[r]);
}

inline void render_csv_table(std::ostream& out,
                             const std::vector<std::vector<std::string>>& rows) {
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << csv_escape(row[c]);
    }
    out << '\n';
  }
}

inline void render_table(std::ostream& out, ReportFormat format,
                         const std::vector<std::vector<std::string>>& rows) {
  switch (format) {
    case ReportFormat::Plain: return render_plain_table(out, rows);
    case ReportFormat::Csv: return render_csv_table(out, rows);
    case ReportFormat::Markdown: return render_markdown_table(out, rows);
  }
}

}  // namespace detail

/// Dataset topology table: |V|, |E|, average degree and the two clustering
/// coefficients per dataset. CSV adds full-precision companion columns.
inline void emit_topology_table(std::ostream& out, const ExperimentSummary& sum,
                                ReportFormat format, bool full_precision = false) {
  std::vector<std::vector<std::string>> rows;
  const bool csv = format == ReportFormat::Csv;
  if (csv) {
    rows.push_back({"dataset", "nodes", "edges", "avg_degree", "avg_degree_full", "C",
                    "C_full", "C_w", "C_w_full"});
  } else {
    rows.push_back({"dataset", "nodes", "edges", "avg_degree", "C", "C_w"});
  }
  auto opt_cell = [&](const std::optional<double>& v, bool full) {
    return v ? detail::format_value(*v, full) : std::string("undefined");
  };
  for (const DatasetTopology& t : sum.topology) {
    std::vector<std::string> row{t.name, std::to_string(t.nodes), std::to_string(t.edges)};
    if (csv) {
      row.push_back(detail::format_fixed3(t.average_degree));
      row.push_back(detail::format_full(t.average_degree));
      row.push_back(opt_cell(t.clustering, false));
      row.push_back(opt_cell(t.clustering, true));
      row.push_back(opt_cell(t.weighted_clustering, false));
      row.push_back(opt_cell(t.weighted_clustering, true));
    } else {
      row.push_back(detail::format_value(t.average_degree, full_precision));
      row.push_back(opt_cell(t.clustering, full_precision));
      row.push_back(opt_cell(t.weighted_clustering, full_precision));
    }
    rows.push_back(std::move(row));
  }
  detail::render_table(out, format, rows);
}

namespace detail {

enum class MetricColumn : std::uint8_t { Precision, Pearson };

inline const MetricAggregate* find_aggregate(const ExperimentSummary& sum,
                                             std::string_view dataset, IndexKind kind) {
  for (const MetricAggregate& a : sum.aggregates)
    if (a.dataset == dataset && a.kind == kind) return &a;
  return nullptr;
}

/// Metric table: one row per index, one column per dataset, best value in
/// each dataset column flagged ('*' suffix in plain text, bold in markdown).
/// CSV is emitted long-form instead: one row per (index, dataset) with mean,
/// full-precision companion, extension std-dev columns and the best flag.
inline void emit_metric_table(std::ostream& out, const ExperimentSummary& sum,
                              MetricColumn metric, ReportFormat format,
                              bool full_precision) {
  auto mean_of = [&](const MetricAggregate& a) -> std::optional<double> {
    if (metric == MetricColumn::Precision) return a.precision_mean;
    return a.pearson_mean;
  };
  auto std_of = [&](const MetricAggregate& a) -> std::optional<double> {
    if (metric == MetricColumn::Precision) return a.precision_std;
    return a.pearson_std;
  };

  // Best mean per dataset column, mirroring how the flagged table cells feed
  // the clustering correlation.
  std::vector<std::optional<double>> best(sum.topology.size());
  for (std::size_t d = 0; d < sum.topology.size(); ++d)
    for (IndexKind k : sum.indices) {
      const MetricAggregate* a = find_aggregate(sum, sum.topology[d].name, k);
      if (!a) continue;
      const std::optional<double> m = mean_of(*a);
      if (m && (!best[d] || *m > *best[d])) best[d] = m;
    }

  std::vector<std::vector<std::string>> rows;
  if (format == ReportFormat::Csv) {
    std::vector<std::string> header{"index", "dataset", "mean", "mean_full", "ext_std",
                                    "ext_std_full"};
    if (metric == MetricColumn::Pearson) {
      header.push_back("defined");
      header.push_back("undefined");
    }
    header.push_back("is_best");
    rows.push_back(std::move(header));
    for (IndexKind k : sum.indices)
      for (std::size_t d = 0; d < sum.topology.size(); ++d) {
        const MetricAggregate* a = find_aggregate(sum, sum.topology[d].name, k);
        if (!a) continue;
        const std::optional<double> m = mean_of(*a);
        const std::optional<double> s = std_of(*a);
        std::vector<std::string> row{std::string(to_string(k)), sum.topology[d].name};
        row.push_back(m ? format_fixed3(*m) : "undefined");
        row.push_back(m ? format_full(*m) : "undefined");
        row.push_back(s ? format_fixed3(*s) : "undefined");
        row.push_back(s ? format_full(*s) : "undefined");
        if (metric == MetricColumn::Pearson) {
          row.push_back(std::to_string(a->pearson_defined));
          row.push_back(std::to_string(a->trials - a->pearson_defined));
        }
        row.push_back(m && best[d] && *m == *best[d] ? "1" : "0");
        rows.push_back(std::move(row));
      }
    render_csv_table(out, rows);
    return;
  }

  std::vector<std::string> header{"index"};
  for (const DatasetTopology& t : sum.topology) header.push_back(t.name);
  rows.push_back(std::move(header));
  if (!sum.topology.empty()) {
    for (IndexKind k : sum.indices) {
      std::vector<std::string> row{std::string(to_string(k))};
      for (std::size_t d = 0; d < sum.topology.size(); ++d) {
        const MetricAggregate* a = find_aggregate(sum, sum.topology[d].name, k);
        const std::optional<double> m = a ? mean_of(*a) : std::nullopt;
        if (!m) {
          row.push_back("undefined");
          continue;
        }
        std::string cell = format_value(*m, full_precision);
        if (best[d] && *m == *best[d])
          cell = format == ReportFormat::Markdown ? "**" + cell + "**" : cell + "*";
        row.push_back(std::move(cell));
      }
      rows.push_back(std::move(row));
    }
  }
  render_table(out, format, rows);
}

}  // namespace detail

/// Link-prediction accuracy table (mean precision over repetitions).
inline void emit_precision_table(std::ostream& out, const ExperimentSummary& sum,
                                 ReportFormat format, bool full_precision = false) {
  detail::emit_metric_table(out, sum, detail::MetricColumn::Precision, format,
                            full_precision);
}

/// Weight-prediction accuracy table (mean Pearson over the repetitions where
/// it is defined).
inline void emit_pearson_table(std::ostream& out, const ExperimentSummary& sum,
                               ReportFormat format, bool full_precision = false) {
  detail::emit_metric_table(out, sum, detail::MetricColumn::Pearson, format,
                            full_precision);
}

/// One tab-separated record per trial, full precision, for audits and
/// selective recomputation.
inline void write_trial_log(std::ostream& out, const ExperimentSummary& sum) {
  out << "# dataset\tindex\tseed\tprecision\tlambda\tclamped\tpearson\n";
  for (const TrialRecord& rec : sum.trials) {
    const TrialResult& r = rec.result;
    out << rec.dataset << '\t' << to_string(rec.kind) << '\t' << r.seed << '\t'
        << detail::format_full(r.precision) << '\t'
        << (r.lambda ? detail::format_full(*r.lambda) : "undefined") << '\t'
        << (r.lambda_clamped ? '1' : '0') << '\t'
        << (r.pearson ? detail::format_full(*r.pearson) : "undefined") << '\n';
  }
}

/// Full report: topology, precision and pearson tables (and load failures,
/// if any) in one stream, each section introduced by a heading line.
inline void emit_report(std::ostream& out, const ExperimentSummary& sum, ReportFormat format,
                        bool full_precision = false) {
  const bool md = format == ReportFormat::Markdown;
  out << (md ? "## Topology\n" : "# topology\n");
  emit_topology_table(out, sum, format, full_precision);
  out << (md ? "\n## Link prediction precision\n" : "\n# precision\n");
  emit_precision_table(out, sum, format, full_precision);
  out << (md ? "\n## Weight prediction pearson\n" : "\n# pearson\n");
  emit_pearson_table(out, sum, format, full_precision);
  if (!sum.failures.empty()) {
    out << (md ? "\n## Failures\n" : "\n# failures\n");
    std::vector<std::vector<std::string>> rows{{"dataset", "error"}};
    for (const LoadFailure& f : sum.failures) rows.push_back({f.dataset, f.message});
    detail::render_table(out, format, rows);
  }
}

}  // namespace linkpred
