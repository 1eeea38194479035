#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdmrt/metrics.hpp"

namespace sdmrt {

// Scalar that is not a per-system metric: retention fraction, diagnostic
// perplexities, Bayes risks, corpus sizes.
struct DiagnosticRow {
  std::string name;
  std::string system;
  double value = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  friend bool operator==(const DiagnosticRow&, const DiagnosticRow&) = default;
};

struct ExperimentReport {
  std::vector<MetricsRow> rows;
  std::vector<DiagnosticRow> diagnostics;
  std::vector<std::string> stage_log;  // "seed <s> <strategy> <STAGE>"

  void append(const ExperimentReport& other);
  // First row matching the labels; throws when absent.
  const MetricsRow& row(std::string_view system, std::string_view dataset, std::uint64_t seed,
                        std::optional<std::size_t> iteration = {}) const;
  double diagnostic(std::string_view name, std::string_view system, std::uint64_t seed) const;
};

inline constexpr std::string_view kMetricsHeader =
    "system\tdataset\titeration\tbleu\tter\trepeated_rate\tppl\tseed\tconfig_hash";
inline constexpr std::string_view kDiagnosticsHeader = "name\tsystem\tvalue\tseed\tconfig_hash";

std::string format_metrics_tsv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_tsv(std::string_view text, const std::string& source_name = "report");
std::string format_diagnostics_tsv(const std::vector<DiagnosticRow>& rows);

// Column-aligned rendering of a TSV-shaped table (first row is the header).
std::string format_aligned(const std::vector<std::vector<std::string>>& cells);
std::string format_metrics_table(const std::vector<MetricsRow>& rows);

// One row per (system, dataset, iteration) holding the per-metric median
// over seeds; seed is 0 and config_hash is kept when all inputs agree.
std::vector<MetricsRow> aggregate_median(const std::vector<MetricsRow>& rows);

double median(std::vector<double> values);

}  // namespace sdmrt
