// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file report.hpp
/// \brief Machine-readable run and benchmark reports written by the CLI.
///
/// Reports are JSON objects carrying "format_version" and "kind". Join reports
/// ("kind": "join") can be fed back to `tedjoin bench --reports` for
/// aggregation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tedjoin::report {

inline constexpr int kFormatVersion = 1;

struct ConfigEcho {
  double epsilon = 0.0;
  std::string kernel = "tile";
  bool short_circuit = true;
  std::uint64_t k_idx = 0;
  std::optional<std::uint64_t> batch_size;  // empty = unbounded
  std::uint32_t threads = 1;
  bool reorder_dims = false;

  friend bool operator==(const ConfigEcho&, const ConfigEcho&) = default;
};

struct DatasetSummary {
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  std::string source;
  std::uint64_t checksum = 0;

  friend bool operator==(const DatasetSummary&, const DatasetSummary&) = default;
};

struct ResultSummary {
  std::uint64_t total_pairs = 0;
  double selectivity = 0.0;

  friend bool operator==(const ResultSummary&, const ResultSummary&) = default;
};

struct Stats {
  std::uint64_t cells = 0;
  std::uint64_t batches = 0;
  std::uint64_t tiles_processed = 0;
  std::uint64_t chunks_executed = 0;
  std::uint64_t chunks_skipped = 0;
  std::uint64_t candidates_refined = 0;
  std::uint64_t pairs_emitted = 0;
  double index_seconds = 0.0;
  double refine_seconds = 0.0;
  double wall_seconds = 0.0;
  double pairs_per_second = 0.0;

  friend bool operator==(const Stats&, const Stats&) = default;
};

struct RunReport {
  int format_version = kFormatVersion;
  ConfigEcho config;
  DatasetSummary dataset;
  ResultSummary result;
  Stats stats;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

struct BenchRow {
  double epsilon = 0.0;
  std::string kernel;
  std::uint64_t repeats = 0;
  double median_seconds = 0.0;
  std::uint64_t total_pairs = 0;
  double selectivity = 0.0;
  double pairs_per_second = 0.0;
  std::uint64_t chunks_skipped = 0;
  /// scalar median / tile median at the same epsilon; tile rows only.
  std::optional<double> speedup;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchReport {
  int format_version = kFormatVersion;
  DatasetSummary dataset;
  std::vector<BenchRow> rows;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

nlohmann::json to_json(const RunReport& r);
RunReport run_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BenchReport& r);
BenchReport bench_report_from_json(const nlohmann::json& j);

/// Median of the samples (mean of the middle two for even counts).
double median(std::vector<double> samples);

/// Fills speedup on tile rows that have a scalar row at the same epsilon.
void fill_speedups(std::vector<BenchRow>& rows);

/// Groups join reports by (epsilon, kernel) into rows; time is the median of
/// wall_seconds across the group.
std::vector<BenchRow> aggregate(const std::vector<RunReport>& runs);

std::string to_csv(const BenchReport& r);

std::string hex64(std::uint64_t v);
std::uint64_t parse_hex64(const std::string& s);

}  // namespace tedjoin::report
