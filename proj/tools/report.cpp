// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace tedjoin::report {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos, 16);
  if (pos != s.size()) throw std::invalid_argument("bad hex checksum: " + s);
  return v;
}

namespace {

json dataset_json(const DatasetSummary& d) {
  return {{"n", d.n}, {"d", d.d}, {"source", d.source}, {"checksum", hex64(d.checksum)}};
}

DatasetSummary dataset_from(const json& j) {
  return {j.at("n").get<std::uint64_t>(), j.at("d").get<std::uint64_t>(), j.at("source").get<std::string>(),
          parse_hex64(j.at("checksum").get<std::string>())};
}

void check_header(const json& j, const char* kind) {
  const int version = j.at("format_version").get<int>();
  if (version != kFormatVersion) throw std::runtime_error("unsupported report format_version " + std::to_string(version));
  if (j.at("kind").get<std::string>() != kind) throw std::runtime_error(std::string("expected a ") + kind + " report");
}

}  // namespace

json to_json(const RunReport& r) {
  const auto& c = r.config;
  const auto& s = r.stats;
  return {
      {"format_version", r.format_version},
      {"kind", "join"},
      {"config",
       {{"epsilon", c.epsilon},
        {"kernel", c.kernel},
        {"short_circuit", c.short_circuit},
        {"k_idx", c.k_idx},
        {"batch_size", c.batch_size ? json(*c.batch_size) : json(nullptr)},
        {"threads", c.threads},
        {"reorder_dims", c.reorder_dims}}},
      {"dataset", dataset_json(r.dataset)},
      {"result", {{"total_pairs", r.result.total_pairs}, {"selectivity", r.result.selectivity}}},
      {"stats",
       {{"cells", s.cells},
        {"batches", s.batches},
        {"tiles_processed", s.tiles_processed},
        {"chunks_executed", s.chunks_executed},
        {"chunks_skipped", s.chunks_skipped},
        {"candidates_refined", s.candidates_refined},
        {"pairs_emitted", s.pairs_emitted},
        {"index_seconds", s.index_seconds},
        {"refine_seconds", s.refine_seconds},
        {"wall_seconds", s.wall_seconds},
        {"pairs_per_second", s.pairs_per_second}}},
  };
}

RunReport run_report_from_json(const json& j) {
  check_header(j, "join");
  RunReport r;
  const auto& c = j.at("config");
  r.config.epsilon = c.at("epsilon").get<double>();
  r.config.kernel = c.at("kernel").get<std::string>();
  r.config.short_circuit = c.at("short_circuit").get<bool>();
  r.config.k_idx = c.at("k_idx").get<std::uint64_t>();
  if (!c.at("batch_size").is_null()) r.config.batch_size = c.at("batch_size").get<std::uint64_t>();
  r.config.threads = c.at("threads").get<std::uint32_t>();
  r.config.reorder_dims = c.at("reorder_dims").get<bool>();
  r.dataset = dataset_from(j.at("dataset"));
  r.result.total_pairs = j.at("result").at("total_pairs").get<std::uint64_t>();
  r.result.selectivity = j.at("result").at("selectivity").get<double>();
  const auto& s = j.at("stats");
  r.stats.cells = s.at("cells").get<std::uint64_t>();
  r.stats.batches = s.at("batches").get<std::uint64_t>();
  r.stats.tiles_processed = s.at("tiles_processed").get<std::uint64_t>();
  r.stats.chunks_executed = s.at("chunks_executed").get<std::uint64_t>();
  r.stats.chunks_skipped = s.at("chunks_skipped").get<std::uint64_t>();
  r.stats.candidates_refined = s.at("candidates_refined").get<std::uint64_t>();
  r.stats.pairs_emitted = s.at("pairs_emitted").get<std::uint64_t>();
  r.stats.index_seconds = s.at("index_seconds").get<double>();
  r.stats.refine_seconds = s.at("refine_seconds").get<double>();
  r.stats.wall_seconds = s.at("wall_seconds").get<double>();
  r.stats.pairs_per_second = s.at("pairs_per_second").get<double>();
  return r;
}

json to_json(const BenchReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"epsilon", row.epsilon},
                    {"kernel", row.kernel},
                    {"repeats", row.repeats},
                    {"median_seconds", row.median_seconds},
                    {"total_pairs", row.total_pairs},
                    {"selectivity", row.selectivity},
                    {"pairs_per_second", row.pairs_per_second},
                    {"chunks_skipped", row.chunks_skipped},
                    {"speedup", row.speedup ? json(*row.speedup) : json(nullptr)}});
  }
  return {{"format_version", r.format_version}, {"kind", "bench"}, {"dataset", dataset_json(r.dataset)}, {"rows", rows}};
}

BenchReport bench_report_from_json(const json& j) {
  check_header(j, "bench");
  BenchReport r;
  r.dataset = dataset_from(j.at("dataset"));
  for (const auto& row : j.at("rows")) {
    BenchRow b;
    b.epsilon = row.at("epsilon").get<double>();
    b.kernel = row.at("kernel").get<std::string>();
    b.repeats = row.at("repeats").get<std::uint64_t>();
    b.median_seconds = row.at("median_seconds").get<double>();
    b.total_pairs = row.at("total_pairs").get<std::uint64_t>();
    b.selectivity = row.at("selectivity").get<double>();
    b.pairs_per_second = row.at("pairs_per_second").get<double>();
    b.chunks_skipped = row.at("chunks_skipped").get<std::uint64_t>();
    if (!row.at("speedup").is_null()) b.speedup = row.at("speedup").get<double>();
    r.rows.push_back(b);
  }
  return r;
}

double median(std::vector<double> samples) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

void fill_speedups(std::vector<BenchRow>& rows) {
  for (auto& row : rows) {
    if (row.kernel != "tile") continue;
    for (const auto& other : rows) {
      if (other.kernel == "scalar" && other.epsilon == row.epsilon && row.median_seconds > 0.0)
        row.speedup = other.median_seconds / row.median_seconds;
    }
  }
}

std::vector<BenchRow> aggregate(const std::vector<RunReport>& runs) {
  std::map<std::pair<double, std::string>, std::vector<const RunReport*>> groups;
  for (const auto& r : runs) groups[{r.config.epsilon, r.config.kernel}].push_back(&r);
  std::vector<BenchRow> rows;
  for (const auto& [key, members] : groups) {
    std::vector<double> times;
    for (const auto* m : members) times.push_back(m->stats.wall_seconds);
    BenchRow row;
    row.epsilon = key.first;
    row.kernel = key.second;
    row.repeats = members.size();
    row.median_seconds = median(times);
    row.total_pairs = members.front()->result.total_pairs;
    row.selectivity = members.front()->result.selectivity;
    row.pairs_per_second = row.median_seconds > 0.0 ? static_cast<double>(row.total_pairs) / row.median_seconds : 0.0;
    row.chunks_skipped = members.front()->stats.chunks_skipped;
    rows.push_back(row);
  }
  fill_speedups(rows);
  return rows;
}

std::string to_csv(const BenchReport& r) {
  std::string out = "epsilon,kernel,repeats,median_seconds,total_pairs,selectivity,pairs_per_second,chunks_skipped,speedup\n";
  char buf[512];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%llu,%.9g,%llu,%.17g,%.9g,%llu,", row.epsilon, row.kernel.c_str(),
                  static_cast<unsigned long long>(row.repeats), row.median_seconds,
                  static_cast<unsigned long long>(row.total_pairs), row.selectivity, row.pairs_per_second,
                  static_cast<unsigned long long>(row.chunks_skipped));
    out += buf;
    if (row.speedup) {
      std::snprintf(buf, sizeof buf, "%.6g", *row.speedup);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace tedjoin::report
