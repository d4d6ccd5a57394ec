// SPDX-License-Identifier: Apache-2.0
//
// tedjoin: generate datasets, run epsilon self-joins, verify them against the
// brute-force reference, and benchmark kernels over epsilon sweeps.
//
// Exit codes: 0 success, 2 usage, 3 validation, 4 I/O, 5 resource,
// 6 verification mismatch, 7 parse, 8 internal.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "report.hpp"
#include "tedjoin/tedjoin.h"

namespace {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitIo = 4,
  kExitResource = 5,
  kExitMismatch = 6,
  kExitParse = 7,
  kExitInternal = 8,
};

constexpr std::size_t kMaxListedDifferences = 100;

struct DatasetDeleter {
  void operator()(tedj_dataset* d) const { tedj_dataset_free(d); }
};
struct ResultDeleter {
  void operator()(tedj_result* r) const { tedj_result_free(r); }
};
using DatasetPtr = std::unique_ptr<tedj_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<tedj_result, ResultDeleter>;

// Carries a library failure up to main with its exit code.
struct Failure {
  int code;
  std::string message;
};

int exit_code_of(tedj_status s) {
  switch (s) {
    case TEDJ_OK: return kExitOk;
    case TEDJ_ERR_VALIDATION: return kExitValidation;
    case TEDJ_ERR_BOUNDS: return kExitInternal;
    case TEDJ_ERR_PARSE: return kExitParse;
    case TEDJ_ERR_IO: return kExitIo;
    case TEDJ_ERR_RESOURCE: return kExitResource;
    case TEDJ_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

void check(tedj_status s) {
  if (s != TEDJ_OK) throw Failure{exit_code_of(s), std::string(tedj_status_string(s)) + ": " + tedj_last_error()};
}

tedj_format format_for(const std::string& path, const std::string& explicit_format) {
  if (explicit_format == "csv") return TEDJ_FORMAT_CSV;
  if (explicit_format == "binary") return TEDJ_FORMAT_BINARY;
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".csv") return TEDJ_FORMAT_CSV;
  return TEDJ_FORMAT_BINARY;
}

DatasetPtr load(const std::string& path, const std::string& format) {
  tedj_dataset* raw = nullptr;
  check(tedj_dataset_read(path.c_str(), format_for(path, format), &raw));
  return DatasetPtr(raw);
}

std::uint32_t default_threads() {
  if (const char* env = std::getenv("TEDJOIN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::uint32_t>(v);
  }
  return 1;
}

tedj_kernel kernel_of(const std::string& name) { return name == "scalar" ? TEDJ_KERNEL_SCALAR : TEDJ_KERNEL_TILE; }

struct JoinOptions {
  std::string input;
  std::string format;
  double epsilon = 0.0;
  std::string kernel = "tile";
  bool no_short_circuit = false;
  std::uint64_t k_idx = 0;
  std::uint64_t batch_size = 0;  // 0 = unbounded
  std::uint32_t threads = 0;     // 0 = environment default
  bool reorder_dims = false;
};

void add_join_flags(CLI::App* cmd, JoinOptions& o, bool with_epsilon, bool with_kernel) {
  cmd->add_option("--input", o.input, "Dataset file (.csv or binary)")->required();
  cmd->add_option("--format", o.format, "Input format, inferred from the extension by default")
      ->check(CLI::IsMember({"csv", "binary"}));
  if (with_epsilon) cmd->add_option("--epsilon", o.epsilon, "Search radius")->required();
  if (with_kernel) {
    cmd->add_option("--kernel", o.kernel, "Refinement kernel")->check(CLI::IsMember({"tile", "scalar"}));
  }
  cmd->add_flag("--no-short-circuit", o.no_short_circuit, "Evaluate every chunk of every tile");
  cmd->add_option("--k-idx", o.k_idx, "Indexed dimensions (default min(d, 6))");
  cmd->add_option("--batch-size", o.batch_size, "Estimated pair evaluations per batch (default unbounded)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "Worker threads (default $TEDJOIN_THREADS or 1)")->check(CLI::PositiveNumber);
  cmd->add_flag("--reorder-dims", o.reorder_dims, "Reorder dimensions by descending variance before indexing");
}

tedj_join_config config_of(const JoinOptions& o, double epsilon, const std::string& kernel) {
  tedj_join_config c;
  tedj_join_config_init(&c);
  c.epsilon = epsilon;
  c.kernel = kernel_of(kernel);
  c.short_circuit = o.no_short_circuit ? 0 : 1;
  c.k_idx = o.k_idx;
  c.batch_size = o.batch_size == 0 ? TEDJ_UNBOUNDED_BATCH : o.batch_size;
  c.threads = o.threads == 0 ? default_threads() : o.threads;
  c.reorder_dims = o.reorder_dims ? 1 : 0;
  return c;
}

tedjoin::report::DatasetSummary summary_of(const tedj_dataset* ds, const std::string& source) {
  return {tedj_dataset_size(ds), tedj_dataset_dims(ds), source, tedj_dataset_checksum(ds)};
}

struct TimedJoin {
  ResultPtr result;
  double wall_seconds = 0.0;
};

TimedJoin timed_join(const tedj_dataset* ds, const tedj_join_config& c) {
  tedj_result* raw = nullptr;
  const auto start = std::chrono::steady_clock::now();
  check(tedj_self_join(ds, &c, &raw));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {ResultPtr(raw), wall};
}

tedjoin::report::RunReport make_report(const JoinOptions& o, const tedj_join_config& c, const tedj_dataset* ds,
                                       const TimedJoin& run) {
  tedjoin::report::RunReport r;
  r.config.epsilon = c.epsilon;
  r.config.kernel = c.kernel == TEDJ_KERNEL_SCALAR ? "scalar" : "tile";
  r.config.short_circuit = c.short_circuit != 0;
  r.config.k_idx = c.k_idx;
  if (c.batch_size != TEDJ_UNBOUNDED_BATCH) r.config.batch_size = c.batch_size;
  r.config.threads = c.threads;
  r.config.reorder_dims = c.reorder_dims != 0;
  r.dataset = summary_of(ds, o.input);
  r.result.total_pairs = tedj_result_pair_count(run.result.get());
  r.result.selectivity = tedj_result_selectivity(run.result.get());
  tedj_join_stats s;
  tedj_result_stats(run.result.get(), &s);
  r.stats = {s.cells,          s.batches,          s.tiles_processed, s.chunks_executed,
             s.chunks_skipped, s.candidates_refined, s.pairs_emitted, s.index_seconds,
             s.refine_seconds, run.wall_seconds,
             run.wall_seconds > 0.0 ? static_cast<double>(r.result.total_pairs) / run.wall_seconds : 0.0};
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Failure{kExitIo, "I/O error: cannot write " + path};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kExitIo, "I/O error: cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- generate ---------------------------------------------------------------

struct GenerateOptions {
  std::string dist;
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  std::uint64_t seed = 0;
  double rate = 40.0;
  std::string out;
  std::string format;
};

int cmd_generate(const GenerateOptions& o) {
  tedj_dataset* raw = nullptr;
  const auto dist = o.dist == "uniform" ? TEDJ_DIST_UNIFORM : TEDJ_DIST_EXPONENTIAL;
  check(tedj_dataset_generate(dist, o.n, o.d, o.seed, o.rate, &raw));
  DatasetPtr ds(raw);
  check(tedj_dataset_write(ds.get(), o.out.c_str(), format_for(o.out, o.format)));
  std::cout << "wrote " << tedj_dataset_size(ds.get()) << "x" << tedj_dataset_dims(ds.get()) << " to " << o.out
            << "\nchecksum " << tedjoin::report::hex64(tedj_dataset_checksum(ds.get())) << "\n";
  return kExitOk;
}

// --- join -------------------------------------------------------------------

int cmd_join(const JoinOptions& o, const std::string& emit_pairs, const std::string& report_path) {
  auto ds = load(o.input, o.format);
  const auto c = config_of(o, o.epsilon, o.kernel);
  const auto run = timed_join(ds.get(), c);
  if (!emit_pairs.empty()) check(tedj_result_write_pairs(run.result.get(), emit_pairs.c_str()));
  const auto report = tedjoin::report::to_json(make_report(o, c, ds.get(), run)).dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << report;
  } else {
    write_text(report_path, report);
    std::cout << "pairs " << tedj_result_pair_count(run.result.get()) << " selectivity "
              << tedj_result_selectivity(run.result.get()) << "\n";
  }
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

int cmd_verify(const JoinOptions& o, bool force, bool inject_fault) {
  auto ds = load(o.input, o.format);
  const auto c = config_of(o, o.epsilon, o.kernel);
  tedj_result* oracle_raw = nullptr;
  check(tedj_brute_force_join(ds.get(), o.epsilon, force ? 1 : 0, &oracle_raw));
  ResultPtr oracle(oracle_raw);
  auto run = timed_join(ds.get(), c);

  if (inject_fault) {
    // Drop the last cross pair (or the last pair, if there are none).
    const std::uint64_t count = tedj_result_pair_count(run.result.get());
    std::uint64_t victim = count - 1;
    for (std::uint64_t i = count; i-- > 0;) {
      std::uint32_t q = 0, nb = 0;
      check(tedj_result_pair(run.result.get(), i, &q, &nb, nullptr));
      if (q != nb) {
        victim = i;
        break;
      }
    }
    check(tedj_result_remove_pair(run.result.get(), victim));
  }

  struct Id {
    std::uint32_t q, n;
    bool operator<(const Id& o) const { return q != o.q ? q < o.q : n < o.n; }
    bool operator==(const Id&) const = default;
  };
  auto ids = [](const tedj_result* r) {
    std::vector<Id> out(tedj_result_pair_count(r));
    for (std::uint64_t i = 0; i < out.size(); ++i) check(tedj_result_pair(r, i, &out[i].q, &out[i].n, nullptr));
    return out;
  };
  const auto engine_ids = ids(run.result.get());
  const auto oracle_ids = ids(oracle.get());

  std::vector<std::pair<char, Id>> diff;
  std::size_t a = 0, b = 0;
  while (a < engine_ids.size() || b < oracle_ids.size()) {
    if (b == oracle_ids.size() || (a < engine_ids.size() && engine_ids[a] < oracle_ids[b])) {
      diff.push_back({'+', engine_ids[a++]});
    } else if (a == engine_ids.size() || oracle_ids[b] < engine_ids[a]) {
      diff.push_back({'-', oracle_ids[b++]});
    } else {
      ++a;
      ++b;
    }
  }
  std::cout << "engine pairs " << engine_ids.size() << ", oracle pairs " << oracle_ids.size() << "\n";
  if (diff.empty()) {
    std::cout << "OK: pair sets identical\n";
    return kExitOk;
  }
  std::cout << "MISMATCH: " << diff.size() << " differing pairs ('+' engine only, '-' oracle only)\n";
  for (std::size_t i = 0; i < diff.size() && i < kMaxListedDifferences; ++i)
    std::cout << diff[i].first << " " << diff[i].second.q << " " << diff[i].second.n << "\n";
  if (diff.size() > kMaxListedDifferences) std::cout << "... " << diff.size() - kMaxListedDifferences << " more\n";
  return kExitMismatch;
}

// --- bench ------------------------------------------------------------------

int cmd_bench(const JoinOptions& o, const std::vector<double>& epsilons, const std::vector<std::string>& kernels,
              std::uint64_t repeats, const std::vector<std::string>& report_inputs, const std::string& out_path,
              const std::string& csv_path) {
  tedjoin::report::BenchReport bench;
  if (!report_inputs.empty()) {
    std::vector<tedjoin::report::RunReport> runs;
    for (const auto& path : report_inputs) {
      try {
        runs.push_back(tedjoin::report::run_report_from_json(nlohmann::json::parse(read_text(path))));
      } catch (const Failure&) {
        throw;
      } catch (const std::exception& e) {
        throw Failure{kExitParse, "parse error: " + path + ": " + e.what()};
      }
    }
    bench.dataset = runs.front().dataset;
    bench.rows = tedjoin::report::aggregate(runs);
  } else {
    if (o.input.empty() || epsilons.empty())
      throw Failure{kExitUsage, "bench needs --input and --epsilons (or --reports)"};
    auto ds = load(o.input, o.format);
    bench.dataset = summary_of(ds.get(), o.input);
    for (double eps : epsilons) {
      for (const auto& kernel : kernels) {
        const auto c = config_of(o, eps, kernel);
        std::vector<double> times;
        tedjoin::report::BenchRow row;
        for (std::uint64_t r = 0; r < repeats; ++r) {
          const auto run = timed_join(ds.get(), c);
          times.push_back(run.wall_seconds);
          tedj_join_stats s;
          tedj_result_stats(run.result.get(), &s);
          row.total_pairs = tedj_result_pair_count(run.result.get());
          row.selectivity = tedj_result_selectivity(run.result.get());
          row.chunks_skipped = s.chunks_skipped;
        }
        row.epsilon = eps;
        row.kernel = kernel;
        row.repeats = repeats;
        row.median_seconds = tedjoin::report::median(times);
        row.pairs_per_second =
            row.median_seconds > 0.0 ? static_cast<double>(row.total_pairs) / row.median_seconds : 0.0;
        bench.rows.push_back(row);
      }
    }
    tedjoin::report::fill_speedups(bench.rows);
  }

  const auto json_text = tedjoin::report::to_json(bench).dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << json_text;
  } else {
    write_text(out_path, json_text);
  }
  if (!csv_path.empty()) write_text(csv_path, tedjoin::report::to_csv(bench));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tedjoin: epsilon self-join on software matrix-multiply-accumulate tiles"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset");
  generate->add_option("--dist", gen.dist, "Distribution")
      ->required()
      ->check(CLI::IsMember({"uniform", "expo", "exponential"}));
  generate->add_option("--n", gen.n, "Point count")->required()->check(CLI::PositiveNumber);
  generate->add_option("--d", gen.d, "Dimensionality")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "RNG seed")->required();
  generate->add_option("--rate", gen.rate, "Exponential rate")->check(CLI::PositiveNumber);
  generate->add_option("--out", gen.out, "Output path")->required();
  generate->add_option("--format", gen.format, "Output format (default: csv for .csv, else binary)")
      ->check(CLI::IsMember({"csv", "binary"}));

  JoinOptions join_opts;
  std::string emit_pairs, report_path;
  auto* join = app.add_subcommand("join", "Run the self-join");
  add_join_flags(join, join_opts, true, true);
  join->add_option("--emit-pairs", emit_pairs, "Write canonical 'i j sq_dist' lines");
  join->add_option("--report", report_path, "Write the JSON run report here instead of stdout");

  JoinOptions verify_opts;
  bool force = false, inject_fault = false;
  auto* verify = app.add_subcommand("verify", "Compare the self-join against the brute-force reference");
  add_join_flags(verify, verify_opts, true, true);
  verify->add_flag("--force", force, "Allow brute force beyond 50000 points");
  verify->add_flag("--inject-fault", inject_fault, "Drop one engine pair before comparing")->group("");

  JoinOptions bench_opts;
  std::vector<double> epsilons;
  std::vector<std::string> kernels{"tile", "scalar"};
  std::uint64_t repeats = 3;
  std::vector<std::string> report_inputs;
  std::string bench_out, bench_csv;
  auto* bench = app.add_subcommand("bench", "Time kernels over an epsilon sweep");
  bench->add_option("--input", bench_opts.input, "Dataset file");
  bench->add_option("--format", bench_opts.format, "Input format")->check(CLI::IsMember({"csv", "binary"}));
  bench->add_option("--epsilons", epsilons, "Comma-separated radii")->delimiter(',');
  bench->add_option("--kernels", kernels, "Comma-separated kernels")
      ->delimiter(',')
      ->check(CLI::IsMember({"tile", "scalar"}));
  bench->add_option("--repeats", repeats, "Repeats per (epsilon, kernel); the median is reported")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--no-short-circuit", bench_opts.no_short_circuit, "Disable short-circuiting");
  bench->add_option("--k-idx", bench_opts.k_idx, "Indexed dimensions");
  bench->add_option("--threads", bench_opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--reports", report_inputs, "Aggregate existing join reports instead of running");
  bench->add_option("--out", bench_out, "Write the JSON bench report here instead of stdout");
  bench->add_option("--csv", bench_csv, "Also write the rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*join) return cmd_join(join_opts, emit_pairs, report_path);
    if (*verify) return cmd_verify(verify_opts, force, inject_fault);
    if (*bench) return cmd_bench(bench_opts, epsilons, kernels, repeats, report_inputs, bench_out, bench_csv);
  } catch (const Failure& f) {
    std::cerr << "tedjoin: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "tedjoin: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
