// SPDX-License-Identifier: Apache-2.0
#include "tedjoin/tedjoin.h"

#include <cstdio>
#include <exception>
#include <fstream>
#include <new>
#include <string>

#include "tedjoin/dataset.hpp"
#include "tedjoin/error.hpp"
#include "tedjoin/oracle.hpp"
#include "tedjoin/self_join.hpp"

struct tedj_dataset {
  tedjoin::Dataset value;
};

struct tedj_result {
  std::vector<tedjoin::NeighborPair> pairs;
  std::size_t n = 0;
  tedjoin::JoinStats stats;
};

namespace {

thread_local std::string last_error;

tedj_status status_of(tedjoin::ErrorKind kind) {
  switch (kind) {
    case tedjoin::ErrorKind::Validation: return TEDJ_ERR_VALIDATION;
    case tedjoin::ErrorKind::Bounds: return TEDJ_ERR_BOUNDS;
    case tedjoin::ErrorKind::Parse: return TEDJ_ERR_PARSE;
    case tedjoin::ErrorKind::Io: return TEDJ_ERR_IO;
    case tedjoin::ErrorKind::Resource: return TEDJ_ERR_RESOURCE;
  }
  return TEDJ_ERR_INTERNAL;
}

template <class F>
tedj_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return TEDJ_OK;
  } catch (const tedjoin::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TEDJ_ERR_RESOURCE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TEDJ_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TEDJ_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (!ptr) tedjoin::fail(tedjoin::ErrorKind::Validation, std::string(what) + " must not be null");
}

tedjoin::FileFormat to_format(tedj_format format) {
  switch (format) {
    case TEDJ_FORMAT_CSV: return tedjoin::FileFormat::Csv;
    case TEDJ_FORMAT_BINARY: return tedjoin::FileFormat::Binary;
  }
  tedjoin::fail(tedjoin::ErrorKind::Validation, "unknown file format");
}

}  // namespace

extern "C" {

const char* tedj_version(void) { return "1.0.0"; }

const char* tedj_last_error(void) { return last_error.c_str(); }

const char* tedj_status_string(tedj_status status) {
  switch (status) {
    case TEDJ_OK: return "ok";
    case TEDJ_ERR_VALIDATION: return "validation error";
    case TEDJ_ERR_BOUNDS: return "bounds error";
    case TEDJ_ERR_PARSE: return "parse error";
    case TEDJ_ERR_IO: return "I/O error";
    case TEDJ_ERR_RESOURCE: return "resource error";
    case TEDJ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

tedj_status tedj_dataset_from_rows(const double* coords, uint64_t n, uint64_t d, tedj_dataset** out) {
  return guarded([&] {
    require(out, "out");
    if (n * d != 0) require(coords, "coords");
    auto ds = tedjoin::Dataset::from_rows(std::span<const double>(coords, n * d), n, d);
    *out = new tedj_dataset{std::move(ds)};
  });
}

tedj_status tedj_dataset_generate(tedj_distribution dist, uint64_t n, uint64_t d, uint64_t seed, double rate,
                                  tedj_dataset** out) {
  return guarded([&] {
    require(out, "out");
    tedjoin::GenSpec spec;
    switch (dist) {
      case TEDJ_DIST_UNIFORM: spec.distribution = tedjoin::Distribution::Uniform; break;
      case TEDJ_DIST_EXPONENTIAL: spec.distribution = tedjoin::Distribution::Exponential; break;
      default: tedjoin::fail(tedjoin::ErrorKind::Validation, "unknown distribution");
    }
    spec.n = n;
    spec.d = d;
    spec.seed = seed;
    spec.rate = rate;
    *out = new tedj_dataset{tedjoin::generate(spec)};
  });
}

tedj_status tedj_dataset_read(const char* path, tedj_format format, tedj_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new tedj_dataset{tedjoin::read_dataset(path, to_format(format))};
  });
}

tedj_status tedj_dataset_write(const tedj_dataset* dataset, const char* path, tedj_format format) {
  return guarded([&] {
    require(dataset, "dataset");
    require(path, "path");
    tedjoin::write_dataset(dataset->value, path, to_format(format));
  });
}

uint64_t tedj_dataset_size(const tedj_dataset* dataset) { return dataset ? dataset->value.size() : 0; }
uint64_t tedj_dataset_dims(const tedj_dataset* dataset) { return dataset ? dataset->value.dims() : 0; }
uint64_t tedj_dataset_checksum(const tedj_dataset* dataset) { return dataset ? dataset->value.checksum() : 0; }

tedj_status tedj_dataset_point(const tedj_dataset* dataset, uint64_t i, double* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    if (i >= dataset->value.size())
      tedjoin::fail(tedjoin::ErrorKind::Bounds, "point index " + std::to_string(i) + " out of range");
    auto p = dataset->value.point(i);
    std::copy(p.begin(), p.end(), out);
  });
}

void tedj_dataset_free(tedj_dataset* dataset) { delete dataset; }

void tedj_join_config_init(tedj_join_config* config) {
  if (!config) return;
  config->epsilon = 0.0;
  config->kernel = TEDJ_KERNEL_TILE;
  config->short_circuit = 1;
  config->k_idx = 0;
  config->batch_size = TEDJ_UNBOUNDED_BATCH;
  config->threads = 1;
  config->reorder_dims = 0;
  config->max_result_pairs = 0;
}

tedj_status tedj_self_join(const tedj_dataset* dataset, const tedj_join_config* config, tedj_result** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(config, "config");
    require(out, "out");
    tedjoin::JoinConfig cfg;
    cfg.epsilon = config->epsilon;
    switch (config->kernel) {
      case TEDJ_KERNEL_TILE: cfg.kernel = tedjoin::Kernel::Tile; break;
      case TEDJ_KERNEL_SCALAR: cfg.kernel = tedjoin::Kernel::Scalar; break;
      default: tedjoin::fail(tedjoin::ErrorKind::Validation, "unknown kernel");
    }
    cfg.short_circuit = config->short_circuit != 0;
    cfg.k_idx = config->k_idx;
    cfg.batch_size = config->batch_size >= SIZE_MAX ? tedjoin::kUnboundedBatch : config->batch_size;
    cfg.thread_count = config->threads;
    cfg.reorder_dims = config->reorder_dims != 0;
    cfg.max_result_pairs = config->max_result_pairs;
    auto joined = tedjoin::self_join(dataset->value, cfg);
    *out = new tedj_result{std::move(joined.pairs), dataset->value.size(), joined.stats};
  });
}

tedj_status tedj_brute_force_join(const tedj_dataset* dataset, double epsilon, int force, tedj_result** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    auto pairs = tedjoin::oracle::brute_force_join(dataset->value, epsilon, force != 0);
    *out = new tedj_result{std::move(pairs), dataset->value.size(), {}};
  });
}

uint64_t tedj_result_pair_count(const tedj_result* result) { return result ? result->pairs.size() : 0; }

tedj_status tedj_result_pair(const tedj_result* result, uint64_t index, uint32_t* query, uint32_t* neighbor,
                             double* sq_dist) {
  return guarded([&] {
    require(result, "result");
    if (index >= result->pairs.size())
      tedjoin::fail(tedjoin::ErrorKind::Bounds, "pair index " + std::to_string(index) + " out of range");
    const auto& p = result->pairs[index];
    if (query) *query = p.query;
    if (neighbor) *neighbor = p.neighbor;
    if (sq_dist) *sq_dist = p.sq_dist;
  });
}

double tedj_result_selectivity(const tedj_result* result) {
  return result ? tedjoin::selectivity(result->pairs.size(), result->n) : 0.0;
}

void tedj_result_stats(const tedj_result* result, tedj_join_stats* out) {
  if (!out) return;
  *out = tedj_join_stats{};
  if (!result) return;
  const auto& s = result->stats;
  *out = tedj_join_stats{s.cells,          s.batches,       s.tiles_processed, s.chunks_executed,
                         s.chunks_skipped, s.candidates_refined, s.pairs_emitted, s.index_seconds,
                         s.refine_seconds, s.throughput()};
}

tedj_status tedj_result_write_pairs(const tedj_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    require(path, "path");
    std::ofstream out(path, std::ios::trunc);
    if (!out) tedjoin::fail(tedjoin::ErrorKind::Io, std::string("cannot open ") + path + " for writing");
    char line[96];
    for (const auto& p : result->pairs) {
      const int len = std::snprintf(line, sizeof line, "%u %u %.17g\n", p.query, p.neighbor, p.sq_dist);
      out.write(line, len);
    }
    out.flush();
    if (!out) tedjoin::fail(tedjoin::ErrorKind::Io, std::string("failed writing ") + path);
  });
}

tedj_status tedj_result_remove_pair(tedj_result* result, uint64_t index) {
  return guarded([&] {
    require(result, "result");
    if (index >= result->pairs.size())
      tedjoin::fail(tedjoin::ErrorKind::Bounds, "pair index " + std::to_string(index) + " out of range");
    result->pairs.erase(result->pairs.begin() + static_cast<std::ptrdiff_t>(index));
  });
}

void tedj_result_free(tedj_result* result) { delete result; }

}  // extern "C"
