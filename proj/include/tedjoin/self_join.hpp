// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file self_join.hpp
/// \brief Grid-indexed epsilon self-join refined with the expanded-form tile
/// kernel (or the scalar kernel, for comparison).
///
/// Queries are taken from one cell at a time, up to 8 per tile, so every tile
/// shares the cell's candidate list. Candidates stream through the kernel in
/// blocks of 8. The pair set never depends on kernel, short-circuiting, batch
/// size, thread count or dimension reordering.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "tedjoin/dataset.hpp"
#include "tedjoin/grid_index.hpp"
#include "tedjoin/pairs.hpp"

namespace tedjoin {

enum class Kernel { Tile, Scalar };

inline constexpr std::size_t kUnboundedBatch = std::numeric_limits<std::size_t>::max();

struct JoinConfig {
  double epsilon = 0.0;
  Kernel kernel = Kernel::Tile;
  bool short_circuit = true;
  /// Indexed dimensions; 0 selects default_k_idx(d).
  std::size_t k_idx = 0;
  /// Target estimated pair evaluations (cell size x candidate count) per batch.
  std::size_t batch_size = kUnboundedBatch;
  std::size_t thread_count = 1;
  bool reorder_dims = false;
  /// Result capacity in pairs; 0 means unlimited.
  std::size_t max_result_pairs = 0;
};

struct JoinStats {
  std::uint64_t cells = 0;
  std::uint64_t batches = 0;
  std::uint64_t tiles_processed = 0;
  std::uint64_t chunks_executed = 0;
  std::uint64_t chunks_skipped = 0;
  std::uint64_t candidates_refined = 0;
  std::uint64_t pairs_emitted = 0;
  double index_seconds = 0.0;
  double refine_seconds = 0.0;

  /// Candidate pairs refined per second of refinement.
  double throughput() const {
    return refine_seconds > 0.0 ? static_cast<double>(candidates_refined) / refine_seconds : 0.0;
  }
};

/// One (query group, candidate block) evaluation.
struct TileEvent {
  std::size_t batch = 0;
  std::size_t cell = 0;
  std::size_t query_group = 0;
  std::size_t candidate_block = 0;
  std::size_t queries = 0;
  std::size_t candidates = 0;
  std::size_t chunks_executed = 0;
  std::size_t chunks_skipped = 0;
  std::size_t pairs_emitted = 0;
  bool pruned = false;
};

struct BatchPlan {
  struct Batch {
    std::size_t first_cell = 0;
    std::size_t end_cell = 0;  // exclusive, in GridIndex::cells() order
    std::uint64_t estimated_pairs = 0;
  };
  std::vector<Batch> batches;
};

/// Greedy split of the cells, in index order, closing a batch as soon as its
/// estimate reaches config.batch_size.
BatchPlan plan_batches(const GridIndex& index, const JoinConfig& config);

struct JoinResult {
  std::vector<NeighborPair> pairs;  // sorted by (query, neighbor)
  std::uint64_t total_pairs = 0;
  double selectivity = 0.0;
  JoinStats stats;
};

/// Receives each finished batch, pairs sorted by (query, neighbor).
using PairSink = std::function<void(std::size_t batch, std::span<const NeighborPair>)>;
/// Receives tile events in deterministic (batch, cell, group, block) order.
using TileObserver = std::function<void(const TileEvent&)>;

/// Streaming form: memory is bounded by one batch of pairs.
JoinStats self_join_stream(const Dataset& dataset, const JoinConfig& config, const PairSink& sink,
                           const TileObserver& observer = {});

JoinResult self_join(const Dataset& dataset, const JoinConfig& config, const TileObserver& observer = {});

}  // namespace tedjoin
