// SPDX-License-Identifier: Apache-2.0
#include "tedjoin/self_join.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>

#include "tedjoin/distance.hpp"
#include "tedjoin/error.hpp"

namespace tedjoin {

namespace {

constexpr std::size_t kTileWidth = 8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t candidate_count(const GridIndex& index, std::size_t cell) {
  std::uint64_t total = 0;
  for (std::size_t nb : index.neighbor_cell_indices(index.cells()[cell].coord)) total += index.cells()[nb].size();
  return total;
}

void add(JoinStats& into, const JoinStats& from) {
  into.tiles_processed += from.tiles_processed;
  into.chunks_executed += from.chunks_executed;
  into.chunks_skipped += from.chunks_skipped;
  into.candidates_refined += from.candidates_refined;
  into.pairs_emitted += from.pairs_emitted;
}

struct Prepared {
  Dataset reordered;  // only populated when reorder_dims is set
  const Dataset* data = nullptr;
  ChunkNorms norms;
  GridIndex index;
};

// Per-thread scratch and output.
struct Worker {
  std::vector<double> query_coords, query_norms, cand_coords, cand_norms;
  std::vector<PointId> candidates;
  std::vector<NeighborPair> pairs;
  std::vector<TileEvent> events;
  JoinStats stats;
};

void gather(const Dataset& data, const ChunkNorms& norms, std::span<const PointId> ids, std::vector<double>& coords,
            std::vector<double>& norm_out) {
  const std::size_t width = data.padded();
  const std::size_t chunks = data.chunks();
  coords.resize(ids.size() * width);
  norm_out.resize(ids.size() * chunks);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto row = data.row(ids[i]);
    std::copy(row.begin(), row.end(), coords.begin() + i * width);
    auto nr = norms.of(ids[i]);
    std::copy(nr.begin(), nr.end(), norm_out.begin() + i * chunks);
  }
}

void refine_cell(const Prepared& p, const JoinConfig& config, double eps_sq, std::size_t batch, std::size_t cell,
                 bool record_events, Worker& w) {
  const Dataset& data = *p.data;
  const auto members = p.index.members(cell);
  w.candidates.clear();
  for (std::size_t nb : p.index.neighbor_cell_indices(p.index.cells()[cell].coord)) {
    auto m = p.index.members(nb);
    w.candidates.insert(w.candidates.end(), m.begin(), m.end());
  }
  const std::span<const PointId> cands(w.candidates);
  w.stats.candidates_refined += static_cast<std::uint64_t>(members.size()) * cands.size();

  const std::size_t width = data.padded();
  const std::size_t chunks = data.chunks();
  const bool tile_kernel = config.kernel == Kernel::Tile;
  if (tile_kernel) {
    gather(data, p.norms, members, w.query_coords, w.query_norms);
    gather(data, p.norms, cands, w.cand_coords, w.cand_norms);
  }

  for (std::size_t q0 = 0, group = 0; q0 < members.size(); q0 += kTileWidth, ++group) {
    const std::size_t nq = std::min(kTileWidth, members.size() - q0);
    const PointBlock qblock{std::span<const double>(w.query_coords).subspan(q0 * width, tile_kernel ? nq * width : 0),
                            std::span<const double>(w.query_norms).subspan(q0 * chunks, tile_kernel ? nq * chunks : 0),
                            nq, width};
    for (std::size_t c0 = 0, block = 0; c0 < cands.size(); c0 += kTileWidth, ++block) {
      const std::size_t nc = std::min(kTileWidth, cands.size() - c0);
      TileEvent ev{batch, cell, group, block, nq, nc, 0, 0, 0, false};
      const std::size_t emitted_before = w.pairs.size();

      if (tile_kernel) {
        const PointBlock cblock{std::span<const double>(w.cand_coords).subspan(c0 * width, nc * width),
                                std::span<const double>(w.cand_norms).subspan(c0 * chunks, nc * chunks), nc, width};
        const DistanceTile t = distance_tile_v2(qblock, cblock, eps_sq, config.short_circuit);
        ev.chunks_executed = t.chunks_executed;
        ev.chunks_skipped = t.chunks_total - t.chunks_executed;
        ev.pruned = t.pruned;
        if (!t.pruned) {
          for (std::size_t q = 0; q < nq; ++q)
            for (std::size_t c = 0; c < nc; ++c) {
              const double sq = t.at(q, c);
              if (sq <= eps_sq) w.pairs.push_back({members[q0 + q], cands[c0 + c], sq});
            }
        }
      } else {
        bool all_pruned = true;
        for (std::size_t q = 0; q < nq; ++q) {
          const auto a = data.point(members[q0 + q]);
          for (std::size_t c = 0; c < nc; ++c) {
            std::size_t dims = 0;
            const auto sq = scalar_distance_sq(a, data.point(cands[c0 + c]), eps_sq, config.short_circuit, &dims);
            const std::size_t done = chunk_count(dims);
            ev.chunks_executed += done;
            ev.chunks_skipped += chunks - done;
            if (sq) all_pruned = false;
            if (sq && *sq <= eps_sq) w.pairs.push_back({members[q0 + q], cands[c0 + c], *sq});
          }
        }
        ev.pruned = all_pruned && config.short_circuit;
      }

      ev.pairs_emitted = w.pairs.size() - emitted_before;
      ++w.stats.tiles_processed;
      w.stats.chunks_executed += ev.chunks_executed;
      w.stats.chunks_skipped += ev.chunks_skipped;
      w.stats.pairs_emitted += ev.pairs_emitted;
      if (record_events) w.events.push_back(ev);
    }
  }
}

Prepared prepare(const Dataset& dataset, const JoinConfig& config) {
  if (dataset.size() == 0) fail(ErrorKind::Validation, "dataset is empty");
  if (dataset.size() > std::numeric_limits<PointId>::max())
    fail(ErrorKind::Validation, "dataset has more points than the 32-bit id space");
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
    fail(ErrorKind::Validation, "epsilon must be positive and finite");
  if (config.batch_size < 1) fail(ErrorKind::Validation, "batch_size must be at least 1");
  if (config.thread_count < 1) fail(ErrorKind::Validation, "thread_count must be at least 1");

  Prepared p;
  if (config.reorder_dims) {
    p.reordered = reorder_dims_by_variance(dataset).dataset;
    p.data = &p.reordered;
  } else {
    p.data = &dataset;
  }
  const std::size_t k_idx = config.k_idx == 0 ? default_k_idx(dataset.dims()) : config.k_idx;
  if (config.kernel == Kernel::Tile) p.norms = precompute_chunk_norms(*p.data);
  p.index = GridIndex::build(*p.data, config.epsilon, k_idx);
  return p;
}

}  // namespace

BatchPlan plan_batches(const GridIndex& index, const JoinConfig& config) {
  BatchPlan plan;
  const std::size_t limit = std::max<std::size_t>(config.batch_size, 1);
  BatchPlan::Batch current;
  for (std::size_t cell = 0; cell < index.cell_count(); ++cell) {
    current.estimated_pairs += static_cast<std::uint64_t>(index.cells()[cell].size()) * candidate_count(index, cell);
    current.end_cell = cell + 1;
    if (current.estimated_pairs >= limit) {
      plan.batches.push_back(current);
      current = BatchPlan::Batch{cell + 1, cell + 1, 0};
    }
  }
  if (current.end_cell > current.first_cell) plan.batches.push_back(current);
  return plan;
}

JoinStats self_join_stream(const Dataset& dataset, const JoinConfig& config, const PairSink& sink,
                           const TileObserver& observer) {
  JoinStats stats;
  const auto index_start = Clock::now();
  const Prepared p = prepare(dataset, config);
  const BatchPlan plan = plan_batches(p.index, config);
  stats.index_seconds = seconds_since(index_start);
  stats.cells = p.index.cell_count();
  stats.batches = plan.batches.size();

  const double eps_sq = config.epsilon * config.epsilon;
  const std::size_t threads = config.thread_count;
  const bool record_events = static_cast<bool>(observer);
  std::vector<Worker> workers(threads);

  std::size_t batch = 0;
  std::atomic<std::size_t> next_cell{plan.batches.front().first_cell};
  std::atomic<bool> abort{false};
  // Written only by the barrier completion, so every worker sees the same value.
  bool stop = false;
  std::exception_ptr error;
  std::mutex error_mutex;
  std::uint64_t total_pairs = 0;
  std::vector<NeighborPair> merged;
  std::vector<TileEvent> events;

  auto record_error = [&](std::exception_ptr e) {
    std::lock_guard lock(error_mutex);
    if (!error) error = e;
    abort = true;
  };

  // Runs once per batch after every worker has drained the batch's cells.
  auto finish_batch = [&]() noexcept {
    try {
      if (!abort) {
        merged.clear();
        events.clear();
        for (Worker& w : workers) {
          merged.insert(merged.end(), w.pairs.begin(), w.pairs.end());
          events.insert(events.end(), w.events.begin(), w.events.end());
          add(stats, w.stats);
          w.pairs.clear();
          w.events.clear();
          w.stats = JoinStats{};
        }
        canonicalize(merged);
        total_pairs += merged.size();
        if (config.max_result_pairs != 0 && total_pairs > config.max_result_pairs) {
          fail(ErrorKind::Resource, "batch " + std::to_string(batch) + ": result of " + std::to_string(total_pairs) +
                                        " pairs exceeds capacity of " + std::to_string(config.max_result_pairs));
        }
        if (record_events) {
          std::sort(events.begin(), events.end(), [](const TileEvent& a, const TileEvent& b) {
            return std::tie(a.cell, a.query_group, a.candidate_block) <
                   std::tie(b.cell, b.query_group, b.candidate_block);
          });
          for (const auto& ev : events) observer(ev);
        }
        if (sink) sink(batch, merged);
      }
    } catch (...) {
      record_error(std::current_exception());
    }
    ++batch;
    stop = abort || batch == plan.batches.size();
    if (!stop) next_cell = plan.batches[batch].first_cell;
  };
  std::barrier sync(static_cast<std::ptrdiff_t>(threads), finish_batch);

  auto run = [&](Worker& w) {
    while (!stop) {
      const auto& b = plan.batches[batch];
      try {
        for (std::size_t cell = next_cell++; cell < b.end_cell && !abort; cell = next_cell++)
          refine_cell(p, config, eps_sq, batch, cell, record_events, w);
      } catch (...) {
        record_error(std::current_exception());
      }
      sync.arrive_and_wait();
    }
  };

  const auto refine_start = Clock::now();
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run, std::ref(workers[t]));
  run(workers[0]);
  pool.clear();
  stats.refine_seconds = seconds_since(refine_start);

  if (error) std::rethrow_exception(error);
  return stats;
}

JoinResult self_join(const Dataset& dataset, const JoinConfig& config, const TileObserver& observer) {
  JoinResult result;
  result.stats = self_join_stream(
      dataset, config,
      [&](std::size_t, std::span<const NeighborPair> pairs) {
        result.pairs.insert(result.pairs.end(), pairs.begin(), pairs.end());
      },
      observer);
  canonicalize(result.pairs);
  result.total_pairs = result.pairs.size();
  result.selectivity = selectivity(result.total_pairs, dataset.size());
  return result;
}

}  // namespace tedjoin
