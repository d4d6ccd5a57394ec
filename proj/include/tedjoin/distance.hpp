// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file distance.hpp
/// \brief Euclidean distance kernels built on the tile engine, plus the scalar
/// reference kernel.
///
/// All kernels work on squared distances; no square root is ever taken. The
/// join predicate dist <= eps is evaluated as sq_dist <= eps * eps.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tedjoin/dataset.hpp"
#include "tedjoin/tile.hpp"

namespace tedjoin {

/// Per point, one partial squared norm per 4-wide coordinate chunk.
/// Entry j of point p is the sum of squares of coordinates 4j .. 4j+3.
class ChunkNorms {
 public:
  ChunkNorms() = default;
  ChunkNorms(std::size_t points, std::size_t chunks)
      : points_(points), chunks_(chunks), values_(points * chunks, 0.0) {}

  std::size_t points() const { return points_; }
  std::size_t chunks() const { return chunks_; }
  std::size_t entry_count() const { return values_.size(); }

  std::span<const double> of(std::size_t point) const { return {values_.data() + point * chunks_, chunks_}; }
  std::span<double> of(std::size_t point) { return {values_.data() + point * chunks_, chunks_}; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const ChunkNorms&, const ChunkNorms&) = default;

 private:
  std::size_t points_ = 0;
  std::size_t chunks_ = 0;
  std::vector<double> values_;
};

/// Writes the chunk norms of one coordinate row into out (size chunk_count(row.size())).
/// Missing trailing coordinates of the last chunk count as zero.
void compute_chunk_norms(std::span<const double> row, std::span<double> out);

ChunkNorms precompute_chunk_norms(const Dataset& dataset);

/// Up to 8 points packed row-major with a common padded width, together with
/// their chunk norms.
struct PointBlock {
  std::span<const double> coords;  // count * padded_dim
  std::span<const double> norms;   // count * padded_dim / 4
  std::size_t count = 0;
  std::size_t padded_dim = 0;
};

/// 8x8 squared distances, row = query slot, column = candidate slot. Only
/// the leading valid_queries x valid_candidates block is meaningful.
struct DistanceTile {
  std::array<double, tile::kM * tile::kN> sq_dists{};
  std::size_t valid_queries = 0;
  std::size_t valid_candidates = 0;
  std::size_t chunks_total = 0;
  std::size_t chunks_executed = 0;
  /// Set when short-circuiting stopped evaluation early; entries then hold
  /// partial sums, every one of which already exceeds epsilon_sq.
  bool pruned = false;

  double at(std::size_t q, std::size_t c) const { return sq_dists[q * tile::kN + c]; }
};

/// Expanded-form kernel. Per chunk: D = (-2 Q) x C^T + N_c, where N_c holds
/// the candidate chunk norms replicated down the rows; the query chunk norm is
/// then added outside the tile: acc = (acc + D) + n_q. Final entries are
/// clamped at zero.
///
/// With short_circuit set, evaluation stops after any non-final chunk at
/// which every valid entry exceeds epsilon_sq.
DistanceTile distance_tile_v2(const PointBlock& queries, const PointBlock& candidates, double epsilon_sq,
                              bool short_circuit);

/// Difference-then-square kernel: one query against up to 8 candidates, two
/// mma passes per chunk. Only the diagonal of the product is a distance, so
/// the result holds one squared distance per candidate (size = candidates.size()).
std::vector<double> distance_tile_v1(std::span<const double> query,
                                     std::span<const std::span<const double>> candidates,
                                     const tile::TileB& identity = tile::leading_identity());

/// Unroll width of the scalar kernel: the short-circuit test runs once per
/// group of this many dimensions.
constexpr std::size_t scalar_unroll(std::size_t dims) { return dims < 8 ? dims : 8; }

/// Running sum of squared coordinate differences in ascending dimension
/// order. Returns nullopt when short_circuit is set and a partial sum already
/// exceeds epsilon_sq. dims_evaluated, when given, receives the number of
/// dimensions accumulated.
std::optional<double> scalar_distance_sq(std::span<const double> a, std::span<const double> b, double epsilon_sq,
                                         bool short_circuit, std::size_t* dims_evaluated = nullptr);

}  // namespace tedjoin
