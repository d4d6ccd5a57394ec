// SPDX-License-Identifier: Apache-2.0
#include "tedjoin/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tedjoin/error.hpp"

namespace tedjoin {

using tile::kK;
using tile::kM;
using tile::kN;

void compute_chunk_norms(std::span<const double> row, std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    double sum = 0.0;
    const std::size_t end = std::min(row.size(), 4 * j + 4);
    for (std::size_t i = 4 * j; i < end; ++i) sum += row[i] * row[i];
    out[j] = sum;
  }
}

ChunkNorms precompute_chunk_norms(const Dataset& dataset) {
  if (dataset.size() == 0) fail(ErrorKind::Validation, "cannot precompute chunk norms of an empty dataset");
  ChunkNorms norms(dataset.size(), dataset.chunks());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto row = dataset.row(i);
    for (std::size_t j = 0; j < dataset.dims(); ++j) {
      if (!std::isfinite(row[j])) {
        fail(ErrorKind::Validation, "non-finite coordinate at point " + std::to_string(i) + ", dimension " +
                                        std::to_string(j));
      }
    }
    compute_chunk_norms(row, norms.of(i));
  }
  return norms;
}

namespace {

void check_block(const PointBlock& block, const char* what) {
  if (block.count > 8) fail(ErrorKind::Validation, std::string(what) + " block holds more than 8 points");
  if (block.padded_dim == 0 || block.padded_dim % 4 != 0)
    fail(ErrorKind::Validation, std::string(what) + " block width must be a positive multiple of 4");
  if (block.coords.size() != block.count * block.padded_dim)
    fail(ErrorKind::Validation, std::string(what) + " block coordinate slice does not match count x width");
  if (block.norms.size() != block.count * (block.padded_dim / 4))
    fail(ErrorKind::Validation, std::string(what) + " norm slice does not match count x chunks");
}

// 8x4 operand holding chunk j of each query row; rows past count stay zero.
tile::TileA load_queries(const PointBlock& q, std::size_t j) {
  if (q.count == kM) return tile::load_row_major<tile::TileA>(q.coords, 4 * j, q.padded_dim);
  std::array<double, kM * kK> stage{};
  for (std::size_t r = 0; r < q.count; ++r)
    std::copy_n(q.coords.data() + r * q.padded_dim + 4 * j, kK, stage.data() + r * kK);
  return tile::load_row_major<tile::TileA>(stage, 0, kK);
}

// 4x8 operand whose column c is chunk j of candidate c.
tile::TileB load_candidates(const PointBlock& c, std::size_t j) {
  if (c.count == kN) return tile::load_col_major<tile::TileB>(c.coords, 4 * j, c.padded_dim);
  std::array<double, kK * kN> stage{};
  for (std::size_t col = 0; col < c.count; ++col)
    std::copy_n(c.coords.data() + col * c.padded_dim + 4 * j, kK, stage.data() + col * kK);
  return tile::load_col_major<tile::TileB>(stage, 0, kK);
}

}  // namespace

DistanceTile distance_tile_v2(const PointBlock& queries, const PointBlock& candidates, double epsilon_sq,
                              bool short_circuit) {
  check_block(queries, "query");
  check_block(candidates, "candidate");
  if (queries.padded_dim != candidates.padded_dim)
    fail(ErrorKind::Validation, "query and candidate blocks differ in dimensionality");
  if (!(epsilon_sq >= 0.0)) fail(ErrorKind::Validation, "epsilon_sq must be non-negative");

  const std::size_t chunks = queries.padded_dim / 4;
  DistanceTile out;
  out.valid_queries = queries.count;
  out.valid_candidates = candidates.count;
  out.chunks_total = chunks;

  std::array<double, kM> query_norm{};
  std::array<double, kN> cand_norm{};
  for (std::size_t j = 0; j < chunks; ++j) {
    tile::TileA a = load_queries(queries, j);
    const tile::TileB b = load_candidates(candidates, j);
    for (std::size_t c = 0; c < candidates.count; ++c) cand_norm[c] = candidates.norms[c * chunks + j];
    for (std::size_t r = 0; r < queries.count; ++r) query_norm[r] = queries.norms[r * chunks + j];
    const auto c_tile = tile::load_row_major<tile::TileAcc>(cand_norm, 0, 0);

    tile::scale(a, -2.0);
    const tile::TileAcc d = tile::mma(a, b, c_tile);
    for (std::size_t r = 0; r < kM; ++r)
      for (std::size_t c = 0; c < kN; ++c) {
        double& acc = out.sq_dists[r * kN + c];
        acc = (acc + d(r, c)) + query_norm[r];
      }
    ++out.chunks_executed;

    if (short_circuit && j + 1 < chunks) {
      bool all_beyond = true;
      for (std::size_t r = 0; r < queries.count && all_beyond; ++r)
        for (std::size_t c = 0; c < candidates.count; ++c)
          if (!(out.sq_dists[r * kN + c] > epsilon_sq)) {
            all_beyond = false;
            break;
          }
      if (all_beyond) {
        out.pruned = true;
        return out;
      }
    }
  }
  for (double& v : out.sq_dists) v = std::max(0.0, v);
  return out;
}

std::vector<double> distance_tile_v1(std::span<const double> query,
                                     std::span<const std::span<const double>> candidates,
                                     const tile::TileB& identity) {
  if (candidates.size() > kN) fail(ErrorKind::Validation, "at most 8 candidates per tile");
  for (const auto& c : candidates) {
    if (c.size() != query.size())
      fail(ErrorKind::Validation, "candidate dimensionality " + std::to_string(c.size()) +
                                      " does not match query dimensionality " + std::to_string(query.size()));
  }
  const std::size_t chunks = chunk_count(query.size());

  tile::TileAcc dist;
  tile::fill(dist, 0.0);
  std::array<double, kK> query_chunk{};
  std::array<double, kM * kN> cand_rows{};
  std::array<double, kM * kN> diff{};
  for (std::size_t j = 0; j < chunks; ++j) {
    const std::size_t width = std::min(kK, query.size() - 4 * j);
    query_chunk.fill(0.0);
    std::copy_n(query.data() + 4 * j, width, query_chunk.data());
    cand_rows.fill(0.0);
    for (std::size_t r = 0; r < candidates.size(); ++r)
      std::copy_n(candidates[r].data() + 4 * j, width, cand_rows.data() + r * kN);

    // Query chunk replicated down every row; candidate chunks as negated rows.
    const auto a = tile::load_row_major<tile::TileA>(query_chunk, 0, 0);
    auto b = tile::load_row_major<tile::TileAcc>(cand_rows, 0, kN);
    tile::scale(b, -1.0);
    const tile::TileAcc difference = tile::mma(a, identity, b);

    tile::store(difference, std::span<double>(diff), 0, kN);
    const auto lhs = tile::load_row_major<tile::TileA>(diff, 0, kN);
    const auto rhs = tile::load_col_major<tile::TileB>(diff, 0, kN);
    dist = tile::mma(lhs, rhs, dist);
  }

  std::vector<double> out(candidates.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dist(i, i);
  return out;
}

std::optional<double> scalar_distance_sq(std::span<const double> a, std::span<const double> b, double epsilon_sq,
                                         bool short_circuit, std::size_t* dims_evaluated) {
  if (a.size() != b.size())
    fail(ErrorKind::Validation, "dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
  const std::size_t d = a.size();
  const std::size_t unroll = scalar_unroll(d);
  double sum = 0.0;
  std::size_t i = 0;
  while (i < d) {
    const std::size_t end = std::min(d, i + unroll);
    for (; i < end; ++i) {
      const double diff = a[i] - b[i];
      sum += diff * diff;
    }
    if (short_circuit && sum > epsilon_sq) {
      if (dims_evaluated) *dims_evaluated = i;
      return std::nullopt;
    }
  }
  if (dims_evaluated) *dims_evaluated = d;
  return sum;
}

}  // namespace tedjoin
