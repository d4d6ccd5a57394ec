// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "tedjoin/dataset.hpp"

namespace tedjoin {

/// One join result: neighbor lies within epsilon of query.
struct NeighborPair {
  PointId query = 0;
  PointId neighbor = 0;
  double sq_dist = 0.0;
};

/// Orders by (query, neighbor); sq_dist does not participate.
inline bool id_less(const NeighborPair& a, const NeighborPair& b) {
  return a.query != b.query ? a.query < b.query : a.neighbor < b.neighbor;
}

inline bool same_ids(const NeighborPair& a, const NeighborPair& b) {
  return a.query == b.query && a.neighbor == b.neighbor;
}

inline void canonicalize(std::vector<NeighborPair>& pairs) { std::sort(pairs.begin(), pairs.end(), id_less); }

/// True when both canonical lists hold the same (query, neighbor) ids.
inline bool same_pair_set(std::span<const NeighborPair> a, std::span<const NeighborPair> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), same_ids);
}

/// (|R| - n) / n: mean neighbors per point, excluding the point itself.
inline double selectivity(std::size_t total_pairs, std::size_t n) {
  return (static_cast<double>(total_pairs) - static_cast<double>(n)) / static_cast<double>(n);
}

}  // namespace tedjoin
