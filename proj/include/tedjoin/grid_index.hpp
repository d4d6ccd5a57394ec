// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tedjoin/dataset.hpp"

namespace tedjoin {

/// floor(p_j / eps) over the indexed dimensions.
using CellCoord = std::vector<std::int64_t>;

struct CellCoordHash {
  std::size_t operator()(const CellCoord& c) const noexcept;
};

/// Largest number of leading dimensions indexed by default; bounds neighbor
/// enumeration at 3^6 = 729 cells.
inline constexpr std::size_t kMaxDefaultIndexedDims = 6;

constexpr std::size_t default_k_idx(std::size_t dims) {
  return dims < kMaxDefaultIndexedDims ? dims : kMaxDefaultIndexedDims;
}

/// Sparse epsilon-width grid over the first k_idx dimensions. Only occupied
/// cells are stored. Cells are kept in lexicographic coordinate order and
/// point_order lists the members of each cell contiguously, ids ascending.
class GridIndex {
 public:
  struct Cell {
    CellCoord coord;
    std::size_t begin = 0;  // range into point_order
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
  };

  /// Throws a validation error if epsilon is not positive and finite, k_idx is
  /// outside [1, d], or a coordinate falls outside the representable cell range.
  static GridIndex build(const Dataset& dataset, double epsilon, std::size_t k_idx);

  double epsilon() const { return epsilon_; }
  std::size_t k_idx() const { return k_idx_; }
  std::size_t cell_count() const { return cells_.size(); }
  std::span<const Cell> cells() const { return cells_; }
  std::span<const PointId> point_order() const { return point_order_; }
  std::span<const PointId> members(std::size_t cell_index) const;

  std::optional<std::size_t> find(const CellCoord& coord) const;
  CellCoord cell_of(std::span<const double> point) const;

  /// Occupied cells within Chebyshev distance 1 of coord, lexicographic.
  std::vector<CellCoord> neighbor_cells(const CellCoord& coord) const;
  std::vector<std::size_t> neighbor_cell_indices(const CellCoord& coord) const;

  /// Members of all neighbor cells, in cell order then id order. Throws a
  /// validation error when coord is not an occupied cell.
  std::vector<PointId> candidates_for_cell(const CellCoord& coord) const;

  friend bool operator==(const GridIndex& a, const GridIndex& b);

 private:
  double epsilon_ = 0.0;
  std::size_t k_idx_ = 0;
  std::vector<Cell> cells_;
  std::vector<PointId> point_order_;
  std::unordered_map<CellCoord, std::size_t, CellCoordHash> lookup_;
};

inline bool operator==(const GridIndex::Cell& a, const GridIndex::Cell& b) {
  return a.coord == b.coord && a.begin == b.begin && a.end == b.end;
}

}  // namespace tedjoin
