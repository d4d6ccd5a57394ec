// SPDX-License-Identifier: Apache-2.0
#include "tedjoin/grid_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tedjoin/error.hpp"

namespace tedjoin {

namespace {

// Keeps neighbor offsets (+-1) well inside int64.
constexpr double kMaxCellMagnitude = 0x1.0p62;

std::int64_t cell_component(double coord, double epsilon, std::size_t point, std::size_t dim) {
  const double cell = std::floor(coord / epsilon);
  if (!(std::abs(cell) < kMaxCellMagnitude)) {
    fail(ErrorKind::Validation, "coordinate of point " + std::to_string(point) + ", dimension " +
                                    std::to_string(dim) + " is out of grid range for epsilon");
  }
  return static_cast<std::int64_t>(cell);
}

}  // namespace

std::size_t CellCoordHash::operator()(const CellCoord& c) const noexcept {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL;
  for (std::int64_t v : c) {
    h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

GridIndex GridIndex::build(const Dataset& dataset, double epsilon, std::size_t k_idx) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    fail(ErrorKind::Validation, "epsilon must be positive and finite");
  if (k_idx < 1 || k_idx > dataset.dims()) {
    fail(ErrorKind::Validation, "k_idx " + std::to_string(k_idx) + " outside [1, " +
                                    std::to_string(dataset.dims()) + "]");
  }
  const std::size_t n = dataset.size();
  std::vector<std::int64_t> keys(n * k_idx);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k_idx; ++j) keys[i * k_idx + j] = cell_component(dataset.at(i, j), epsilon, i, j);

  std::vector<PointId> order(n);
  std::iota(order.begin(), order.end(), PointId{0});
  std::sort(order.begin(), order.end(), [&](PointId a, PointId b) {
    const auto* ka = keys.data() + std::size_t{a} * k_idx;
    const auto* kb = keys.data() + std::size_t{b} * k_idx;
    for (std::size_t j = 0; j < k_idx; ++j)
      if (ka[j] != kb[j]) return ka[j] < kb[j];
    return a < b;
  });

  GridIndex index;
  index.epsilon_ = epsilon;
  index.k_idx_ = k_idx;
  index.point_order_ = std::move(order);
  std::size_t begin = 0;
  while (begin < n) {
    const auto* key = keys.data() + std::size_t{index.point_order_[begin]} * k_idx;
    std::size_t end = begin + 1;
    while (end < n && std::equal(key, key + k_idx, keys.data() + std::size_t{index.point_order_[end]} * k_idx)) ++end;
    Cell cell{CellCoord(key, key + k_idx), begin, end};
    index.lookup_.emplace(cell.coord, index.cells_.size());
    index.cells_.push_back(std::move(cell));
    begin = end;
  }
  return index;
}

std::span<const PointId> GridIndex::members(std::size_t cell_index) const {
  const Cell& c = cells_.at(cell_index);
  return std::span<const PointId>(point_order_).subspan(c.begin, c.size());
}

std::optional<std::size_t> GridIndex::find(const CellCoord& coord) const {
  auto it = lookup_.find(coord);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

CellCoord GridIndex::cell_of(std::span<const double> point) const {
  if (point.size() < k_idx_) fail(ErrorKind::Validation, "point has fewer dimensions than the index");
  CellCoord coord(k_idx_);
  for (std::size_t j = 0; j < k_idx_; ++j) coord[j] = cell_component(point[j], epsilon_, 0, j);
  return coord;
}

std::vector<std::size_t> GridIndex::neighbor_cell_indices(const CellCoord& coord) const {
  if (coord.size() != k_idx_) fail(ErrorKind::Validation, "cell coordinate has wrong arity");
  std::vector<std::size_t> out;
  // Offsets enumerated in lexicographic order, most significant dimension first.
  std::vector<int> offset(k_idx_, -1);
  CellCoord probe(k_idx_);
  while (true) {
    for (std::size_t j = 0; j < k_idx_; ++j) probe[j] = coord[j] + offset[j];
    if (auto hit = find(probe)) out.push_back(*hit);
    std::size_t j = k_idx_;
    while (j > 0 && offset[j - 1] == 1) offset[--j] = -1;
    if (j == 0) break;
    ++offset[j - 1];
  }
  return out;
}

std::vector<CellCoord> GridIndex::neighbor_cells(const CellCoord& coord) const {
  std::vector<CellCoord> out;
  for (std::size_t idx : neighbor_cell_indices(coord)) out.push_back(cells_[idx].coord);
  return out;
}

std::vector<PointId> GridIndex::candidates_for_cell(const CellCoord& coord) const {
  if (!find(coord)) fail(ErrorKind::Validation, "candidates requested for an empty cell");
  std::vector<PointId> out;
  for (std::size_t idx : neighbor_cell_indices(coord)) {
    auto m = members(idx);
    out.insert(out.end(), m.begin(), m.end());
  }
  return out;
}

bool operator==(const GridIndex& a, const GridIndex& b) {
  return a.epsilon_ == b.epsilon_ && a.k_idx_ == b.k_idx_ && a.cells_ == b.cells_ &&
         a.point_order_ == b.point_order_;
}

}  // namespace tedjoin
