// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file tile.hpp
/// \brief Software matrix-multiply-accumulate tiles in the FP64 fragment shape.
///
/// Three fixed shapes exist: operand A (8x4), operand B (4x8) and the 8x8
/// accumulator. Elements are kept row-major internally. Loads and stores take
/// an element stride between consecutive rows (or columns, for the
/// column-major load), mirroring fragment load/store. A stride of 0 is legal
/// for loads and replicates one row across the tile.
///
/// mma accumulates each dot product in ascending k and adds the C term last,
/// so results are bit-reproducible and match a textbook triple loop exactly.

#include <array>
#include <cstddef>
#include <span>

namespace tedjoin::tile {

inline constexpr std::size_t kM = 8;
inline constexpr std::size_t kN = 8;
inline constexpr std::size_t kK = 4;

template <std::size_t Rows, std::size_t Cols>
class Tile {
 public:
  static constexpr std::size_t kRows = Rows;
  static constexpr std::size_t kCols = Cols;
  static constexpr std::size_t kSize = Rows * Cols;

  constexpr Tile() = default;

  constexpr double& operator()(std::size_t r, std::size_t c) { return elements_[r * Cols + c]; }
  constexpr double operator()(std::size_t r, std::size_t c) const { return elements_[r * Cols + c]; }

  std::span<double, kSize> elements() { return elements_; }
  std::span<const double, kSize> elements() const { return elements_; }

  friend bool operator==(const Tile&, const Tile&) = default;

 private:
  std::array<double, kSize> elements_{};
};

using TileA = Tile<kM, kK>;
using TileB = Tile<kK, kN>;
using TileAcc = Tile<kM, kN>;

namespace detail {
void check_load_region(std::size_t buffer_size, std::size_t offset, std::size_t stride,
                       std::size_t lines, std::size_t line_length);
void check_store_region(std::size_t buffer_size, std::size_t offset, std::size_t stride,
                        std::size_t rows, std::size_t cols);
}  // namespace detail

/// Element (r, c) = source[offset + r * stride + c].
template <class T>
T load_row_major(std::span<const double> source, std::size_t offset, std::size_t stride) {
  detail::check_load_region(source.size(), offset, stride, T::kRows, T::kCols);
  T tile;
  for (std::size_t r = 0; r < T::kRows; ++r) {
    const double* row = source.data() + offset + r * stride;
    for (std::size_t c = 0; c < T::kCols; ++c) tile(r, c) = row[c];
  }
  return tile;
}

/// Element (r, c) = source[offset + c * stride + r].
template <class T>
T load_col_major(std::span<const double> source, std::size_t offset, std::size_t stride) {
  detail::check_load_region(source.size(), offset, stride, T::kCols, T::kRows);
  T tile;
  for (std::size_t c = 0; c < T::kCols; ++c) {
    const double* col = source.data() + offset + c * stride;
    for (std::size_t r = 0; r < T::kRows; ++r) tile(r, c) = col[r];
  }
  return tile;
}

/// dest[offset + r * stride + c] = tile(r, c); every other element of dest is untouched.
template <class T>
void store(const T& tile, std::span<double> dest, std::size_t offset, std::size_t stride) {
  detail::check_store_region(dest.size(), offset, stride, T::kRows, T::kCols);
  for (std::size_t r = 0; r < T::kRows; ++r) {
    double* row = dest.data() + offset + r * stride;
    for (std::size_t c = 0; c < T::kCols; ++c) row[c] = tile(r, c);
  }
}

template <class T>
void fill(T& tile, double value) {
  for (double& e : tile.elements()) e = value;
}

template <class T>
void scale(T& tile, double factor) {
  for (double& e : tile.elements()) e *= factor;
}

template <std::size_t Rows, std::size_t Cols>
Tile<Cols, Rows> transpose(const Tile<Rows, Cols>& tile) {
  Tile<Cols, Rows> out;
  for (std::size_t r = 0; r < Rows; ++r)
    for (std::size_t c = 0; c < Cols; ++c) out(c, r) = tile(r, c);
  return out;
}

/// D = A x B + C.
TileAcc mma(const TileA& a, const TileB& b, const TileAcc& c);

/// 4x8 operand whose leading 4x4 block is the identity and the rest zero.
TileB leading_identity();

}  // namespace tedjoin::tile
