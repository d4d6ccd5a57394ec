// SPDX-License-Identifier: Apache-2.0
#include "tedjoin/tile.hpp"

#include <string>

#include "tedjoin/error.hpp"

namespace tedjoin::tile {

namespace detail {

void check_load_region(std::size_t buffer_size, std::size_t offset, std::size_t stride,
                       std::size_t lines, std::size_t line_length) {
  for (std::size_t line = 0; line < lines; ++line) {
    const std::size_t begin = offset + line * stride;
    if (begin + line_length > buffer_size) {
      fail(ErrorKind::Bounds, "tile load out of bounds at line " + std::to_string(line) +
                                  ": elements [" + std::to_string(begin) + ", " +
                                  std::to_string(begin + line_length) + ") exceed buffer of " +
                                  std::to_string(buffer_size));
    }
  }
}

void check_store_region(std::size_t buffer_size, std::size_t offset, std::size_t stride,
                        std::size_t rows, std::size_t cols) {
  if (stride < cols) {
    fail(ErrorKind::Validation, "tile store stride " + std::to_string(stride) +
                                    " is smaller than the row length " + std::to_string(cols));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t begin = offset + r * stride;
    if (begin + cols > buffer_size) {
      fail(ErrorKind::Bounds, "tile store out of bounds at row " + std::to_string(r) +
                                  ": elements [" + std::to_string(begin) + ", " +
                                  std::to_string(begin + cols) + ") exceed buffer of " +
                                  std::to_string(buffer_size));
    }
  }
}

}  // namespace detail

TileAcc mma(const TileA& a, const TileB& b, const TileAcc& c) {
  TileAcc d;
  for (std::size_t r = 0; r < kM; ++r) {
    for (std::size_t col = 0; col < kN; ++col) {
      double sum = 0.0;
      for (std::size_t k = 0; k < kK; ++k) sum += a(r, k) * b(k, col);
      d(r, col) = sum + c(r, col);
    }
  }
  return d;
}

TileB leading_identity() {
  TileB identity;
  for (std::size_t k = 0; k < kK; ++k) identity(k, k) = 1.0;
  return identity;
}

}  // namespace tedjoin::tile
