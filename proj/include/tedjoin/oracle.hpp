// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file oracle.hpp
/// \brief Brute-force references. Nothing here touches the tile engine, the
/// distance kernels or the grid index.

#include <array>
#include <cstddef>
#include <vector>

#include "tedjoin/dataset.hpp"
#include "tedjoin/pairs.hpp"

namespace tedjoin::oracle {

/// Largest dataset brute_force_join accepts without force.
inline constexpr std::size_t kBruteForceLimit = 50'000;

/// Every (i, j) with sum over dimensions (ascending) of (a_i - b_i)^2 <= eps^2,
/// self-pairs included, sorted by (i, j). Throws a resource error when
/// n > kBruteForceLimit and force is false.
std::vector<NeighborPair> brute_force_join(const Dataset& dataset, double epsilon, bool force = false);

using Matrix8x4 = std::array<double, 32>;  // row-major
using Matrix4x8 = std::array<double, 32>;
using Matrix8x8 = std::array<double, 64>;

/// Textbook D = A x B + C: ascending k, C added last.
Matrix8x8 naive_mma(const Matrix8x4& a, const Matrix4x8& b, const Matrix8x8& c);

}  // namespace tedjoin::oracle
