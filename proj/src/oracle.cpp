// SPDX-License-Identifier: Apache-2.0
#include "tedjoin/oracle.hpp"

#include <cmath>
#include <string>

#include "tedjoin/error.hpp"

namespace tedjoin::oracle {

std::vector<NeighborPair> brute_force_join(const Dataset& dataset, double epsilon, bool force) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorKind::Validation, "epsilon must be positive and finite");
  const std::size_t n = dataset.size();
  if (n > kBruteForceLimit && !force) {
    fail(ErrorKind::Resource, "brute-force join of " + std::to_string(n) + " points exceeds the limit of " +
                                  std::to_string(kBruteForceLimit) + " (force to override)");
  }
  const double eps_sq = epsilon * epsilon;
  const std::size_t d = dataset.dims();
  std::vector<NeighborPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = dataset.point(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto b = dataset.point(j);
      double sum = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
      }
      if (sum <= eps_sq) pairs.push_back({static_cast<PointId>(i), static_cast<PointId>(j), sum});
    }
  }
  return pairs;
}

Matrix8x8 naive_mma(const Matrix8x4& a, const Matrix4x8& b, const Matrix8x8& c) {
  Matrix8x8 d{};
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < 4; ++k) sum += a[i * 4 + k] * b[k * 8 + j];
      d[i * 8 + j] = sum + c[i * 8 + j];
    }
  }
  return d;
}

}  // namespace tedjoin::oracle
