// SPDX-License-Identifier: Apache-2.0
#pragma once

// Test-only helpers: random inputs and scalar reference computations that do
// not go through the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tedjoin/dataset.hpp"
#include "tedjoin/distance.hpp"

namespace tedjoin::testing {

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t count, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(count);
  for (double& x : v) x = dist(rng);
  return v;
}

// Values spanning several binades and both signs, so rounding differences
// between summation orders would show up.
inline std::vector<double> wide_values(std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::uniform_int_distribution<int> expo(-20, 20);
  std::bernoulli_distribution neg(0.5);
  std::vector<double> v(count);
  for (double& x : v) x = std::ldexp(mant(rng), expo(rng)) * (neg(rng) ? -1.0 : 1.0);
  return v;
}

inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d, double lo = 0.0, double hi = 1.0) {
  return Dataset::from_rows(random_values(rng, n * d, lo, hi), n, d);
}

// Direct ascending-dimension sum of squared differences.
inline double direct_sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

inline double sq_norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

// Packs dataset rows into a kernel block; storage must outlive the block.
struct BlockStorage {
  std::vector<double> coords, norms;
};

inline PointBlock make_block(const Dataset& ds, const ChunkNorms& norms, std::span<const std::size_t> ids,
                             BlockStorage& storage) {
  storage.coords.clear();
  storage.norms.clear();
  for (std::size_t id : ids) {
    auto r = ds.row(id);
    storage.coords.insert(storage.coords.end(), r.begin(), r.end());
    auto nr = norms.of(id);
    storage.norms.insert(storage.norms.end(), nr.begin(), nr.end());
  }
  return PointBlock{storage.coords, storage.norms, ids.size(), ds.padded()};
}

// Radius at which the self-join has close to target_selectivity neighbors per
// point, placed in the middle of a gap between consecutive pairwise distances
// so that no pair lies within rel_guard * epsilon of the boundary.
inline double epsilon_for_selectivity(const Dataset& ds, double target_selectivity, double rel_guard = 1e-9) {
  const std::size_t n = ds.size();
  std::vector<double> dist;
  dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist.push_back(std::sqrt(direct_sq_dist(ds.point(i), ds.point(j))));
  std::sort(dist.begin(), dist.end());
  const double want = target_selectivity * static_cast<double>(n) / 2.0;
  std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, dist.size() - 1);
  for (; k < dist.size(); ++k) {
    const double eps = 0.5 * (dist[k - 1] + dist[k]);
    if (eps > 0.0 && dist[k] - eps > rel_guard * eps && eps - dist[k - 1] > rel_guard * eps) return eps;
  }
  return 2.0 * dist.back() + 1.0;
}

}  // namespace tedjoin::testing
