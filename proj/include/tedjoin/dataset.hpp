// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tedjoin {

using PointId = std::uint32_t;

/// Smallest multiple of 4 that is >= dims.
constexpr std::size_t padded_dims(std::size_t dims) { return (dims + 3) / 4 * 4; }

/// Number of 4-wide coordinate chunks covering dims.
constexpr std::size_t chunk_count(std::size_t dims) { return (dims + 3) / 4; }

/// n points in d dimensions, stored row-major with each row zero-padded to a
/// multiple of 4 coordinates. Padding is an in-memory artifact only; it is
/// never serialized.
class Dataset {
 public:
  Dataset() = default;

  /// Takes n*d logical coordinates, row-major. Throws a validation error on
  /// n == 0, d == 0, size mismatch or a non-finite coordinate.
  static Dataset from_rows(std::span<const double> coords, std::size_t n, std::size_t d);

  std::size_t size() const { return n_; }
  std::size_t dims() const { return d_; }
  std::size_t padded() const { return d_padded_; }
  std::size_t chunks() const { return d_padded_ / 4; }

  /// Padded row of point i.
  std::span<const double> row(std::size_t i) const {
    return {coords_.data() + i * d_padded_, d_padded_};
  }
  /// Logical coordinates of point i (no padding).
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * d_padded_, d_};
  }
  double at(std::size_t i, std::size_t j) const { return coords_[i * d_padded_ + j]; }

  /// Full padded buffer, n * padded() values.
  std::span<const double> coords() const { return coords_; }

  /// Logical coordinates only, n * d values, row-major.
  std::vector<double> logical_coords() const;

  /// FNV-1a over n, d and the little-endian bytes of the logical coordinates.
  std::uint64_t checksum() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::size_t d_padded_ = 0;
  std::vector<double> coords_;
};

enum class Distribution { Uniform, Exponential };

inline constexpr double kDefaultExponentialRate = 40.0;

struct GenSpec {
  Distribution distribution = Distribution::Uniform;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double rate = kDefaultExponentialRate;
};

/// Coordinates are i.i.d. in [0, 1). Each dimension j draws from its own
/// std::mt19937_64 stream seeded with splitmix64(seed + j * 0x9E3779B97F4A7C15);
/// a uniform variate is the top 53 bits of one draw scaled by 2^-53.
/// Exponential coordinates use inverse-CDF sampling and are redrawn until
/// they fall below 1.
Dataset generate(const GenSpec& spec);

struct ReorderedDataset {
  Dataset dataset;
  /// Output dimension k holds input dimension permutation[k].
  std::vector<std::size_t> permutation;
};

/// Permutes dimensions so per-dimension variance is non-increasing. Ties keep
/// their original relative order.
ReorderedDataset reorder_dims_by_variance(const Dataset& dataset);

/// Applies an explicit dimension permutation (output k = input permutation[k]).
Dataset permute_dims(const Dataset& dataset, std::span<const std::size_t> permutation);

std::vector<double> dimension_variances(const Dataset& dataset);

enum class FileFormat { Csv, Binary };

Dataset read_dataset(const std::filesystem::path& path, FileFormat format);
void write_dataset(const Dataset& dataset, const std::filesystem::path& path, FileFormat format);

/// In-memory codecs behind read_dataset/write_dataset.
Dataset parse_csv(std::string_view text);
std::string format_csv(const Dataset& dataset);
Dataset decode_binary(std::span<const std::byte> bytes);
std::vector<std::byte> encode_binary(const Dataset& dataset);

}  // namespace tedjoin
