// SPDX-License-Identifier: Apache-2.0
#include "tedjoin/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "tedjoin/error.hpp"

namespace tedjoin {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr char kMagic[4] = {'T', 'E', 'D', 'J'};
constexpr std::uint32_t kBinaryVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8;

std::uint64_t fnv_mix(std::uint64_t hash, std::uint64_t word) {
  for (int b = 0; b < 8; ++b) {
    hash ^= (word >> (8 * b)) & 0xffu;
    hash *= kFnvPrime;
  }
  return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void put_le(std::vector<std::byte>& out, std::uint64_t value, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<std::byte>((value >> (8 * b)) & 0xffu));
}

std::uint64_t get_le(std::span<const std::byte> in, std::size_t offset, int bytes) {
  std::uint64_t value = 0;
  for (int b = 0; b < bytes; ++b)
    value |= static_cast<std::uint64_t>(std::to_integer<unsigned>(in[offset + b])) << (8 * b);
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Dataset Dataset::from_rows(std::span<const double> coords, std::size_t n, std::size_t d) {
  if (n == 0) fail(ErrorKind::Validation, "dataset must contain at least one point");
  if (d == 0) fail(ErrorKind::Validation, "dataset dimensionality must be at least 1");
  if (coords.size() != n * d) {
    fail(ErrorKind::Validation, "expected " + std::to_string(n * d) + " coordinates for " +
                                    std::to_string(n) + "x" + std::to_string(d) + ", got " +
                                    std::to_string(coords.size()));
  }
  Dataset ds;
  ds.n_ = n;
  ds.d_ = d;
  ds.d_padded_ = padded_dims(d);
  ds.coords_.assign(n * ds.d_padded_, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = coords[i * d + j];
      if (!std::isfinite(v)) {
        fail(ErrorKind::Validation, "non-finite coordinate at point " + std::to_string(i) +
                                        ", dimension " + std::to_string(j));
      }
      ds.coords_[i * ds.d_padded_ + j] = v;
    }
  }
  return ds;
}

std::vector<double> Dataset::logical_coords() const {
  std::vector<double> out;
  out.reserve(n_ * d_);
  for (std::size_t i = 0; i < n_; ++i) {
    auto p = point(i);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::uint64_t Dataset::checksum() const {
  std::uint64_t h = kFnvOffset;
  h = fnv_mix(h, n_);
  h = fnv_mix(h, d_);
  for (std::size_t i = 0; i < n_; ++i)
    for (double v : point(i)) h = fnv_mix(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

Dataset generate(const GenSpec& spec) {
  if (spec.n == 0) fail(ErrorKind::Validation, "generate: n must be at least 1");
  if (spec.d == 0) fail(ErrorKind::Validation, "generate: d must be at least 1");
  if (spec.distribution == Distribution::Exponential && !(spec.rate > 0.0 && std::isfinite(spec.rate)))
    fail(ErrorKind::Validation, "generate: exponential rate must be positive and finite");

  std::vector<std::mt19937_64> streams;
  streams.reserve(spec.d);
  for (std::size_t j = 0; j < spec.d; ++j) streams.emplace_back(splitmix64(spec.seed + j * kGolden));

  std::vector<double> coords(spec.n * spec.d);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.d; ++j) {
      auto& rng = streams[j];
      double v;
      if (spec.distribution == Distribution::Uniform) {
        v = unit_double(rng);
      } else {
        do {
          v = -std::log1p(-unit_double(rng)) / spec.rate;
        } while (v >= 1.0);
      }
      coords[i * spec.d + j] = v;
    }
  }
  return Dataset::from_rows(coords, spec.n, spec.d);
}

std::vector<double> dimension_variances(const Dataset& dataset) {
  const std::size_t n = dataset.size();
  std::vector<double> var(dataset.dims(), 0.0);
  for (std::size_t j = 0; j < dataset.dims(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += dataset.at(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = dataset.at(i, j) - mean;
      ss += dev * dev;
    }
    var[j] = ss / static_cast<double>(n);
  }
  return var;
}

Dataset permute_dims(const Dataset& dataset, std::span<const std::size_t> permutation) {
  const std::size_t d = dataset.dims();
  if (permutation.size() != d) fail(ErrorKind::Validation, "permutation length does not match d");
  std::vector<bool> seen(d, false);
  for (std::size_t p : permutation) {
    if (p >= d || seen[p]) fail(ErrorKind::Validation, "invalid dimension permutation");
    seen[p] = true;
  }
  std::vector<double> coords(dataset.size() * d);
  for (std::size_t i = 0; i < dataset.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) coords[i * d + k] = dataset.at(i, permutation[k]);
  return Dataset::from_rows(coords, dataset.size(), d);
}

ReorderedDataset reorder_dims_by_variance(const Dataset& dataset) {
  const auto var = dimension_variances(dataset);
  std::vector<std::size_t> perm(dataset.dims());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });
  return {permute_dims(dataset, perm), std::move(perm)};
}

Dataset parse_csv(std::string_view text) {
  std::vector<double> coords;
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    if (line.empty()) continue;

    std::size_t fields = 0;
    while (true) {
      const auto comma = line.find(',');
      std::string_view field = trim(line.substr(0, comma));
      ++fields;
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorKind::Parse, "csv line " + std::to_string(line_no) + ", field " +
                                   std::to_string(fields) + ": cannot parse '" + std::string(field) + "'");
      }
      coords.push_back(v);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (n == 0) {
      d = fields;
    } else if (fields != d) {
      fail(ErrorKind::Validation, "csv line " + std::to_string(line_no) + " has " + std::to_string(fields) +
                                      " fields, expected " + std::to_string(d));
    }
    ++n;
  }
  if (n == 0) fail(ErrorKind::Validation, "csv input contains no points");
  return Dataset::from_rows(coords, n, d);
}

std::string format_csv(const Dataset& dataset) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto p = dataset.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out.push_back(',');
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p[j]);
      out.append(buf, end);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<std::byte> encode_binary(const Dataset& dataset) {
  std::vector<std::byte> out;
  out.reserve(kHeaderBytes + dataset.size() * dataset.dims() * 8);
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_le(out, kBinaryVersion, 4);
  put_le(out, dataset.size(), 8);
  put_le(out, dataset.dims(), 8);
  for (std::size_t i = 0; i < dataset.size(); ++i)
    for (double v : dataset.point(i)) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

Dataset decode_binary(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderBytes) {
    fail(ErrorKind::Parse, "binary dataset truncated: header needs " + std::to_string(kHeaderBytes) +
                               " bytes, got " + std::to_string(bytes.size()));
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (static_cast<char>(bytes[i]) != kMagic[i]) fail(ErrorKind::Parse, "binary dataset: bad magic at offset 0");
  }
  const auto version = get_le(bytes, 4, 4);
  if (version != kBinaryVersion)
    fail(ErrorKind::Parse, "binary dataset: unsupported version " + std::to_string(version) + " at offset 4");
  const auto n = get_le(bytes, 8, 8);
  const auto d = get_le(bytes, 16, 8);
  if (n == 0 || d == 0) fail(ErrorKind::Validation, "binary dataset: n and d must be non-zero");
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (d > payload / 8 || n > payload / 8 / d || n * d * 8 != payload) {
    fail(ErrorKind::Parse, "binary dataset: payload of " + std::to_string(payload) + " bytes at offset " +
                               std::to_string(kHeaderBytes) + " does not hold " + std::to_string(n) + "x" +
                               std::to_string(d) + " doubles");
  }
  std::vector<double> coords(n * d);
  for (std::size_t k = 0; k < coords.size(); ++k)
    coords[k] = std::bit_cast<double>(get_le(bytes, kHeaderBytes + 8 * k, 8));
  return Dataset::from_rows(coords, n, d);
}

Dataset read_dataset(const std::filesystem::path& path, FileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string() + " for reading");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "failed reading " + path.string());
  if (format == FileFormat::Csv) return parse_csv(content);
  return decode_binary(std::as_bytes(std::span(content.data(), content.size())));
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  if (format == FileFormat::Csv) {
    const auto text = format_csv(dataset);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  } else {
    const auto bytes = encode_binary(dataset);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  out.flush();
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace tedjoin
