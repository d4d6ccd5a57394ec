// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "support.hpp"
#include "tedjoin/error.hpp"
#include "tedjoin/oracle.hpp"
#include "tedjoin/tile.hpp"

using namespace tedjoin;
using namespace tedjoin::tile;

namespace {

std::vector<double> iota_buffer(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 0.0);
  return v;
}

template <class T>
T random_tile(std::mt19937_64& rng) {
  const auto v = testing::wide_values(rng, T::kSize);
  return load_row_major<T>(v, 0, T::kCols);
}

template <class T, std::size_t N>
std::array<double, N> to_array(const T& t) {
  std::array<double, N> out{};
  std::copy(t.elements().begin(), t.elements().end(), out.begin());
  return out;
}

}  // namespace

TEST_CASE("row-major load uses offset + r*stride + c") {
  const auto buf = iota_buffer(32);
  const auto a = load_row_major<TileA>(buf, 0, 4);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(a(r, c) == 4.0 * r + c);

  const auto buf64 = iota_buffer(64);
  const auto acc = load_row_major<TileAcc>(buf64, 0, 8);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) CHECK(acc(r, c) == buf64[r * 8 + c]);
}

TEST_CASE("row-major load matches a scalar indexer at odd offset and stride") {
  std::mt19937_64 rng(11);
  const auto buf = testing::random_values(rng, 5 + 11 * 3 + 8);
  const auto b = load_row_major<TileB>(buf, 5, 11);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 8; ++c) CHECK(b(r, c) == buf[5 + 11 * r + c]);
}

TEST_CASE("stride 0 replicates a single row") {
  const std::vector<double> row{1.5, -2.0, 3.25, 4.0};
  const auto a = load_row_major<TileA>(row, 0, 0);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(a(r, c) == row[c]);
}

TEST_CASE("column-major load") {
  SUBCASE("stride 8 addresses (r, c) = 8c + r") {
    const auto buf = iota_buffer(64);
    const auto b = load_col_major<TileB>(buf, 0, 8);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 8; ++c) CHECK(b(r, c) == 8.0 * c + r);
  }
  SUBCASE("dense 4x8 from 32 values") {
    const auto buf = iota_buffer(32);
    const auto b = load_col_major<TileB>(buf, 0, 4);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 8; ++c) CHECK(b(r, c) == 4.0 * c + r);
  }
  SUBCASE("random regions match a transposed scalar indexer") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> pick(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t offset = pick(rng), stride = 4 + pick(rng);
      const auto buf = testing::random_values(rng, offset + 7 * stride + 8);
      const auto b = load_col_major<TileB>(buf, offset, stride);
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 8; ++c) REQUIRE(b(r, c) == buf[offset + c * stride + r]);
    }
  }
}

TEST_CASE("column-major load is the transpose of the row-major load") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> pick(0, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t offset = pick(rng), stride = 8 + pick(rng);
    const auto buf = testing::random_values(rng, offset + 8 * stride + 8);
    CHECK(load_col_major<TileB>(buf, offset, stride) == transpose(load_row_major<TileA>(buf, offset, stride)));
    CHECK(load_col_major<TileA>(buf, offset, stride) == transpose(load_row_major<TileB>(buf, offset, stride)));
    CHECK(load_col_major<TileAcc>(buf, offset, stride) == transpose(load_row_major<TileAcc>(buf, offset, stride)));
  }
}

TEST_CASE("out-of-bounds loads name the offending row") {
  const auto buf = iota_buffer(31);
  try {
    (void)load_row_major<TileA>(buf, 0, 4);
    FAIL("expected a bounds error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Bounds);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
  CHECK_THROWS_AS(load_col_major<TileB>(iota_buffer(32), 0, 8), Error);
  CHECK_THROWS_AS(load_row_major<TileAcc>(iota_buffer(64), 1, 8), Error);
}

TEST_CASE("fill") {
  TileAcc t;
  fill(t, 0.0);
  for (double v : t.elements()) CHECK(v == 0.0);

  fill(t, -3.5);
  std::vector<double> out(64, 0.0);
  store(t, std::span<double>(out), 0, 8);
  CHECK(std::all_of(out.begin(), out.end(), [](double v) { return v == -3.5; }));

  std::mt19937_64 rng(14);
  const auto a = random_tile<TileA>(rng);
  const auto b = random_tile<TileB>(rng);
  TileAcc ones;
  fill(ones, 1.0);
  TileAcc zero;
  fill(zero, 0.0);
  const auto with_ones = mma(a, b, ones);
  const auto plain = mma(a, b, zero);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) CHECK(with_ones(r, c) == plain(r, c) + 1.0);
}

TEST_CASE("scale") {
  std::mt19937_64 rng(15);
  const auto t = random_tile<TileA>(rng);
  auto same = t;
  scale(same, 1.0);
  CHECK(same == t);

  auto zeroed = t;
  scale(zeroed, 0.0);
  for (double v : zeroed.elements()) CHECK(v == 0.0);

  auto doubled = t;
  scale(doubled, -2.0);
  for (std::size_t i = 0; i < TileA::kSize; ++i) CHECK(doubled.elements()[i] == t.elements()[i] * -2.0);

  auto b = random_tile<TileB>(rng);
  const auto b0 = b;
  scale(b, -1.0);
  for (std::size_t i = 0; i < TileB::kSize; ++i) CHECK(b.elements()[i] == -b0.elements()[i]);
}

TEST_CASE("mma special cases") {
  std::mt19937_64 rng(16);
  const auto x = random_tile<TileA>(rng);
  TileAcc zero;
  const auto d = mma(x, leading_identity(), zero);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 4; ++c) CHECK(d(r, c) == x(r, c));
    for (std::size_t c = 4; c < 8; ++c) CHECK(d(r, c) == 0.0);
  }

  const auto y = random_tile<TileAcc>(rng);
  CHECK(mma(TileA{}, random_tile<TileB>(rng), y) == y);
}

TEST_CASE("mma equals the naive triple loop bit-exactly") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_tile<TileA>(rng);
    const auto b = random_tile<TileB>(rng);
    const auto c = random_tile<TileAcc>(rng);
    const auto d = mma(a, b, c);
    const auto ref = oracle::naive_mma(to_array<TileA, 32>(a), to_array<TileB, 32>(b), to_array<TileAcc, 64>(c));
    REQUIRE(std::equal(d.elements().begin(), d.elements().end(), ref.begin()));

    // C enters last, after the dot product.
    const auto d0 = mma(a, b, TileAcc{});
    for (std::size_t i = 0; i < 64; ++i) REQUIRE(d0.elements()[i] + c.elements()[i] == d.elements()[i]);
  }
}

TEST_CASE("store") {
  SUBCASE("zeros land in the addressed region") {
    TileAcc t;
    fill(t, 0.0);
    std::vector<double> out(80, 7.0);
    store(t, std::span<double>(out), 8, 8);
    for (std::size_t i = 0; i < 80; ++i) CHECK(out[i] == (i >= 8 && i < 72 ? 0.0 : 7.0));
  }
  SUBCASE("stride 13 leaves gaps untouched") {
    std::mt19937_64 rng(18);
    const auto t = random_tile<TileAcc>(rng);
    std::vector<double> out(3 + 13 * 7 + 8 + 5, -1.0);
    const auto before = out;
    store(t, std::span<double>(out), 3, 13);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const bool inside = i >= 3 && (i - 3) / 13 < 8 && (i - 3) % 13 < 8;
      if (inside) {
        CHECK(out[i] == t((i - 3) / 13, (i - 3) % 13));
      } else {
        CHECK(out[i] == before[i]);
      }
    }
  }
  SUBCASE("round trips are bit-exact for every tile type") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
      const auto src = testing::wide_values(rng, 200);
      std::vector<double> dst(200, 0.0);
      store(load_row_major<TileA>(src, 7, 9), std::span<double>(dst), 7, 9);
      store(load_row_major<TileB>(src, 100, 10), std::span<double>(dst), 100, 10);
      for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 4; ++c) REQUIRE(dst[7 + r * 9 + c] == src[7 + r * 9 + c]);
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 8; ++c) REQUIRE(dst[100 + r * 10 + c] == src[100 + r * 10 + c]);
      std::vector<double> acc_dst(64);
      store(load_row_major<TileAcc>(src, 3, 8), std::span<double>(acc_dst), 0, 8);
      REQUIRE(std::equal(acc_dst.begin(), acc_dst.end(), src.begin() + 3));
    }
  }
  SUBCASE("errors") {
    TileAcc t;
    std::vector<double> out(63);
    CHECK_THROWS_AS(store(t, std::span<double>(out), 0, 8), Error);
    std::vector<double> big(200);
    CHECK_THROWS_AS(store(t, std::span<double>(big), 0, 7), Error);
  }
}
