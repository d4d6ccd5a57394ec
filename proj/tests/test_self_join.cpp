// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <tuple>

#include "support.hpp"
#include "tedjoin/error.hpp"
#include "tedjoin/oracle.hpp"
#include "tedjoin/self_join.hpp"

using namespace tedjoin;

namespace {

JoinConfig config_for(double eps) {
  JoinConfig c;
  c.epsilon = eps;
  return c;
}

}  // namespace

TEST_CASE("join semantics") {
  SUBCASE("pairs at exactly epsilon are included") {
    const std::vector<double> raw{0.25, 0.75};
    for (Kernel k : {Kernel::Tile, Kernel::Scalar}) {
      auto cfg = config_for(0.5);
      cfg.kernel = k;
      const auto r = self_join(Dataset::from_rows(raw, 2, 1), cfg);
      CHECK(r.total_pairs == 4);
    }
  }
  SUBCASE("identical points form a complete graph") {
    std::vector<double> raw(3 * 37, 0.4);
    for (Kernel k : {Kernel::Tile, Kernel::Scalar}) {
      auto cfg = config_for(0.01);
      cfg.kernel = k;
      const auto r = self_join(Dataset::from_rows(raw, 37, 3), cfg);
      CHECK(r.total_pairs == 37 * 37);
      CHECK(r.selectivity == 36.0);
    }
  }
  SUBCASE("isolated points") {
    const std::vector<double> raw{0.0, 1.0, 2.0, 3.0};
    const auto r = self_join(Dataset::from_rows(raw, 4, 1), config_for(0.5));
    CHECK(r.total_pairs == 4);
    CHECK(r.selectivity == 0.0);
  }
  SUBCASE("uniform 1000x2 equals the oracle, tile and scalar") {
    const auto ds = generate({Distribution::Uniform, 1000, 2, 61});
    const double eps = testing::epsilon_for_selectivity(ds, 10.0);
    const auto expect = oracle::brute_force_join(ds, eps);
    const auto tile = self_join(ds, config_for(eps));
    auto cfg = config_for(eps);
    cfg.kernel = Kernel::Scalar;
    const auto scalar = self_join(ds, cfg);
    CHECK(same_pair_set(tile.pairs, expect));
    CHECK(same_pair_set(scalar.pairs, expect));
    CHECK(tile.selectivity == doctest::Approx(10.0).epsilon(0.01));
    // Scalar sums in the oracle's order, so distances match bit-exactly.
    for (std::size_t i = 0; i < expect.size(); ++i) REQUIRE(scalar.pairs[i].sq_dist == expect[i].sq_dist);
  }
  SUBCASE("errors") {
    const auto ds = Dataset::from_rows(std::vector<double>{0, 1}, 2, 1);
    CHECK_THROWS_AS(self_join(ds, config_for(0.0)), Error);
    auto cfg = config_for(1.0);
    cfg.thread_count = 0;
    CHECK_THROWS_AS(self_join(ds, cfg), Error);
    cfg = config_for(1.0);
    cfg.batch_size = 0;
    CHECK_THROWS_AS(self_join(ds, cfg), Error);
    cfg = config_for(1.0);
    cfg.k_idx = 2;
    CHECK_THROWS_AS(self_join(ds, cfg), Error);
  }
}

TEST_CASE("configuration invariance") {
  std::mt19937_64 rng(62);
  for (std::size_t d : {1u, 3u, 5u, 9u}) {
    const auto ds = generate({Distribution::Exponential, 400, d, 62 + d});
    const double eps = testing::epsilon_for_selectivity(ds, 8.0);
    const auto expect = oracle::brute_force_join(ds, eps);
    for (Kernel kernel : {Kernel::Tile, Kernel::Scalar})
      for (bool sc : {true, false})
        for (std::size_t batch : {std::size_t{1}, std::size_t{64}, kUnboundedBatch})
          for (std::size_t threads : {1u, 3u})
            for (bool reorder : {false, true})
              for (std::size_t k_idx : {std::size_t{0}, std::size_t{1}}) {
                JoinConfig cfg{eps, kernel, sc, k_idx, batch, threads, reorder, 0};
                const auto r = self_join(ds, cfg);
                INFO("d=", d, " kernel=", int(kernel), " sc=", sc, " batch=", batch, " threads=", threads,
                     " reorder=", reorder, " k_idx=", k_idx);
                REQUIRE(same_pair_set(r.pairs, expect));
              }
  }
}

TEST_CASE("batch planning") {
  SUBCASE("single cell") {
    std::vector<double> raw(20, 0.1);
    const auto idx = GridIndex::build(Dataset::from_rows(raw, 10, 2), 1.0, 2);
    CHECK(plan_batches(idx, config_for(1.0)).batches.size() == 1);
  }
  SUBCASE("batch size one gives one batch per cell") {
    const auto ds = generate({Distribution::Uniform, 300, 2, 63});
    const auto idx = GridIndex::build(ds, 0.1, 2);
    auto cfg = config_for(0.1);
    cfg.batch_size = 1;
    CHECK(plan_batches(idx, cfg).batches.size() == idx.cell_count());
  }
  SUBCASE("random index: partition with bounded slack") {
    const auto ds = generate({Distribution::Exponential, 2000, 3, 64});
    const auto idx = GridIndex::build(ds, 0.02, 3);
    for (std::size_t limit : {10u, 500u, 5000u, 100000u}) {
      auto cfg = config_for(0.02);
      cfg.batch_size = limit;
      const auto plan = plan_batches(idx, cfg);
      std::size_t expect_first = 0;
      for (std::size_t b = 0; b < plan.batches.size(); ++b) {
        const auto& batch = plan.batches[b];
        REQUIRE(batch.first_cell == expect_first);
        REQUIRE(batch.end_cell > batch.first_cell);
        std::uint64_t est = 0, last = 0;
        for (std::size_t c = batch.first_cell; c < batch.end_cell; ++c) {
          std::uint64_t cands = 0;
          for (auto nb : idx.neighbor_cell_indices(idx.cells()[c].coord)) cands += idx.cells()[nb].size();
          last = idx.cells()[c].size() * cands;
          est += last;
        }
        CHECK(est == batch.estimated_pairs);
        CHECK(est - last < limit);
        if (b + 1 < plan.batches.size()) CHECK(est >= limit);
        expect_first = batch.end_cell;
      }
      CHECK(expect_first == idx.cell_count());
    }
  }
}

TEST_CASE("statistics") {
  const auto ds = generate({Distribution::Exponential, 1500, 8, 65});
  const double eps = testing::epsilon_for_selectivity(ds, 4.0);

  SUBCASE("short-circuit off skips nothing") {
    for (Kernel k : {Kernel::Tile, Kernel::Scalar}) {
      auto cfg = config_for(eps);
      cfg.kernel = k;
      cfg.short_circuit = false;
      const auto r = self_join(ds, cfg);
      CHECK(r.stats.chunks_skipped == 0);
      cfg.short_circuit = true;
      const auto on = self_join(ds, cfg);
      // The scalar kernel checks every 8 dimensions, so at d = 8 it never stops early.
      if (k == Kernel::Tile) CHECK(on.stats.chunks_skipped > 0);
      CHECK(on.stats.chunks_executed + on.stats.chunks_skipped == r.stats.chunks_executed);
      CHECK(same_pair_set(on.pairs, r.pairs));
    }
  }
  SUBCASE("scalar short-circuit in higher dimensions") {
    const auto wide = generate({Distribution::Exponential, 800, 20, 66});
    auto cfg = config_for(testing::epsilon_for_selectivity(wide, 2.0));
    cfg.kernel = Kernel::Scalar;
    const auto on = self_join(wide, cfg);
    cfg.short_circuit = false;
    const auto off = self_join(wide, cfg);
    CHECK(on.stats.chunks_skipped > 0);
    CHECK(off.stats.chunks_skipped == 0);
    CHECK(same_pair_set(on.pairs, off.pairs));
  }
  SUBCASE("epsilon beyond the diameter refines every candidate") {
    auto cfg = config_for(10.0);
    cfg.k_idx = 3;
    const auto r = self_join(ds, cfg);
    const auto idx = GridIndex::build(ds, 10.0, 3);
    std::uint64_t expect = 0;
    for (const auto& c : idx.cells()) expect += c.size() * idx.candidates_for_cell(c.coord).size();
    CHECK(r.stats.candidates_refined == expect);
    CHECK(r.stats.chunks_skipped == 0);
    CHECK(r.total_pairs == ds.size() * ds.size());
  }
  SUBCASE("counters equal a recount from the event log") {
    for (std::size_t threads : {1u, 4u}) {
      auto cfg = config_for(eps);
      cfg.thread_count = threads;
      cfg.batch_size = 2000;
      std::vector<TileEvent> log;
      const auto r = self_join(ds, cfg, [&](const TileEvent& e) { log.push_back(e); });
      std::uint64_t executed = 0, skipped = 0, pairs = 0, refined = 0;
      std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
      std::set<std::size_t> batches;
      for (const auto& e : log) {
        executed += e.chunks_executed;
        skipped += e.chunks_skipped;
        pairs += e.pairs_emitted;
        refined += e.queries * e.candidates;
        batches.insert(e.batch);
        CHECK(seen.emplace(e.cell, e.query_group, e.candidate_block).second);
        if (e.pruned) CHECK(e.pairs_emitted == 0);
      }
      CHECK(log.size() == r.stats.tiles_processed);
      CHECK(executed == r.stats.chunks_executed);
      CHECK(skipped == r.stats.chunks_skipped);
      CHECK(pairs == r.stats.pairs_emitted);
      CHECK(pairs == r.total_pairs);
      CHECK(refined == r.stats.candidates_refined);
      CHECK(batches.size() == r.stats.batches);
      CHECK(r.stats.batches > 1);
    }
  }
  SUBCASE("result capacity overflow names the batch") {
    auto cfg = config_for(eps);
    cfg.batch_size = 500;
    cfg.max_result_pairs = 2000;
    try {
      (void)self_join(ds, cfg);
      FAIL("expected resource error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Resource);
      CHECK(std::string(e.what()).rfind("batch ", 0) == 0);
    }
    cfg.thread_count = 4;
    CHECK_THROWS_AS(self_join(ds, cfg), Error);
  }
  SUBCASE("stream delivers canonical batches") {
    auto cfg = config_for(eps);
    cfg.batch_size = 300;
    std::size_t expected_batch = 0, total = 0;
    const auto stats = self_join_stream(ds, cfg, [&](std::size_t b, std::span<const NeighborPair> pairs) {
      CHECK(b == expected_batch++);
      CHECK(std::is_sorted(pairs.begin(), pairs.end(), id_less));
      total += pairs.size();
    });
    CHECK(expected_batch == stats.batches);
    CHECK(total == stats.pairs_emitted);
  }
}
