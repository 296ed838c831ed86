#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "mvdram/encoder.hpp"
#include "mvdram/engine.hpp"
#include "mvdram/errors.hpp"
#include "mvdram/layout.hpp"
#include "oracles.hpp"

using namespace mvdram;

namespace {

const SubarrayGeometry kGeom{512, 256};

std::vector<ReliabilityProfile> reliable(std::uint32_t cols = kGeom.column_count) {
  return {ReliabilityProfile::all_reliable(cols)};
}

ReliabilityProfile random_mask(oracle::Gen& gen, std::uint32_t cols, double fault_rate) {
  std::vector<ColumnRun> runs;
  ColumnIndex start = 0;
  bool open = false;
  for (ColumnIndex c = 0; c <= cols; ++c) {
    const bool ok = c < cols && !gen.coin(fault_rate);
    if (ok && !open) {
      start = c;
      open = true;
    } else if (!ok && open) {
      runs.push_back({start, c - start});
      open = false;
    }
  }
  return ReliabilityProfile::from_runs(cols, runs, gen.next());
}

}  // namespace

TEST_CASE("quantized containers") {
  const auto w = QuantizedMatrix::from_values(1, 1, 4, true, {-1});
  CHECK(w.code(0, 0) == 7);
  CHECK_THROWS_AS(QuantizedMatrix::from_values(1, 1, 2, false, {4}), ConfigError);
  CHECK_THROWS_AS(QuantizedMatrix::from_values(1, 2, 2, false, {1}), ConfigError);
  CHECK_THROWS_AS(QuantizedMatrix::from_values(1, 1, 9, false, {1}), ConfigError);
  const auto a = ActivationVector::random(1000, 3, false, 1.0, 1);
  CHECK(a.code_sum(0, 1000) == 0);
  const auto dense = ActivationVector::random(1000, 3, false, 0.0, 1);
  CHECK(dense.code_sum(0, 1000) == 7000);
  CHECK(QuantizedMatrix::random(5, 7, 3, true, 9).values().size() == 35);
  const auto m = QuantizedMatrix::random(5, 7, 3, true, 9);
  std::int64_t s = 0;
  for (std::uint32_t j = 0; j < 7; ++j) s += m.code(2, j);
  CHECK(m.row_sum(2) == s);
}

TEST_CASE("planner examples") {
  SUBCASE("minimal shape") {
    const auto p = plan({1, 1, 1, 3}, kGeom, reliable());
    REQUIRE(p.tiles.size() == 1);
    CHECK(p.tiles[0].group_starts.size() == 1);
    CHECK(p.r == 3 + 1);
  }
  SUBCASE("full-width 32000x4096 tile") {
    const SubarrayGeometry g{512, 65536};
    const auto profiles = reliable(65536);
    const auto p = plan({32000, 4096, 2, 1}, g, profiles);
    CHECK(p.n_span == 128);
    CHECK(p.tiles.size() == 32);
    for (const auto& t : p.tiles) {
      CHECK(t.m_count() == 32000);
      CHECK(t.n_span() == 128);
      CHECK(t.column_span() == 64000);
    }
  }
  SUBCASE("isolated reliable column is skipped for q_w=2") {
    const auto mask = ReliabilityProfile::from_runs(kGeom.column_count, {{0, 1}, {2, 2}, {5, 1}, {7, 249}}, 3);
    const std::vector<ReliabilityProfile> profiles{mask};
    const auto p = plan({4, 8, 2, 1}, kGeom, profiles);
    REQUIRE(p.tiles.size() == 1);
    CHECK(p.tiles[0].group_starts == std::vector<ColumnIndex>{2, 7, 9, 11});
  }
  SUBCASE("subarray deficit is quantified") {
    const std::vector<ReliabilityProfile> profiles = reliable();
    PlanOptions opt;
    opt.subarray_budget = 3;
    try {
      plan({300, 512, 2, 1}, kGeom, profiles, opt);  // 3 tiles per span x 4 spans
      FAIL("expected a capacity error");
    } catch (const CapacityError& e) {
      CHECK(e.needed() == 12);
      CHECK(e.deficit() == 9);
    }
  }
  SUBCASE("spans shrink to fit a short subarray") {
    const auto p = plan({4, 300, 2, 8}, SubarrayGeometry{256, 256}, reliable());
    CHECK(p.n_span < 128);
    for (const auto& t : p.tiles) CHECK(t.region_map.rows_used() <= 256);
  }
  SUBCASE("invalid shapes") {
    CHECK_THROWS_AS(plan({0, 1, 1, 1}, kGeom, reliable()), ConfigError);
    CHECK_THROWS_AS(plan({1, 1, 0, 1}, kGeom, reliable()), ConfigError);
    CHECK_THROWS_AS(plan({1, 1, 1, 9}, kGeom, reliable()), ConfigError);
  }
}

TEST_CASE("plan properties on random masks") {
  oracle::Gen gen(101);
  for (int trial = 0; trial < 60; ++trial) {
    const std::uint32_t m = static_cast<std::uint32_t>(gen.range(1, 90));
    const std::uint32_t n = static_cast<std::uint32_t>(gen.range(1, 400));
    const unsigned qw = static_cast<unsigned>(gen.range(1, 8));
    const unsigned qa = static_cast<unsigned>(gen.range(1, 8));
    std::vector<ReliabilityProfile> profiles;
    for (int i = 0; i < 3; ++i) profiles.push_back(random_mask(gen, kGeom.column_count, 0.08));
    const auto p = plan({m, n, qw, qa}, kGeom, profiles);

    std::vector<int> cover(std::size_t{m} * n, 0);
    for (const auto& t : p.tiles) {
      const auto& mask = profile_for_subarray(profiles, t.subarray_id);
      CHECK(t.n_span() <= 128);
      CHECK(t.shape.r == qa + ceil_log2(t.n_span()) + 1);
      CHECK(t.region_map.rows_used() <= kGeom.row_count);
      std::set<ColumnIndex> used;
      for (auto g : t.group_starts) {
        for (unsigned i = 0; i < qw; ++i) {
          REQUIRE(mask.reliable(g + i));
          REQUIRE(used.insert(g + i).second);
        }
      }
      for (auto mm = t.m0; mm < t.m1; ++mm) {
        for (auto nn = t.n0; nn < t.n1; ++nn) ++cover[std::size_t{mm} * n + nn];
      }
      // Regions are disjoint and inside the geometry.
      std::set<RowIndex> rows{t.region_map.zero_row, t.region_map.one_row};
      for (const auto* v : {&t.region_map.matrix_rows, &t.region_map.complement_rows, &t.region_map.compute_rows,
                            &t.region_map.output_rows}) {
        for (auto r : *v) {
          REQUIRE(r < kGeom.row_count);
          REQUIRE(rows.insert(r).second);
        }
      }
    }
    CHECK(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("load_matrix round trip and complements") {
  oracle::Gen gen(55);
  SUBCASE("1x1 value 3, q_w=2") {
    const auto w = QuantizedMatrix::from_values(1, 1, 2, false, {3});
    const auto p = plan({1, 1, 2, 1}, kGeom, reliable());
    auto subs = make_subarrays(p, reliable());
    load_matrix(p, w, subs);
    const auto& map = p.tiles[0].region_map;
    CHECK(subs[0].read_bit(map.matrix_rows[0], 0));
    CHECK(subs[0].read_bit(map.matrix_rows[0], 1));
    CHECK_FALSE(subs[0].read_bit(map.complement_rows[0], 0));
    CHECK_FALSE(subs[0].read_bit(map.complement_rows[0], 1));
    CHECK(subs[0].read_row(map.zero_row).popcount() == 0);
    CHECK(subs[0].read_row(map.one_row).popcount() == kGeom.column_count);
  }
  SUBCASE("signed -1 at q_w=4 is pattern 0111") {
    const auto w = QuantizedMatrix::from_values(1, 1, 4, true, {-1});
    const auto p = plan({1, 1, 4, 1, true}, kGeom, reliable());
    auto subs = make_subarrays(p, reliable());
    load_matrix(p, w, subs);
    const auto row = p.tiles[0].region_map.matrix_rows[0];
    CHECK(subs[0].read_bit(row, 0));
    CHECK(subs[0].read_bit(row, 1));
    CHECK(subs[0].read_bit(row, 2));
    CHECK_FALSE(subs[0].read_bit(row, 3));
  }
  SUBCASE("random matrices decode back, all widths") {
    for (unsigned qw = 1; qw <= 8; ++qw) {
      const std::uint32_t m = static_cast<std::uint32_t>(gen.range(1, 30));
      const std::uint32_t n = static_cast<std::uint32_t>(gen.range(1, 200));
      const bool sgn = gen.coin();
      const auto w = QuantizedMatrix::random(m, n, qw, sgn, gen.next());
      const auto p = plan({m, n, qw, 2, sgn}, kGeom, reliable());
      auto subs = make_subarrays(p, reliable());
      load_matrix(p, w, subs);
      for (std::size_t t = 0; t < p.tiles.size(); ++t) {
        const auto& tile = p.tiles[t];
        for (std::uint32_t nn = 0; nn < tile.n_span(); ++nn) {
          auto comp = subs[t].read_row(tile.region_map.complement_rows[nn]);
          comp.flip_all();
          REQUIRE(comp == subs[t].read_row(tile.region_map.matrix_rows[nn]));
          for (std::uint32_t mm = 0; mm < tile.m_count(); ++mm) {
            std::uint32_t code = 0;
            for (unsigned i = 0; i < qw; ++i) {
              code |= std::uint32_t{subs[t].read_bit(tile.region_map.matrix_rows[nn], tile.group_starts[mm] + i)} << i;
            }
            REQUIRE(code == w.code(tile.m0 + mm, tile.n0 + nn));
          }
        }
      }
    }
  }
  SUBCASE("shape mismatch") {
    const auto p = plan({2, 3, 2, 1}, kGeom, reliable());
    auto subs = make_subarrays(p, reliable());
    CHECK_THROWS_AS(load_matrix(p, QuantizedMatrix::random(3, 3, 2, false, 1), subs), ConfigError);
  }
}

TEST_CASE("capacity report") {
  const auto p = plan({16, 128, 4, 4}, kGeom, reliable());
  const auto report = capacity_report(p);
  REQUIRE(report.per_subarray.size() == 1);
  const auto& c = report.per_subarray[0];
  CHECK(c.matrix_rows + c.complement_rows == 256);
  CHECK(c.output_rows == 12);
  CHECK(c.compute_rows <= 26);
  CHECK(c.overhead_ratio() < 0.15);
  CHECK(report.totals == c);
  CHECK(capacity_report(GemvPlan{}).totals.total() == 0);

  // A one-element span is dominated by compute and output rows.
  const auto one = plan({16, 1, 4, 4}, kGeom, reliable()).capacity;
  CHECK(one.compute_rows + one.output_rows > one.matrix_rows + one.complement_rows);
}

TEST_CASE("encoder") {
  const auto profiles = reliable();
  SUBCASE("all-zero activation in sparse mode copies no matrix rows") {
    const auto p = plan({8, 100, 3, 2}, kGeom, profiles);
    const auto a = ActivationVector::from_values(2, false, std::vector<std::int32_t>(100, 0));
    TemplateStore store;
    for (const auto& t : encode(p, a, EncodingMode::Sparse, store)) {
      for (const auto& cmd : t.commands()) {
        if (const auto* rc = std::get_if<RowCopy>(&cmd)) {
          CHECK((rc->src == 0 || rc->src == 1 || rc->src >= 2 + 2 * 100));
        }
      }
    }
  }
  SUBCASE("single set element stages one matrix row and its complement") {
    const auto p = plan({8, 16, 2, 1}, kGeom, profiles);
    std::vector<std::int32_t> v(16, 0);
    v[5] = 1;
    const auto a = ActivationVector::from_values(1, false, v);
    TemplateStore store;
    const auto traces = encode(p, a, EncodingMode::Sparse, store);
    const auto& map = p.tiles[0].region_map;
    int from_row = 0, from_comp = 0, other_matrix = 0;
    for (const auto& cmd : traces[0].commands()) {
      if (const auto* rc = std::get_if<RowCopy>(&cmd)) {
        if (rc->src == map.matrix_rows[5]) ++from_row;
        else if (rc->src == map.complement_rows[5]) ++from_comp;
        else if (rc->src >= 2 && rc->src < 2 + 2 * 16) ++other_matrix;
      }
    }
    CHECK(from_row == 1);
    CHECK(from_comp == 1);
    CHECK(other_matrix == 0);
  }
  SUBCASE("partial-product copies equal total popcount over tiles") {
    oracle::Gen gen(8);
    for (int trial = 0; trial < 20; ++trial) {
      const std::uint32_t n = static_cast<std::uint32_t>(gen.range(1, 300));
      const unsigned qa = static_cast<unsigned>(gen.range(1, 4));
      const auto p = plan({static_cast<std::uint32_t>(gen.range(1, 200)), n, 2, qa}, kGeom, profiles);
      const auto a = ActivationVector::random(n, qa, false, 0.5, gen.next());
      TemplateStore store;
      const auto traces = encode(p, a, EncodingMode::Sparse, store);
      std::uint64_t copies = 0, expected = 0;
      for (std::size_t t = 0; t < traces.size(); ++t) {
        const auto& tile = p.tiles[t];
        for (const auto& cmd : traces[t].commands()) {
          if (const auto* rc = std::get_if<RowCopy>(&cmd)) {
            copies += rc->src >= 2 && rc->src < 2 + 2 * tile.n_span() && (rc->src % 2 == 0);
          }
        }
        for (unsigned k = 0; k < qa; ++k) expected += a.popcount(tile.n0, tile.n1, k);
      }
      CHECK(copies == expected);
    }
  }
  SUBCASE("sparse never exceeds naive, equality only at full density") {
    oracle::Gen gen(9);
    for (double sparsity : {0.0, 0.3, 0.7, 1.0}) {
      const auto p = plan({10, 200, 2, 3}, kGeom, profiles);
      const auto a = ActivationVector::random(200, 3, false, sparsity, gen.next());
      TemplateStore store;
      const auto sparse = trace_stats(encode(p, a, EncodingMode::Sparse, store)).total;
      const auto naive = trace_stats(encode(p, a, EncodingMode::Naive, store)).total;
      if (sparsity == 0.0) {
        CHECK(sparse == naive);
      } else {
        CHECK(sparse.total() < naive.total());
      }
    }
  }
  SUBCASE("monotone in nested supports") {
    oracle::Gen gen(10);
    const auto p = plan({6, 256, 2, 2}, kGeom, profiles);
    std::vector<std::int32_t> v(256, 3);
    std::vector<std::uint32_t> order(256 * 2);
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[gen.below(i)]);
    TemplateStore store;
    std::uint64_t last = ~std::uint64_t{0};
    for (std::size_t step = 0; step <= order.size(); step += 16) {
      const auto a = ActivationVector::from_values(2, false, v);
      const auto total = trace_stats(encode(p, a, EncodingMode::Sparse, store)).total.total();
      CHECK(total <= last);
      last = total;
      for (std::size_t i = step; i < std::min(order.size(), step + 16); ++i) {
        v[order[i] / 2] &= ~(1 << (order[i] % 2));
      }
    }
  }
  SUBCASE("determinism and streaming") {
    const auto p = plan({20, 300, 3, 3}, kGeom, profiles);
    const auto a = ActivationVector::random(300, 3, false, 0.4, 77);
    TemplateStore s1, s2;
    const auto t1 = encode(p, a, EncodingMode::Sparse, s1);
    const auto t2 = encode(p, a, EncodingMode::Sparse, s2);
    REQUIRE(t1.size() == t2.size());
    std::vector<Trace> streamed(t1.size());
    std::vector<std::size_t> order;
    encode_streaming(p, a, EncodingMode::Sparse, s2, [&](std::size_t i, Trace t) {
      order.push_back(i);
      streamed[i] = std::move(t);
    });
    for (std::size_t i = 0; i < t1.size(); ++i) {
      CHECK(t1[i].to_text() == t2[i].to_text());
      CHECK(t1[i].to_text() == streamed[i].to_text());
      CHECK(order[i] == i);
      CHECK(validate_trace(t1[i], kGeom).valid());
    }
  }
  SUBCASE("trace_stats") {
    CHECK(trace_stats({}).total == CommandStats{});
    const auto p = plan({4, 50, 2, 2}, kGeom, profiles);
    TemplateStore store;
    const auto traces = encode(p, ActivationVector::random(50, 2, false, 0.5, 3), EncodingMode::Naive, store);
    const auto summary = trace_stats(traces);
    CommandStats sum;
    for (const auto& t : traces) sum += recount(t.commands());
    CHECK(summary.total == sum);
    CHECK(summary.per_tile.size() == traces.size());
  }
  SUBCASE("mismatched activation") {
    const auto p = plan({4, 50, 2, 2}, kGeom, profiles);
    TemplateStore store;
    CHECK_THROWS_AS(encode(p, ActivationVector::random(49, 2, false, 0.5, 3), EncodingMode::Naive, store),
                    ConfigError);
    CHECK_THROWS_AS(encode(p, ActivationVector::random(50, 3, false, 0.5, 3), EncodingMode::Naive, store),
                    ConfigError);
    CHECK_THROWS_AS(parse_encoding_mode("dense"), ConfigError);
  }
}

TEST_CASE("engine") {
  const auto profiles = reliable();
  SUBCASE("empty trace leaves state unchanged, replay is deterministic") {
    Subarray s(kGeom, profiles[0]);
    oracle::Gen gen(1);
    for (RowIndex r = 0; r < 20; ++r) s.write_row(r, gen.bits(kGeom.column_count));
    Subarray copy = s;
    execute(Trace{}, s);
    CHECK(s.same_cells(copy));
    Trace t;
    t.push(RowCopy{1, 2});
    t.push(MajX{3, 4, 5});
    t.push(HostRead{6});
    execute(t, s);
    execute(t, copy);
    CHECK(s.same_cells(copy));
  }
  SUBCASE("host reads never write") {
    Subarray s(kGeom, profiles[0]);
    oracle::Gen gen(2);
    for (RowIndex r = 0; r < 20; ++r) s.write_row(r, gen.bits(kGeom.column_count));
    const Subarray before = s;
    Trace t;
    for (RowIndex r = 0; r < 20; ++r) t.push(HostRead{r});
    execute(t, s);
    CHECK(s.same_cells(before));
    const auto p = plan({3, 3, 2, 1}, kGeom, profiles);
    (void)read_tile_outputs(p, p.tiles[0], s);
    CHECK(s.same_cells(before));
  }
  SUBCASE("packed read formula r=2") {
    const auto p = plan({1, 1, 2, 1}, kGeom, profiles);
    REQUIRE(p.r == 2);
    Subarray s(kGeom, profiles[0]);
    const auto& map = p.tiles[0].region_map;
    BitVector row0(kGeom.column_count), row1(kGeom.column_count);
    row0.set(0, true);  // v0 = 1
    row1.set(1, true);  // v1 = 2
    s.write_row(map.output_rows[0], row0);
    s.write_row(map.output_rows[1], row1);
    s.row_copy(0, 0);  // mark executed
    const auto partial = read_tile_outputs(p, p.tiles[0], s);
    CHECK(partial.values[0] == 5);
    CHECK(partial.rows_read == 2);
  }
  SUBCASE("reading before execution is stale") {
    const auto p = plan({2, 2, 2, 1}, kGeom, profiles);
    auto subs = make_subarrays(p, profiles);
    load_matrix(p, QuantizedMatrix::random(2, 2, 2, false, 1), subs);
    const auto partial = read_tile_outputs(p, p.tiles[0], subs[0]);
    CHECK(partial.stale);
    CHECK(std::all_of(partial.values.begin(), partial.values.end(), [](auto v) { return v == 0; }));
  }
  SUBCASE("aggregate examples") {
    const auto w = QuantizedMatrix::from_values(2, 3, 2, false, {1, 2, 3, 0, 1, 0});
    const auto x = ActivationVector::from_values(1, false, {1, 1, 1});
    const auto p = plan({2, 3, 2, 1}, kGeom, profiles);
    TemplateStore store;
    CHECK(verify(p, w, x, EncodingMode::Sparse, profiles, store).output == std::vector<std::int64_t>{6, 1});

    const auto ws = QuantizedMatrix::from_values(1, 2, 2, true, {-1, -2});
    const auto xs = ActivationVector::from_values(1, false, {1, 1});
    const auto ps = plan({1, 2, 2, 1, true}, kGeom, profiles);
    CHECK(verify(ps, ws, xs, EncodingMode::Sparse, profiles, store).output == std::vector<std::int64_t>{-3});

    const auto zero = ActivationVector::from_values(2, true, std::vector<std::int32_t>(3, -2));
    const auto pz = plan({2, 3, 2, 2, false, true}, kGeom, profiles);
    const auto rz = verify(pz, w, zero, EncodingMode::Sparse, profiles, store);
    CHECK(rz.match);
    CHECK(rz.output == std::vector<std::int64_t>{-12, -2});

    CHECK_THROWS_AS(aggregate(p, {}, w, x), IncompleteResultError);
  }
  SUBCASE("random packed reads match the transposing reader") {
    oracle::Gen gen(31);
    for (int trial = 0; trial < 25; ++trial) {
      const unsigned qw = static_cast<unsigned>(gen.range(1, 8));
      const auto p = plan({static_cast<std::uint32_t>(gen.range(1, 30)), 64, qw, 3}, kGeom, profiles);
      Subarray s(kGeom, profiles[0]);
      for (auto r : p.tiles[0].region_map.output_rows) s.write_row(r, gen.bits(kGeom.column_count));
      s.row_copy(0, 0);
      CHECK(read_tile_outputs(p, p.tiles[0], s).values == oracle::transposing_read(p.tiles[0], qw, s));
    }
  }
  SUBCASE("tile order does not matter") {
    oracle::Gen gen(12);
    const auto p = plan({40, 400, 3, 2, true, true}, SubarrayGeometry{512, 128}, reliable(128));
    const auto w = QuantizedMatrix::random(40, 400, 3, true, 5);
    const auto a = ActivationVector::random(400, 2, true, 0.5, 6);
    TemplateStore store;
    const auto profiles128 = reliable(128);
    auto subs = make_subarrays(p, profiles128);
    load_matrix(p, w, subs);
    const auto traces = encode(p, a, EncodingMode::Sparse, store);
    std::vector<TilePartial> partials;
    for (std::size_t t = 0; t < traces.size(); ++t) {
      execute(traces[t], subs[t]);
      partials.push_back(read_tile_outputs(p, p.tiles[t], subs[t]));
    }
    const auto forward = aggregate(p, partials, w, a).output;
    for (int i = 0; i < 5; ++i) {
      for (std::size_t k = partials.size(); k > 1; --k) std::swap(partials[k - 1], partials[gen.below(k)]);
      CHECK(aggregate(p, partials, w, a).output == forward);
    }
    CHECK(forward == oracle::gemv(w, a));
  }
  SUBCASE("bit-decomposition identity") {
    oracle::Gen gen(13);
    for (int trial = 0; trial < 200; ++trial) {
      const unsigned qw = static_cast<unsigned>(gen.range(1, 8));
      const std::size_t n = gen.below(64) + 1;
      std::vector<std::uint64_t> ua(n), uw(n);
      for (std::size_t j = 0; j < n; ++j) {
        ua[j] = gen.below(256);
        uw[j] = gen.below(std::uint64_t{1} << qw);
      }
      std::uint64_t lhs = 0, rhs = 0;
      for (unsigned i = 0; i < qw; ++i) {
        std::uint64_t plane = 0;
        for (std::size_t j = 0; j < n; ++j) plane += ua[j] * ((uw[j] >> i) & 1);
        lhs += plane << i;
      }
      for (std::size_t j = 0; j < n; ++j) rhs += ua[j] * uw[j];
      REQUIRE(lhs == rhs);
    }
  }
  SUBCASE("end to end on random instances, both modes, parallel and serial") {
    oracle::Gen gen(14);
    for (int trial = 0; trial < 60; ++trial) {
      const std::uint32_t m = static_cast<std::uint32_t>(gen.range(1, 64));
      const std::uint32_t n = static_cast<std::uint32_t>(gen.range(1, 512));
      const unsigned qw = static_cast<unsigned>(gen.range(1, 8));
      const unsigned qa = static_cast<unsigned>(gen.range(1, 8));
      const bool sw = gen.coin(), sa = gen.coin();
      const double sparsity = gen.pick(std::vector<double>{0.0, 0.5, 0.9});
      const SubarrayGeometry g{512, 1024};
      const auto prof = reliable(1024);
      const auto p = plan({m, n, qw, qa, sw, sa}, g, prof);
      const auto w = QuantizedMatrix::random(m, n, qw, sw, gen.next());
      const auto a = ActivationVector::random(n, qa, sa, sparsity, gen.next());
      TemplateStore store;
      const auto mode = gen.coin() ? EncodingMode::Naive : EncodingMode::Sparse;
      ExecPolicy policy;
      policy.kernel = gen.coin() ? kernels::Policy::Parallel : kernels::Policy::Serial;
      policy.parallel_tiles = gen.coin();
      const auto report = verify(p, w, a, mode, prof, store, policy);
      REQUIRE(report.match);
      REQUIRE(report.output == oracle::gemv(w, a));
    }
  }
  SUBCASE("forcing tiles onto faulty columns produces mismatches") {
    const SubarrayGeometry g{512, 512};
    std::vector<ColumnRun> runs;
    for (ColumnIndex c = 0; c < 512; c += 8) runs.push_back({c, 6});
    const std::vector<ReliabilityProfile> faulty{ReliabilityProfile::from_runs(512, runs, 4242)};
    const auto w = QuantizedMatrix::random(64, 200, 4, false, 1);
    const auto a = ActivationVector::random(200, 2, false, 0.3, 2);
    TemplateStore store;
    CHECK(verify(plan({64, 200, 4, 2}, g, faulty), w, a, EncodingMode::Sparse, faulty, store).match);
    PlanOptions hook;
    hook.ignore_reliability = true;
    const auto bad = verify(plan({64, 200, 4, 2}, g, faulty, hook), w, a, EncodingMode::Sparse, faulty, store);
    CHECK_FALSE(bad.match);
    CHECK_FALSE(bad.mismatches.empty());
  }
}
