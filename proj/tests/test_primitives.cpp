#include <algorithm>
#include <vector>

#include "doctest.h"
#include "mvdram/errors.hpp"
#include "mvdram/kernels.hpp"
#include "mvdram/reliability.hpp"
#include "mvdram/subarray.hpp"
#include "oracles.hpp"

using namespace mvdram;

namespace {

SubarrayGeometry small_geometry(std::uint32_t cols = 200) { return {256, cols}; }

}  // namespace

TEST_CASE("bitvector trims padding and counts bits") {
  BitVector b(70, true);
  CHECK(b.popcount() == 70);
  b.flip_all();
  CHECK(b.popcount() == 0);
  b.set(69, true);
  CHECK(b.get(69));
  CHECK(b.words()[1] == (std::uint64_t{1} << 5));
}

TEST_CASE("majority kernels agree with the per-column definition") {
  oracle::Gen gen(7);
  for (std::size_t count : {3u, 5u, 7u, 9u, 11u, 13u, 15u}) {
    for (std::size_t columns : {1u, 63u, 64u, 65u, 300u}) {
      std::vector<BitVector> rows;
      for (std::size_t i = 0; i < count; ++i) rows.push_back(gen.bits(columns));
      std::vector<const std::uint64_t*> ptrs;
      for (const auto& r : rows) ptrs.push_back(r.words().data());
      const std::size_t words = words_for_bits(columns);
      for (auto policy : {kernels::Policy::Reference, kernels::Policy::Serial, kernels::Policy::Parallel}) {
        std::vector<std::uint64_t> out(words, 0);
        kernels::majority(policy, ptrs, columns, out.data());
        const BitVector result(columns, out);
        for (std::size_t c = 0; c < columns; ++c) {
          std::vector<bool> col;
          for (const auto& r : rows) col.push_back(r.get(c));
          REQUIRE(result.get(c) == oracle::majority(col));
        }
      }
    }
  }
}

TEST_CASE("reliability profiles") {
  SUBCASE("module profiles hit the listed minimum exactly") {
    for (const auto& m : kModuleReliability) {
      const auto p = builtin_profile(m.name);
      CHECK(p.column_count() == kModuleColumns);
      CHECK(p.reliable_count() == m.min_reliable);
    }
  }
  SUBCASE("module profiles are deterministic") {
    CHECK(builtin_profile("module1").reliable_mask == builtin_profile("module1").reliable_mask);
    CHECK_FALSE(builtin_profile("module1").reliable_mask == builtin_profile("module2").reliable_mask);
  }
  SUBCASE("width-2 groups skip an isolated reliable column") {
    // reliable: [0,2), [3,4), [5,9)
    const auto p = ReliabilityProfile::from_runs(10, {{0, 2}, {3, 1}, {5, 4}}, 1);
    CHECK(usable_column_groups(p, 2) == std::vector<ColumnIndex>{0, 5, 7});
    CHECK(usable_column_groups(p, 1).size() == 7);
  }
  SUBCASE("json round trip") {
    const auto p = ReliabilityProfile::from_runs(32, {{1, 5}, {20, 3}}, 99, FaultMode::StuckRandom);
    const auto q = profile_from_json(profile_to_json(p));
    CHECK(q.reliable_mask == p.reliable_mask);
    CHECK(q.fault_seed == 99);
    CHECK(q.fault_mode == FaultMode::StuckRandom);
  }
  SUBCASE("bad inputs") {
    CHECK_THROWS_AS(builtin_profile("module9"), ConfigError);
    CHECK_THROWS_AS(builtin_profile("module1", 1024), ConfigError);
    CHECK_THROWS_AS(load_profile("/nonexistent/profile.json"), ConfigError);
    CHECK_THROWS_AS(parse_fault_mode("sometimes"), ConfigError);
  }
}

TEST_CASE("subarray primitives") {
  const auto g = small_geometry();
  oracle::Gen gen(11);

  SUBCASE("row copy duplicates a row and leaves the source intact") {
    Subarray s(g, ReliabilityProfile::all_reliable(g.column_count));
    const auto bits = gen.bits(g.column_count);
    s.write_row(3, bits);
    s.row_copy(3, 9);
    CHECK(s.read_row(9) == bits);
    CHECK(s.read_row(3) == bits);
  }
  SUBCASE("row copy onto itself is a counted no-op") {
    Subarray s(g, ReliabilityProfile::all_reliable(g.column_count));
    const auto bits = gen.bits(g.column_count);
    s.write_row(4, bits);
    s.row_copy(4, 4);
    CHECK(s.read_row(4) == bits);
    CHECK(s.warnings() == 1);
  }
  SUBCASE("MAJ writes the majority into every activated row") {
    Subarray s(g, ReliabilityProfile::all_reliable(g.column_count));
    std::vector<BitVector> in;
    for (RowIndex r = 10; r < 15; ++r) {
      in.push_back(gen.bits(g.column_count));
      s.write_row(r, in.back());
    }
    const std::vector<RowIndex> group{10, 11, 12, 13, 14};
    s.maj(group);
    for (ColumnIndex c = 0; c < g.column_count; ++c) {
      std::vector<bool> col;
      for (const auto& b : in) col.push_back(b.get(c));
      for (auto r : group) REQUIRE(s.read_bit(r, c) == oracle::majority(col));
    }
  }
  SUBCASE("errors") {
    Subarray s(g, ReliabilityProfile::all_reliable(g.column_count));
    CHECK_THROWS_AS(s.row_copy(0, g.row_count), AddressError);
    CHECK_THROWS_AS(s.read_bit(0, g.column_count), AddressError);
    const std::vector<RowIndex> even{1, 2, 3, 4};
    CHECK_THROWS_AS(s.maj(even), GroupError);
    const std::vector<RowIndex> dup{1, 2, 2};
    CHECK_THROWS_AS(s.maj(dup), GroupError);
    const std::vector<RowIndex> big(17, 0);
    CHECK_THROWS_AS(s.maj(big), GroupError);
    CHECK_THROWS_AS(s.write_row(0, BitVector(g.column_count + 1)), ConfigError);
    CHECK_THROWS_AS(SubarrayGeometry({100, 64}).validate(), ConfigError);
    CHECK_THROWS_AS(SubarrayGeometry({2048, 64}).validate(), ConfigError);
  }
  SUBCASE("faults only ever touch unreliable columns") {
    for (auto mode : {FaultMode::Flip, FaultMode::StuckRandom}) {
      auto p = ReliabilityProfile::from_runs(g.column_count, {{0, 50}, {60, 100}, {180, 20}}, 1234, mode);
      Subarray s(g, p);
      Subarray ideal(g, ReliabilityProfile::all_reliable(g.column_count));
      std::size_t differing = 0;
      for (int trial = 0; trial < 30; ++trial) {
        for (RowIndex r = 0; r < 3; ++r) {
          const auto b = gen.bits(g.column_count);
          s.write_row(r, b);
          ideal.write_row(r, b);
        }
        const std::vector<RowIndex> group{0, 1, 2};
        s.maj(group);
        ideal.maj(group);
        for (ColumnIndex c = 0; c < g.column_count; ++c) {
          if (s.read_bit(0, c) != ideal.read_bit(0, c)) {
            REQUIRE_FALSE(p.reliable(c));
            ++differing;
          }
        }
      }
      CHECK(differing > 0);
    }
  }
  SUBCASE("kernel policies produce identical cells") {
    auto p = ReliabilityProfile::from_runs(g.column_count, {{0, 120}}, 5);
    Subarray a(g, p, kernels::Policy::Reference), b(g, p, kernels::Policy::Serial), c(g, p, kernels::Policy::Parallel);
    for (RowIndex r = 0; r < 7; ++r) {
      const auto bits = gen.bits(g.column_count);
      a.write_row(r, bits);
      b.write_row(r, bits);
      c.write_row(r, bits);
    }
    for (auto* s : {&a, &b, &c}) {
      const std::vector<RowIndex> g7{0, 1, 2, 3, 4, 5, 6};
      s->maj(g7);
      s->row_copy(0, 10);
    }
    CHECK(a.same_cells(b));
    CHECK(b.same_cells(c));
  }
}
