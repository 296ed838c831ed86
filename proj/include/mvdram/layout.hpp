#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "mvdram/logic.hpp"
#include "mvdram/quant.hpp"
#include "mvdram/reliability.hpp"
#include "mvdram/subarray.hpp"
#include "json.hpp"

namespace mvdram {

inline constexpr std::uint32_t kMaxNSpan = 128;

struct GemvShape {
  std::uint32_t m = 1;
  std::uint32_t n = 1;
  unsigned q_w = 1;
  unsigned q_a = 1;
  bool signed_weights = false;
  bool signed_acts = false;

  void validate() const;
  friend bool operator==(const GemvShape&, const GemvShape&) = default;
};

struct TileShape {
  std::uint32_t n_tile = 1;
  unsigned q_w = 1;
  unsigned q_a = 1;
  unsigned r = 2;
  friend auto operator<=>(const TileShape&, const TileShape&) = default;
};

/// r = q_a + ceil(log2(n_tile)) + 1.
unsigned accumulator_width(unsigned q_a, std::uint32_t n_tile);

/// Rows 0/1 hold the constants; matrix rows and their complements sit in adjacent pairs;
/// the compute region holds adder scratch, two transit cells, the accumulator's partner cells
/// and the complements of its levels;
/// the output region is the accumulator's pos track, one row per result bit.
struct RegionMap {
  RowIndex zero_row = 0;
  RowIndex one_row = 1;
  std::vector<RowIndex> matrix_rows;      // by local n
  std::vector<RowIndex> complement_rows;  // by local n
  std::vector<RowIndex> compute_rows;
  std::vector<RowIndex> output_rows;      // r rows, bit t of every partial sum in row t

  static constexpr std::size_t kTransitRows = 4;
  static constexpr std::size_t kPartnerCells = 2;
  static constexpr std::size_t kFixedComputeRows = kAdderScratchRows + kTransitRows + 2 * kPartnerCells;

  DualTrackCell constant_zero() const { return {zero_row, one_row}; }
  DualTrackCell matrix_cell(std::uint32_t n_local) const { return {matrix_rows[n_local], complement_rows[n_local]}; }
  std::span<const RowIndex> scratch() const { return {compute_rows.data(), kAdderScratchRows}; }
  DualTrackCell transit(std::size_t i) const {
    return {compute_rows[kAdderScratchRows + 2 * i], compute_rows[kAdderScratchRows + 2 * i + 1]};
  }
  DualTrackCell partner(std::size_t i) const {
    return {compute_rows[kAdderScratchRows + kTransitRows + 2 * i],
            compute_rows[kAdderScratchRows + kTransitRows + 2 * i + 1]};
  }
  DualTrackCell level(std::size_t t) const { return {output_rows[t], compute_rows[kFixedComputeRows + t]}; }
  std::size_t width() const { return output_rows.size(); }
  std::uint32_t rows_used() const;

  Accumulator make_accumulator(const AccumulatorState& state = {}) const;

  friend bool operator==(const RegionMap&, const RegionMap&) = default;
};

RegionMap make_region_map(std::uint32_t n_tile, unsigned r);
std::uint32_t rows_required(std::uint32_t n_tile, unsigned q_a);

struct TileAssignment {
  std::uint32_t tile_id = 0;
  std::uint32_t subarray_id = 0;
  std::uint32_t m0 = 0, m1 = 0;
  std::uint32_t n0 = 0, n1 = 0;
  std::vector<ColumnIndex> group_starts;  // one run of q_w reliable columns per local m
  TileShape shape;
  RegionMap region_map;

  std::uint32_t m_count() const { return m1 - m0; }
  std::uint32_t n_span() const { return n1 - n0; }
  ColumnIndex first_column() const { return group_starts.empty() ? 0 : group_starts.front(); }
  /// Columns between the first and last group inclusive (what a host read has to cover).
  ColumnIndex column_span() const {
    return group_starts.empty() ? 0 : group_starts.back() + shape.q_w - group_starts.front();
  }
};

struct CapacityBreakdown {
  std::uint64_t constant_rows = 0;
  std::uint64_t matrix_rows = 0;
  std::uint64_t complement_rows = 0;
  std::uint64_t compute_rows = 0;
  std::uint64_t output_rows = 0;

  std::uint64_t total() const { return constant_rows + matrix_rows + complement_rows + compute_rows + output_rows; }
  /// (compute + output) / (matrix + complement).
  double overhead_ratio() const;
  CapacityBreakdown& operator+=(const CapacityBreakdown& o);
  friend bool operator==(const CapacityBreakdown&, const CapacityBreakdown&) = default;
};

struct CapacityReport {
  std::vector<CapacityBreakdown> per_subarray;
  CapacityBreakdown totals;
};

struct PlanOptions {
  std::uint32_t max_n_span = kMaxNSpan;
  std::uint32_t subarray_budget = 4096;
  /// Test hook: plan as if every column were reliable, so tiles can land on faulty columns.
  bool ignore_reliability = false;
};

struct GemvPlan {
  GemvShape shape;
  SubarrayGeometry geometry;
  unsigned r = 0;  // accumulator width of a full n-span tile
  std::uint32_t n_span = 0;
  std::vector<TileAssignment> tiles;
  CapacityBreakdown capacity;  // largest per-subarray footprint

  std::uint32_t subarray_count() const { return static_cast<std::uint32_t>(tiles.size()); }
};

/// Subarray i takes profiles[i % profiles.size()].
const ReliabilityProfile& profile_for_subarray(std::span<const ReliabilityProfile> profiles, std::uint32_t id);

/// Horizontal layout plan: each tile takes an n-span of at most max_n_span rows and as many m
/// as its subarray has reliable q_w-wide column groups. Span-major tile order; tile i lives on
/// subarray i. Throws CapacityError when rows or the subarray budget run out.
GemvPlan plan(const GemvShape& shape, const SubarrayGeometry& geometry, std::span<const ReliabilityProfile> profiles,
              const PlanOptions& options = {});

CapacityBreakdown tile_capacity(const TileAssignment& tile);
CapacityReport capacity_report(const GemvPlan& plan);

std::vector<Subarray> make_subarrays(const GemvPlan& plan, std::span<const ReliabilityProfile> profiles,
                                     kernels::Policy policy = kernels::Policy::Serial);

/// Writes matrix bits, complements and constants; zeroes compute and output rows.
void load_matrix(const GemvPlan& plan, const QuantizedMatrix& matrix, std::span<Subarray> subarrays);

nlohmann::json plan_to_json(const GemvPlan& plan);
nlohmann::json capacity_to_json(const CapacityBreakdown& c);

}  // namespace mvdram
