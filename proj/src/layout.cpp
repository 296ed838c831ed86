#include "mvdram/layout.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "mvdram/errors.hpp"

namespace mvdram {

void GemvShape::validate() const {
  if (m < 1 || n < 1) throw ConfigError("GeMV dimensions must be >= 1");
  if (q_w < 1 || q_w > 8) throw ConfigError("weight bits " + std::to_string(q_w) + " outside 1-8");
  if (q_a < 1 || q_a > 8) throw ConfigError("activation bits " + std::to_string(q_a) + " outside 1-8");
}

unsigned accumulator_width(unsigned q_a, std::uint32_t n_tile) { return q_a + ceil_log2(n_tile) + 1; }

std::uint32_t RegionMap::rows_used() const {
  return static_cast<std::uint32_t>(2 + matrix_rows.size() + complement_rows.size() + compute_rows.size() +
                                    output_rows.size());
}

Accumulator RegionMap::make_accumulator(const AccumulatorState& state) const {
  std::vector<DualTrackCell> levels, partners;
  for (std::size_t t = 0; t < width(); ++t) levels.push_back(level(t));
  for (std::size_t i = 0; i < kPartnerCells; ++i) partners.push_back(partner(i));
  return Accumulator(std::move(levels), std::move(partners), constant_zero(), {transit(0), transit(1)},
                     std::vector<RowIndex>(scratch().begin(), scratch().end()), state);
}

RegionMap make_region_map(std::uint32_t n_tile, unsigned r) {
  RegionMap map;
  RowIndex next = 2;
  for (std::uint32_t n = 0; n < n_tile; ++n) {
    map.matrix_rows.push_back(next++);
    map.complement_rows.push_back(next++);
  }
  for (std::size_t i = 0; i < RegionMap::kFixedComputeRows + r; ++i) map.compute_rows.push_back(next++);
  for (unsigned t = 0; t < r; ++t) map.output_rows.push_back(next++);
  return map;
}

std::uint32_t rows_required(std::uint32_t n_tile, unsigned q_a) {
  const unsigned r = accumulator_width(q_a, n_tile);
  return 2 + 2 * n_tile + static_cast<std::uint32_t>(RegionMap::kFixedComputeRows) + 2 * r;
}

double CapacityBreakdown::overhead_ratio() const {
  const auto storage = matrix_rows + complement_rows;
  return storage == 0 ? 0.0 : static_cast<double>(compute_rows + output_rows) / static_cast<double>(storage);
}

CapacityBreakdown& CapacityBreakdown::operator+=(const CapacityBreakdown& o) {
  constant_rows += o.constant_rows;
  matrix_rows += o.matrix_rows;
  complement_rows += o.complement_rows;
  compute_rows += o.compute_rows;
  output_rows += o.output_rows;
  return *this;
}

const ReliabilityProfile& profile_for_subarray(std::span<const ReliabilityProfile> profiles, std::uint32_t id) {
  if (profiles.empty()) throw ConfigError("no reliability profiles supplied");
  return profiles[id % profiles.size()];
}

CapacityBreakdown tile_capacity(const TileAssignment& tile) {
  const auto& map = tile.region_map;
  return {2, map.matrix_rows.size(), map.complement_rows.size(), map.compute_rows.size(), map.output_rows.size()};
}

GemvPlan plan(const GemvShape& shape, const SubarrayGeometry& geometry, std::span<const ReliabilityProfile> profiles,
              const PlanOptions& options) {
  shape.validate();
  geometry.validate();
  if (profiles.empty()) throw ConfigError("no reliability profiles supplied");
  for (const auto& p : profiles) {
    if (p.column_count() != geometry.column_count) {
      throw ConfigError("profile '" + p.name + "' has " + std::to_string(p.column_count()) +
                        " columns, geometry has " + std::to_string(geometry.column_count));
    }
  }

  // Widest n-span that fits the row budget.
  std::uint32_t span = std::min({options.max_n_span, shape.n, kMaxNSpan});
  while (span > 0 && rows_required(span, shape.q_a) > geometry.row_count) --span;
  if (span == 0) {
    throw CapacityError("a single matrix row needs " + std::to_string(rows_required(1, shape.q_a)) +
                            " rows but the subarray has " + std::to_string(geometry.row_count),
                        rows_required(1, shape.q_a), geometry.row_count);
  }

  std::vector<std::vector<ColumnIndex>> groups(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    groups[i] = options.ignore_reliability
                    ? usable_column_groups(ReliabilityProfile::all_reliable(geometry.column_count), shape.q_w)
                    : usable_column_groups(profiles[i], shape.q_w);
    if (groups[i].empty()) {
      throw CapacityError("profile '" + profiles[i].name + "' has no run of " + std::to_string(shape.q_w) +
                              " reliable columns",
                          1, 0);
    }
  }

  // Count first so the deficit can be reported without building tiles.
  const std::uint32_t spans = (shape.n + span - 1) / span;
  std::uint64_t needed = 0;
  for (std::uint32_t s = 0; s < spans; ++s) {
    for (std::uint32_t m = 0; m < shape.m; ++needed) {
      m += static_cast<std::uint32_t>(std::min<std::size_t>(shape.m - m, groups[needed % groups.size()].size()));
    }
  }
  if (needed > options.subarray_budget) {
    throw CapacityError("GeMV " + std::to_string(shape.m) + "x" + std::to_string(shape.n) + " at " +
                            std::to_string(shape.q_w) + " weight bits needs " + std::to_string(needed) +
                            " subarrays, budget is " + std::to_string(options.subarray_budget) + " (deficit " +
                            std::to_string(needed - options.subarray_budget) + ")",
                        needed, options.subarray_budget);
  }

  GemvPlan result;
  result.shape = shape;
  result.geometry = geometry;
  result.n_span = span;
  result.r = accumulator_width(shape.q_a, span);
  result.tiles.reserve(needed);

  std::map<std::uint32_t, RegionMap> maps;
  std::uint32_t id = 0;
  for (std::uint32_t s = 0; s < spans; ++s) {
    const std::uint32_t n0 = s * span;
    const std::uint32_t n1 = std::min(shape.n, n0 + span);
    for (std::uint32_t m = 0; m < shape.m; ++id) {
      const auto& avail = groups[id % groups.size()];
      const auto count = static_cast<std::uint32_t>(std::min<std::size_t>(shape.m - m, avail.size()));
      TileAssignment tile;
      tile.tile_id = id;
      tile.subarray_id = id;
      tile.m0 = m;
      tile.m1 = m + count;
      tile.n0 = n0;
      tile.n1 = n1;
      tile.group_starts.assign(avail.begin(), avail.begin() + count);
      const std::uint32_t n_tile = n1 - n0;
      tile.shape = {n_tile, shape.q_w, shape.q_a, accumulator_width(shape.q_a, n_tile)};
      auto it = maps.find(n_tile);
      if (it == maps.end()) it = maps.emplace(n_tile, make_region_map(n_tile, tile.shape.r)).first;
      tile.region_map = it->second;
      result.tiles.push_back(std::move(tile));
      m += count;
    }
  }

  for (const auto& tile : result.tiles) {
    const auto c = tile_capacity(tile);
    if (c.total() > result.capacity.total()) result.capacity = c;
  }
  return result;
}

CapacityReport capacity_report(const GemvPlan& plan) {
  CapacityReport report;
  for (const auto& tile : plan.tiles) {
    report.per_subarray.push_back(tile_capacity(tile));
    report.totals += report.per_subarray.back();
  }
  return report;
}

std::vector<Subarray> make_subarrays(const GemvPlan& plan, std::span<const ReliabilityProfile> profiles,
                                     kernels::Policy policy) {
  std::vector<Subarray> subs;
  subs.reserve(plan.tiles.size());
  for (const auto& tile : plan.tiles) {
    subs.emplace_back(plan.geometry, profile_for_subarray(profiles, tile.subarray_id), policy);
  }
  return subs;
}

void load_matrix(const GemvPlan& plan, const QuantizedMatrix& matrix, std::span<Subarray> subarrays) {
  if (matrix.rows() != plan.shape.m || matrix.cols() != plan.shape.n || matrix.bits() != plan.shape.q_w ||
      matrix.is_signed() != plan.shape.signed_weights) {
    throw ConfigError("matrix " + std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) + " (" +
                      std::to_string(matrix.bits()) + " bits) does not match plan " + std::to_string(plan.shape.m) +
                      "x" + std::to_string(plan.shape.n) + " (" + std::to_string(plan.shape.q_w) + " bits)");
  }
  if (subarrays.size() != plan.tiles.size()) {
    throw ConfigError("plan has " + std::to_string(plan.tiles.size()) + " tiles but " +
                      std::to_string(subarrays.size()) + " subarrays were supplied");
  }
  const auto columns = plan.geometry.column_count;
  const auto tile_count = static_cast<std::ptrdiff_t>(plan.tiles.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < tile_count; ++t) {
    const auto& tile = plan.tiles[static_cast<std::size_t>(t)];
    auto& sub = subarrays[static_cast<std::size_t>(t)];
    const auto& map = tile.region_map;
    sub.write_row(map.zero_row, BitVector(columns, false));
    sub.write_row(map.one_row, BitVector(columns, true));
    for (std::uint32_t n = 0; n < tile.n_span(); ++n) {
      BitVector row(columns, false);
      for (std::uint32_t m = 0; m < tile.m_count(); ++m) {
        const auto code = matrix.code(tile.m0 + m, tile.n0 + n);
        for (unsigned i = 0; i < plan.shape.q_w; ++i) row.set(tile.group_starts[m] + i, (code >> i) & 1U);
      }
      sub.write_row(map.matrix_rows[n], row);
      row.flip_all();
      sub.write_row(map.complement_rows[n], row);
    }
    const BitVector zeros(columns, false);
    for (auto r : map.compute_rows) sub.write_row(r, zeros);
    for (auto r : map.output_rows) sub.write_row(r, zeros);
  }
}

nlohmann::json capacity_to_json(const CapacityBreakdown& c) {
  return {{"constant_rows", c.constant_rows}, {"matrix_rows", c.matrix_rows},   {"complement_rows", c.complement_rows},
          {"compute_rows", c.compute_rows},   {"output_rows", c.output_rows},   {"total_rows", c.total()},
          {"overhead_ratio", c.overhead_ratio()}};
}

nlohmann::json plan_to_json(const GemvPlan& plan) {
  nlohmann::json tiles = nlohmann::json::array();
  for (const auto& t : plan.tiles) {
    tiles.push_back({{"tile", t.tile_id},
                     {"subarray", t.subarray_id},
                     {"m_range", {t.m0, t.m1}},
                     {"n_range", {t.n0, t.n1}},
                     {"r", t.shape.r},
                     {"column_groups", t.group_starts}});
  }
  return {{"schema", 1},
          {"m", plan.shape.m},
          {"n", plan.shape.n},
          {"wbits", plan.shape.q_w},
          {"abits", plan.shape.q_a},
          {"signed_weights", plan.shape.signed_weights},
          {"signed_acts", plan.shape.signed_acts},
          {"rows", plan.geometry.row_count},
          {"columns", plan.geometry.column_count},
          {"n_span", plan.n_span},
          {"r", plan.r},
          {"tiles", std::move(tiles)},
          {"capacity", capacity_to_json(plan.capacity)}};
}

}  // namespace mvdram
