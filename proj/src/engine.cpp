#include "mvdram/engine.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>

#include "mvdram/errors.hpp"

namespace mvdram {

namespace {
__extension__ typedef __int128 Wide;
}  // namespace

void execute(const Trace& trace, Subarray& s) {
  for (const auto& cmd : trace.commands()) {
    std::visit(
        [&s](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, RowCopy>) {
            s.row_copy(c.src, c.dst);
          } else if constexpr (std::is_same_v<T, MajX>) {
            s.maj(c.group());
          }
        },
        cmd);
  }
}

TilePartial read_tile_outputs(const GemvPlan& plan, const TileAssignment& tile, const Subarray& s) {
  TilePartial p;
  p.tile_id = tile.tile_id;
  p.values.assign(tile.m_count(), 0);
  p.stale = s.commands_applied() == 0;
  const auto& rows = tile.region_map.output_rows;
  p.rows_read = static_cast<unsigned>(rows.size());
  if (p.stale) return p;
  const unsigned q = plan.shape.q_w;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto words = s.row_words(rows[t]);
    for (std::uint32_t m = 0; m < tile.m_count(); ++m) {
      const ColumnIndex c = tile.group_starts[m];
      // The q_w-bit group may straddle a word boundary.
      std::uint64_t v = words[c / kWordBits] >> (c % kWordBits);
      if (c % kWordBits + q > kWordBits) v |= words[c / kWordBits + 1] << (kWordBits - c % kWordBits);
      v &= (std::uint64_t{1} << q) - 1;
      p.values[m] += v << t;
    }
  }
  return p;
}

GemvResult aggregate(const GemvPlan& plan, std::span<const TilePartial> partials, const QuantizedMatrix& matrix,
                     const ActivationVector& a) {
  std::vector<const TilePartial*> by_tile(plan.tiles.size(), nullptr);
  for (const auto& p : partials) {
    if (p.tile_id < by_tile.size()) by_tile[p.tile_id] = &p;
  }
  std::vector<std::uint32_t> missing;
  for (std::uint32_t i = 0; i < by_tile.size(); ++i) {
    if (!by_tile[i]) missing.push_back(i);
  }
  if (!missing.empty()) {
    std::string list;
    for (auto i : missing) list += (list.empty() ? "" : ",") + std::to_string(i);
    throw IncompleteResultError("missing partials for tiles " + list, missing);
  }

  const Wide z_w = matrix.zero_point();
  const Wide z_a = a.zero_point();
  std::vector<Wide> acc(plan.shape.m, 0);
  GemvResult result;
  for (const auto& tile : plan.tiles) {
    const auto& p = *by_tile[tile.tile_id];
    if (p.values.size() != tile.m_count()) throw ConfigError("partial size mismatch for tile " + std::to_string(tile.tile_id));
    const Wide code_sum = a.code_sum(tile.n0, tile.n1);
    const Wide n_span = tile.n_span();
    const bool corrected = z_w != 0 || z_a != 0;
    for (std::uint32_t m = 0; m < tile.m_count(); ++m) {
      Wide o = p.values[m];
      if (corrected) {
        o -= z_a * matrix.row_sum(tile.m0 + m, tile.n0, tile.n1) + z_w * code_sum;
        o += n_span * z_a * z_w;
      }
      acc[tile.m0 + m] += o;
    }
    ++result.tiles_reduced;
    if (corrected) ++result.corrections_applied;
    if (p.stale) ++result.stale_tiles;
  }
  result.output.reserve(acc.size());
  for (const auto v : acc) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
      throw PlanError("aggregated output exceeds 64 bits");
    }
    result.output.push_back(static_cast<std::int64_t>(v));
  }
  return result;
}

std::vector<std::int64_t> reference_gemv(const QuantizedMatrix& matrix, const ActivationVector& a) {
  if (a.size() != matrix.cols()) throw ConfigError("activation length does not match matrix columns");
  std::vector<std::int64_t> out(matrix.rows(), 0);
  for (std::uint32_t m = 0; m < matrix.rows(); ++m) {
    std::int64_t s = 0;
    for (std::uint32_t j = 0; j < matrix.cols(); ++j) s += std::int64_t{matrix.value(m, j)} * a.value(j);
    out[m] = s;
  }
  return out;
}

GemvRun run_gemv(const GemvPlan& plan, const QuantizedMatrix& matrix, const ActivationVector& a, EncodingMode mode,
                 std::span<const ReliabilityProfile> profiles, TemplateStore& store, const ExecPolicy& policy) {
  GemvRun run;
  auto subs = make_subarrays(plan, profiles, policy.kernel);
  load_matrix(plan, matrix, subs);
  run.traces = encode(plan, a, mode, store);
  std::vector<TilePartial> partials(plan.tiles.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(plan.tiles.size());
#pragma omp parallel for schedule(dynamic) if (policy.parallel_tiles)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto t = static_cast<std::size_t>(i);
    try {
      execute(run.traces[t], subs[t]);
      partials[t] = read_tile_outputs(plan, plan.tiles[t], subs[t]);
    } catch (...) {
#pragma omp critical(mvdram_exec_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  run.result = aggregate(plan, partials, matrix, a);
  run.stats = trace_stats(run.traces);
  return run;
}

VerifyReport verify(const GemvPlan& plan, const QuantizedMatrix& matrix, const ActivationVector& a, EncodingMode mode,
                    std::span<const ReliabilityProfile> profiles, TemplateStore& store, const ExecPolicy& policy) {
  VerifyReport report;
  auto run = run_gemv(plan, matrix, a, mode, profiles, store, policy);
  const auto expected = reference_gemv(matrix, a);
  for (std::uint32_t m = 0; m < expected.size(); ++m) {
    if (run.result.output[m] != expected[m]) report.mismatches.push_back({m, expected[m], run.result.output[m]});
  }
  report.match = report.mismatches.empty();
  report.output = std::move(run.result.output);
  report.stats = std::move(run.stats);
  return report;
}

}  // namespace mvdram
