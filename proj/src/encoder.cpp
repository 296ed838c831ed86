#include "mvdram/encoder.hpp"

#include <exception>
#include <string>

#include "mvdram/errors.hpp"

namespace mvdram {

std::string_view to_string(EncodingMode mode) { return mode == EncodingMode::Naive ? "naive" : "sparse"; }

EncodingMode parse_encoding_mode(std::string_view text) {
  if (text == "naive") return EncodingMode::Naive;
  if (text == "sparse") return EncodingMode::Sparse;
  throw ConfigError("unknown encoding mode '" + std::string(text) + "' (expected naive or sparse)");
}

std::shared_ptr<const TraceTemplate> select_template(TemplateStore& store, const TileShape& shape, unsigned plane,
                                                     const AccumulatorState& state, std::uint32_t popcount) {
  return store.get(TemplateKey{shape, plane, state, popcount});
}

void check_activation(const GemvPlan& plan, const ActivationVector& a) {
  if (a.size() != plan.shape.n || a.bits() != plan.shape.q_a || a.is_signed() != plan.shape.signed_acts) {
    throw ConfigError("activation (" + std::to_string(a.size()) + " elements, " + std::to_string(a.bits()) +
                      " bits) does not match plan (N=" + std::to_string(plan.shape.n) + ", " +
                      std::to_string(plan.shape.q_a) + " bits)");
  }
}

Trace encode_tile(const GemvPlan& plan, const TileAssignment& tile, const ActivationVector& a, EncodingMode mode,
                  TemplateStore& store) {
  check_activation(plan, a);
  const auto& map = tile.region_map;
  Trace trace(tile.subarray_id);
  std::vector<DualTrackCell> sources;
  sources.reserve(tile.n_span());
  AccumulatorState state;
  for (unsigned k = 0; k < plan.shape.q_a; ++k) {
    sources.clear();
    for (std::uint32_t j = tile.n0; j < tile.n1; ++j) {
      if (a.bit(j, k)) {
        sources.push_back(map.matrix_cell(j - tile.n0));
      } else if (mode == EncodingMode::Naive) {
        sources.push_back(map.constant_zero());
      }
    }
    const auto tpl =
        select_template(store, tile.shape, k, state, static_cast<std::uint32_t>(sources.size()));
    tpl->instantiate(sources, trace);
    state = tpl->state_out();
  }
  return trace;
}

std::vector<Trace> encode(const GemvPlan& plan, const ActivationVector& a, EncodingMode mode, TemplateStore& store) {
  check_activation(plan, a);
  std::vector<Trace> traces(plan.tiles.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(plan.tiles.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      traces[static_cast<std::size_t>(i)] = encode_tile(plan, plan.tiles[static_cast<std::size_t>(i)], a, mode, store);
    } catch (...) {
#pragma omp critical(mvdram_encode_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

void encode_streaming(const GemvPlan& plan, const ActivationVector& a, EncodingMode mode, TemplateStore& store,
                      const std::function<void(std::size_t, Trace)>& sink) {
  check_activation(plan, a);
  for (std::size_t i = 0; i < plan.tiles.size(); ++i) sink(i, encode_tile(plan, plan.tiles[i], a, mode, store));
}

TraceSummary trace_stats(std::span<const Trace> traces) {
  TraceSummary summary;
  summary.per_tile.reserve(traces.size());
  for (const auto& t : traces) {
    summary.per_tile.push_back(t.stats());
    summary.total += t.stats();
  }
  return summary;
}

}  // namespace mvdram
