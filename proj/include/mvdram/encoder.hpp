#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "mvdram/layout.hpp"
#include "mvdram/quant.hpp"
#include "mvdram/templates.hpp"
#include "mvdram/trace.hpp"

namespace mvdram {

enum class EncodingMode : std::uint8_t {
  Naive,   // a zero bit stages the constant rows
  Sparse,  // a zero bit issues nothing
};

std::string_view to_string(EncodingMode mode);
EncodingMode parse_encoding_mode(std::string_view text);

std::shared_ptr<const TraceTemplate> select_template(TemplateStore& store, const TileShape& shape, unsigned plane,
                                                     const AccumulatorState& state, std::uint32_t popcount);

/// Trace for one tile: planes LSB first, each plane's set bits substituted into its template.
Trace encode_tile(const GemvPlan& plan, const TileAssignment& tile, const ActivationVector& a, EncodingMode mode,
                  TemplateStore& store);

/// One trace per tile, in plan order. Tiles are encoded in parallel.
std::vector<Trace> encode(const GemvPlan& plan, const ActivationVector& a, EncodingMode mode, TemplateStore& store);

/// Hands each tile's trace to `sink` as soon as it is built, in plan order.
void encode_streaming(const GemvPlan& plan, const ActivationVector& a, EncodingMode mode, TemplateStore& store,
                      const std::function<void(std::size_t tile_index, Trace trace)>& sink);

struct TraceSummary {
  CommandStats total;
  std::vector<CommandStats> per_tile;
};

TraceSummary trace_stats(std::span<const Trace> traces);

void check_activation(const GemvPlan& plan, const ActivationVector& a);

}  // namespace mvdram
