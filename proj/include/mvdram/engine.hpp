#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvdram/encoder.hpp"
#include "mvdram/layout.hpp"
#include "mvdram/quant.hpp"
#include "mvdram/subarray.hpp"
#include "mvdram/templates.hpp"
#include "mvdram/trace.hpp"

namespace mvdram {

/// Applies every command in order. HostRead leaves state untouched.
void execute(const Trace& trace, Subarray& s);

struct TilePartial {
  std::uint32_t tile_id = 0;
  std::vector<std::uint64_t> values;  // o_u per local m
  unsigned rows_read = 0;
  bool stale = false;  // read before any command ran; values are all zero
};

/// Row-wise packed read: v_t = sum_i 2^i bit(t, group+i), o_u = sum_t 2^t v_t.
TilePartial read_tile_outputs(const GemvPlan& plan, const TileAssignment& tile, const Subarray& s);

struct GemvResult {
  std::vector<std::int64_t> output;
  std::uint32_t tiles_reduced = 0;
  std::uint32_t corrections_applied = 0;  // tiles whose partials needed zero-point correction
  std::uint32_t stale_tiles = 0;
};

/// Sums partials per m across n-spans with zero-point correction per span. Partials may come in
/// any order. Throws IncompleteResultError if a tile is missing.
GemvResult aggregate(const GemvPlan& plan, std::span<const TilePartial> partials, const QuantizedMatrix& matrix,
                     const ActivationVector& a);

/// Direct integer GeMV on signed values.
std::vector<std::int64_t> reference_gemv(const QuantizedMatrix& matrix, const ActivationVector& a);

struct ExecPolicy {
  kernels::Policy kernel = kernels::Policy::Serial;
  bool parallel_tiles = true;
};

struct GemvRun {
  GemvResult result;
  TraceSummary stats;
  std::vector<Trace> traces;
};

/// load -> encode -> execute -> read -> aggregate on fresh subarrays.
GemvRun run_gemv(const GemvPlan& plan, const QuantizedMatrix& matrix, const ActivationVector& a, EncodingMode mode,
                 std::span<const ReliabilityProfile> profiles, TemplateStore& store, const ExecPolicy& policy = {});

struct Mismatch {
  std::uint32_t index = 0;
  std::int64_t expected = 0;
  std::int64_t actual = 0;
  std::int64_t delta() const { return actual - expected; }
};

struct VerifyReport {
  bool match = false;
  std::vector<Mismatch> mismatches;
  std::vector<std::int64_t> output;
  TraceSummary stats;
};

VerifyReport verify(const GemvPlan& plan, const QuantizedMatrix& matrix, const ActivationVector& a, EncodingMode mode,
                    std::span<const ReliabilityProfile> profiles, TemplateStore& store, const ExecPolicy& policy = {});

}  // namespace mvdram
