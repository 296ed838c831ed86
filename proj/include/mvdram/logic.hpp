#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "mvdram/trace.hpp"

namespace mvdram {

/// A bit held on two rows: `pos` holds b, `neg` holds NOT b.
struct DualTrackCell {
  RowIndex pos = 0;
  RowIndex neg = 0;
  friend bool operator==(const DualTrackCell&, const DualTrackCell&) = default;
};

/// Scratch rows consumed by one full adder (three per track).
inline constexpr std::size_t kAdderScratchRows = 6;

class TraceBuilder {
 public:
  explicit TraceBuilder(std::uint32_t subarray_id = 0) : trace_(subarray_id) {}

  void row_copy(RowIndex src, RowIndex dst) { trace_.push(RowCopy{src, dst}); }
  void maj(std::initializer_list<RowIndex> rows) { trace_.push(MajX(rows)); }
  void host_read(RowIndex row) { trace_.push(HostRead{row}); }
  void copy_cell(DualTrackCell src, DualTrackCell dst) {
    row_copy(src.pos, dst.pos);
    row_copy(src.neg, dst.neg);
  }

  const Trace& trace() const { return trace_; }
  std::size_t size() const { return trace_.size(); }
  Trace take() { return std::move(trace_); }

 private:
  Trace trace_;
};

/// Dual-track full adder: carry = MAJ3(x0,x1,x2), sum = MAJ5(x0,x1,x2,~carry,~carry).
/// Complements come from the same MAJ over complemented inputs (MAJ is self-dual), so no NOT
/// is ever issued. `out_sum` may be x0 itself (in-place accumulate); every other overlap between
/// inputs, outputs and scratch is an AllocationError. x1 and x2 are only read.
/// Emits 12 RowCopy + 4 MAJ (10 + 4 when in place).
void emit_full_adder(TraceBuilder& builder, DualTrackCell x0, DualTrackCell x1, DualTrackCell x2,
                     std::span<const RowIndex> scratch, DualTrackCell out_sum, DualTrackCell out_carry);

/// Structural state of an Accumulator. Known at trace-build time, independent of cell values.
struct AccumulatorState {
  std::uint64_t live = 0;      // bit t: level t's own cell may hold a 1
  std::uint64_t partners = 0;  // 2 bits per level: 1 + index of the partner cell parked there, 0 if none
  std::uint64_t bound = 0;     // upper bound on the counter value
  friend auto operator<=>(const AccumulatorState&, const AccumulatorState&) = default;
};

/// In-DRAM unsigned carry-save counter of r dual-track levels (level t weighs 2^t).
///
/// A level holds zero, one or two cells: its own cell plus, optionally, one borrowed from a
/// small shared partner pool. A bit arriving at a level holding two cells triggers an in-place
/// full adder whose carry moves up one level, so each input costs about one adder. When the pool
/// is exhausted a level falls back to an in-place half adder. Carries that the value bound proves
/// zero are discarded instead of marking a new level.
class Accumulator {
 public:
  Accumulator(std::vector<DualTrackCell> levels, std::vector<DualTrackCell> partners, DualTrackCell zero,
              std::array<DualTrackCell, 2> transit, std::vector<RowIndex> scratch, AccumulatorState state = {});

  std::size_t width() const { return levels_.size(); }
  const DualTrackCell& level(std::size_t t) const { return levels_[t]; }
  bool live(std::size_t t) const { return (state_.live >> t) & 1U; }
  /// Partner cell index parked at level t, or -1.
  int partner_at(std::size_t t) const { return static_cast<int>((state_.partners >> (2 * t)) & 3U) - 1; }
  const AccumulatorState& state() const { return state_; }

  /// Where the next input added at `level` should be staged to avoid an extra move.
  DualTrackCell staging_cell(unsigned level) const;
  /// cell must be staging_cell(level) or lie outside every row this accumulator owns.
  void add(TraceBuilder& builder, DualTrackCell cell, unsigned level);
  /// Folds parked partners into their levels so each level is a single cell.
  void flush(TraceBuilder& builder, std::size_t below = 64);
  /// flush, then copy the zero row into the pos row of each known-zero level so the pos rows
  /// spell the value.
  void finalize(TraceBuilder& builder);
  /// Loads the zero cell into every level and marks all of them live. Later decisions then
  /// depend only on the value bound, which keeps the cost monotone in the input count.
  void clear_outputs(TraceBuilder& builder);

 private:
  int free_partner() const;
  void park(std::size_t t, int partner);
  void unpark(std::size_t t);
  /// Destination of a carry out of level t (t+1 may take it directly); sets `settled` if no
  /// further rippling is needed.
  DualTrackCell carry_target(std::size_t t, DualTrackCell avoid, bool& settled);
  void insert(TraceBuilder& builder, DualTrackCell cell, std::size_t t);

  std::vector<DualTrackCell> levels_;
  std::vector<DualTrackCell> partners_;
  DualTrackCell zero_;
  std::array<DualTrackCell, 2> transit_;
  std::vector<RowIndex> scratch_;
  AccumulatorState state_;
};

/// Adds 2^shift * (number of set inputs) to acc in every column. Throws PlanError when
/// acc.width() < shift + ceil(log2(|inputs|+1)) + 1 or the structural counter would overflow.
void emit_popcount_accumulate(TraceBuilder& builder, std::span<const DualTrackCell> inputs, unsigned shift,
                              Accumulator& acc);

unsigned ceil_log2(std::uint64_t n);

}  // namespace mvdram
