#include "mvdram/logic.hpp"

#include <algorithm>
#include <string>

#include "mvdram/errors.hpp"

namespace mvdram {

unsigned ceil_log2(std::uint64_t n) {
  unsigned bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

namespace {

struct Claim {
  RowIndex row;
  const char* role;
};

void require_disjoint(std::span<const Claim> claims) {
  for (std::size_t i = 0; i < claims.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (claims[i].row == claims[j].row) {
        throw AllocationError("full adder: row " + std::to_string(claims[i].row) + " used as both " +
                              claims[j].role + " and " + claims[i].role);
      }
    }
  }
}

}  // namespace

void emit_full_adder(TraceBuilder& builder, DualTrackCell x0, DualTrackCell x1, DualTrackCell x2,
                     std::span<const RowIndex> scratch, DualTrackCell out_sum, DualTrackCell out_carry) {
  if (scratch.size() < kAdderScratchRows) {
    throw AllocationError("full adder needs " + std::to_string(kAdderScratchRows) + " scratch rows, got " +
                          std::to_string(scratch.size()));
  }
  const bool in_place = out_sum == x0;

  std::vector<Claim> owned = {{out_sum.pos, "sum"}, {out_sum.neg, "~sum"}, {out_carry.pos, "carry"},
                              {out_carry.neg, "~carry"}};
  for (std::size_t i = 0; i < kAdderScratchRows; ++i) owned.push_back({scratch[i], "scratch"});
  require_disjoint(owned);

  // Inputs may repeat among themselves (they are only read) but must stay clear of what gets written.
  std::vector<Claim> inputs = {{x1.pos, "x1"}, {x1.neg, "~x1"}, {x2.pos, "x2"}, {x2.neg, "~x2"}};
  if (!in_place) {
    inputs.push_back({x0.pos, "x0"});
    inputs.push_back({x0.neg, "~x0"});
  }
  for (const auto& cell : {x0, x1, x2}) {
    if (cell.pos == cell.neg) throw AllocationError("full adder: cell uses row " + std::to_string(cell.pos) + " twice");
  }
  for (const auto& in : inputs) {
    for (const auto& o : owned) {
      if (in.row == o.row) {
        throw AllocationError("full adder: input row " + std::to_string(in.row) + " (" + in.role +
                              ") collides with " + o.role);
      }
    }
  }
  if (in_place) {
    for (std::size_t i = 2; i < owned.size(); ++i) {
      if (owned[i].row == x0.pos || owned[i].row == x0.neg) {
        throw AllocationError("full adder: in-place operand collides with " + std::string(owned[i].role));
      }
    }
  }

  const RowIndex a = scratch[0], b = scratch[1], c = scratch[2], d = scratch[3], e = scratch[4], f = scratch[5];

  // carry and ~carry; a,b now hold carry and c,d hold ~carry.
  builder.row_copy(x0.pos, out_carry.pos);
  builder.row_copy(x1.pos, a);
  builder.row_copy(x2.pos, b);
  builder.maj({out_carry.pos, a, b});
  builder.row_copy(x0.neg, out_carry.neg);
  builder.row_copy(x1.neg, c);
  builder.row_copy(x2.neg, d);
  builder.maj({out_carry.neg, c, d});

  // sum = MAJ5(x0,x1,x2,~carry,~carry); ~sum = MAJ5(~x0,~x1,~x2,carry,carry).
  if (!in_place) builder.row_copy(x0.pos, out_sum.pos);
  builder.row_copy(x1.pos, e);
  builder.row_copy(x2.pos, f);
  builder.maj({out_sum.pos, e, f, c, d});
  if (!in_place) builder.row_copy(x0.neg, out_sum.neg);
  builder.row_copy(x1.neg, e);
  builder.row_copy(x2.neg, f);
  builder.maj({out_sum.neg, e, f, a, b});
}

Accumulator::Accumulator(std::vector<DualTrackCell> levels, std::vector<DualTrackCell> partners, DualTrackCell zero,
                         std::array<DualTrackCell, 2> transit, std::vector<RowIndex> scratch, AccumulatorState state)
    : levels_(std::move(levels)),
      partners_(std::move(partners)),
      zero_(zero),
      transit_(transit),
      scratch_(std::move(scratch)),
      state_(state) {
  if (levels_.empty() || levels_.size() > 32) throw PlanError("accumulator width must be 1-32");
  if (partners_.size() > 3) throw PlanError("at most 3 partner cells");
  if (scratch_.size() < kAdderScratchRows) throw AllocationError("accumulator needs 6 scratch rows");
}

int Accumulator::free_partner() const {
  for (int p = 0; p < static_cast<int>(partners_.size()); ++p) {
    bool used = false;
    for (std::size_t t = 0; t < levels_.size() && !used; ++t) used = partner_at(t) == p;
    if (!used) return p;
  }
  return -1;
}

void Accumulator::park(std::size_t t, int partner) {
  state_.partners |= static_cast<std::uint64_t>(partner + 1) << (2 * t);
}

void Accumulator::unpark(std::size_t t) { state_.partners &= ~(std::uint64_t{3} << (2 * t)); }

DualTrackCell Accumulator::staging_cell(unsigned level) const {
  if (level < levels_.size()) {
    if (!live(level)) return levels_[level];
    if (partner_at(level) < 0) {
      if (const int p = free_partner(); p >= 0) return partners_[p];
    }
  }
  return transit_[0];
}

DualTrackCell Accumulator::carry_target(std::size_t t, DualTrackCell avoid, bool& settled) {
  const DualTrackCell spare = avoid == transit_[0] ? transit_[1] : transit_[0];
  const std::size_t next = t + 1;
  settled = true;
  // A carry out of level t implies a value >= 2^(t+1).
  if (next >= 64 || state_.bound < (std::uint64_t{1} << next)) return spare;
  if (next >= levels_.size()) {
    throw PlanError("accumulator overflow: carry out of level " + std::to_string(t) + " (width " +
                    std::to_string(levels_.size()) + ")");
  }
  if (!live(next)) {
    state_.live |= std::uint64_t{1} << next;
    return levels_[next];
  }
  if (partner_at(next) < 0) {
    if (const int p = free_partner(); p >= 0) {
      park(next, p);
      return partners_[p];
    }
  }
  settled = false;
  return spare;
}

void Accumulator::insert(TraceBuilder& builder, DualTrackCell cell, std::size_t t) {
  for (;;) {
    if (!live(t)) {
      if (cell != levels_[t]) builder.copy_cell(cell, levels_[t]);
      state_.live |= std::uint64_t{1} << t;
      return;
    }
    bool settled = false;
    DualTrackCell carry;
    if (const int p = partner_at(t); p >= 0) {
      carry = carry_target(t, cell, settled);
      emit_full_adder(builder, levels_[t], partners_[p], cell, scratch_, levels_[t], carry);
      unpark(t);
    } else if (const int q = free_partner(); q >= 0) {
      if (cell != partners_[q]) builder.copy_cell(cell, partners_[q]);
      park(t, q);
      return;
    } else {
      carry = carry_target(t, cell, settled);
      emit_full_adder(builder, levels_[t], cell, zero_, scratch_, levels_[t], carry);
    }
    if (settled) return;
    cell = carry;
    ++t;
  }
}

void Accumulator::add(TraceBuilder& builder, DualTrackCell cell, unsigned level) {
  if (level >= levels_.size() || level >= 63) {
    throw PlanError("accumulator overflow: level " + std::to_string(level) + " >= width " +
                    std::to_string(levels_.size()));
  }
  state_.bound += std::uint64_t{1} << level;
  if (levels_.size() < 64 && state_.bound >= (std::uint64_t{1} << levels_.size())) {
    throw PlanError("accumulator overflow: value bound " + std::to_string(state_.bound) + " needs more than " +
                    std::to_string(levels_.size()) + " levels");
  }
  insert(builder, cell, level);
}

void Accumulator::flush(TraceBuilder& builder, std::size_t below) {
  for (std::size_t t = 0; t < std::min(below, levels_.size()); ++t) {
    const int p = partner_at(t);
    if (p < 0) continue;
    bool settled = false;
    const DualTrackCell carry = carry_target(t, transit_[1], settled);
    emit_full_adder(builder, levels_[t], partners_[p], zero_, scratch_, levels_[t], carry);
    unpark(t);
    if (!settled) insert(builder, carry, t + 1);
  }
}

void Accumulator::finalize(TraceBuilder& builder) {
  flush(builder);
  for (std::size_t t = 0; t < levels_.size(); ++t) {
    if (!live(t)) builder.row_copy(zero_.pos, levels_[t].pos);
  }
}

void Accumulator::clear_outputs(TraceBuilder& builder) {
  for (const auto& level : levels_) builder.copy_cell(zero_, level);
  state_.live = levels_.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << levels_.size()) - 1;
}

void emit_popcount_accumulate(TraceBuilder& builder, std::span<const DualTrackCell> inputs, unsigned shift,
                              Accumulator& acc) {
  if (inputs.empty()) return;
  const std::size_t needed = shift + ceil_log2(inputs.size() + 1) + 1;
  if (acc.width() < needed) {
    throw PlanError("accumulator width " + std::to_string(acc.width()) + " < " + std::to_string(needed) +
                    " needed for " + std::to_string(inputs.size()) + " inputs at shift " + std::to_string(shift));
  }
  for (const auto& cell : inputs) acc.add(builder, cell, shift);
}

}  // namespace mvdram
