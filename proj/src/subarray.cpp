#include "mvdram/subarray.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "mvdram/errors.hpp"
#include "mvdram/hash.hpp"

namespace mvdram {

void SubarrayGeometry::validate() const {
  if (row_count < kMinRows || row_count > kMaxRows) {
    throw ConfigError("row_count " + std::to_string(row_count) + " outside " + std::to_string(kMinRows) + "-" +
                      std::to_string(kMaxRows));
  }
  if (column_count < 1) throw ConfigError("column_count must be >= 1");
}

Subarray::Subarray(SubarrayGeometry geometry, ReliabilityProfile reliability, kernels::Policy policy)
    : geometry_(geometry), reliability_(std::move(reliability)), policy_(policy) {
  geometry_.validate();
  if (reliability_.column_count() != geometry_.column_count) {
    throw ConfigError("reliability mask has " + std::to_string(reliability_.column_count()) +
                      " columns, geometry has " + std::to_string(geometry_.column_count));
  }
  words_ = geometry_.words_per_row();
  cells_.assign(words_ * geometry_.row_count, 0);
  result_.assign(words_, 0);
  unreliable_ = reliability_.unreliable_columns();
}

void Subarray::check_row(RowIndex row) const {
  if (row >= geometry_.row_count) {
    throw AddressError("row " + std::to_string(row) + " out of range (row_count " +
                       std::to_string(geometry_.row_count) + ")");
  }
}

void Subarray::write_row(RowIndex row, const BitVector& bits) {
  check_row(row);
  if (bits.size() != geometry_.column_count) {
    throw ConfigError("row write of " + std::to_string(bits.size()) + " bits into " +
                      std::to_string(geometry_.column_count) + " columns");
  }
  std::copy(bits.words().begin(), bits.words().end(), row_ptr(row));
}

BitVector Subarray::read_row(RowIndex row) const {
  check_row(row);
  return BitVector(geometry_.column_count, row_words(row));
}

bool Subarray::read_bit(RowIndex row, ColumnIndex column) const {
  check_row(row);
  if (column >= geometry_.column_count) throw AddressError("column " + std::to_string(column) + " out of range");
  return (row_ptr(row)[column / kWordBits] >> (column % kWordBits)) & 1U;
}

std::span<const std::uint64_t> Subarray::row_words(RowIndex row) const {
  check_row(row);
  return {row_ptr(row), words_};
}

void Subarray::row_copy(RowIndex src, RowIndex dst) {
  check_row(src);
  check_row(dst);
  ++commands_applied_;
  if (src == dst) {
    ++warnings_;
    return;
  }
  kernels::copy_words(policy_, row_ptr(src), words_, row_ptr(dst));
}

bool Subarray::faulty_bit(ColumnIndex column, bool majority) const {
  switch (reliability_.fault_mode) {
    case FaultMode::StuckRandom:
      return mix3(reliability_.fault_seed, column, 0x57C0) & 1U;
    case FaultMode::Flip:
      return majority ^ static_cast<bool>(mix3(reliability_.fault_seed, column, maj_ordinal_) & 1U);
  }
  return majority;
}

void Subarray::maj(std::span<const RowIndex> rows) {
  if (rows.size() < kMinMajRows || rows.size() > kMaxMajRows || rows.size() % 2 == 0) {
    throw GroupError("MAJ group of size " + std::to_string(rows.size()) + " (must be odd, 3-15)");
  }
  std::array<const std::uint64_t*, kMaxMajRows> inputs{};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_row(rows[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (rows[j] == rows[i]) throw GroupError("MAJ group repeats row " + std::to_string(rows[i]));
    }
    inputs[i] = row_ptr(rows[i]);
  }

  kernels::majority(policy_, std::span<const std::uint64_t* const>(inputs.data(), rows.size()),
                    geometry_.column_count, result_.data());
  for (const ColumnIndex c : unreliable_) {
    auto& word = result_[c / kWordBits];
    const std::uint64_t mask = std::uint64_t{1} << (c % kWordBits);
    if (faulty_bit(c, (word & mask) != 0)) {
      word |= mask;
    } else {
      word &= ~mask;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    kernels::copy_words(policy_, result_.data(), words_, row_ptr(rows[i]));
  }
  ++maj_ordinal_;
  ++commands_applied_;
}

}  // namespace mvdram
