#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvdram/bitvector.hpp"
#include "mvdram/kernels.hpp"
#include "mvdram/reliability.hpp"

namespace mvdram {

inline constexpr std::uint32_t kMinRows = 256;
inline constexpr std::uint32_t kMaxRows = 1024;
inline constexpr std::size_t kMinMajRows = 3;
inline constexpr std::size_t kMaxMajRows = 15;

struct SubarrayGeometry {
  std::uint32_t row_count = 512;
  std::uint32_t column_count = 65536;

  void validate() const;
  std::size_t words_per_row() const { return words_for_bits(column_count); }
  std::uint64_t cells() const { return std::uint64_t{row_count} * column_count; }
  friend bool operator==(const SubarrayGeometry&, const SubarrayGeometry&) = default;
};

/// Bit grid with the RowCopy and MAJ-X primitives.
///
/// RowCopy is fault-free on every column. MAJ writes the column majority back into every
/// activated row; on columns the profile marks unreliable the written bit is instead a
/// deterministic function of (fault_seed, column, MAJ ordinal) per the profile's fault mode.
/// Activated row groups may be any distinct odd-sized set of 3..15 rows in this subarray,
/// an idealization of real co-activation constraints.
class Subarray {
 public:
  Subarray(SubarrayGeometry geometry, ReliabilityProfile reliability,
           kernels::Policy policy = kernels::Policy::Serial);

  const SubarrayGeometry& geometry() const { return geometry_; }
  const ReliabilityProfile& reliability() const { return reliability_; }

  void write_row(RowIndex row, const BitVector& bits);
  BitVector read_row(RowIndex row) const;
  bool read_bit(RowIndex row, ColumnIndex column) const;
  std::span<const std::uint64_t> row_words(RowIndex row) const;

  /// src == dst is a counted no-op warning.
  void row_copy(RowIndex src, RowIndex dst);
  void maj(std::span<const RowIndex> rows);

  std::uint64_t maj_ordinal() const { return maj_ordinal_; }
  std::uint64_t commands_applied() const { return commands_applied_; }
  std::uint64_t warnings() const { return warnings_; }

  void set_policy(kernels::Policy policy) { policy_ = policy; }

  bool same_cells(const Subarray& other) const { return cells_ == other.cells_; }

 private:
  void check_row(RowIndex row) const;
  std::uint64_t* row_ptr(RowIndex row) { return cells_.data() + std::size_t{row} * words_; }
  const std::uint64_t* row_ptr(RowIndex row) const { return cells_.data() + std::size_t{row} * words_; }
  bool faulty_bit(ColumnIndex column, bool majority) const;

  SubarrayGeometry geometry_;
  ReliabilityProfile reliability_;
  kernels::Policy policy_;
  std::size_t words_;
  std::vector<std::uint64_t> cells_;
  std::vector<ColumnIndex> unreliable_;
  std::vector<std::uint64_t> result_;
  std::uint64_t maj_ordinal_ = 0;
  std::uint64_t commands_applied_ = 0;
  std::uint64_t warnings_ = 0;
};

}  // namespace mvdram
