#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mvdram {

/// Offset added to a signed q-bit value to obtain its unsigned code (0 when unsigned).
constexpr std::int64_t zero_point(unsigned bits, bool is_signed) { return is_signed ? (std::int64_t{1} << (bits - 1)) : 0; }

/// Integer M x N matrix of q_w-bit weights. Signed values are stored as offset codes
/// u = v + 2^(q_w-1), so every code lies in [0, 2^q_w).
class QuantizedMatrix {
 public:
  QuantizedMatrix() = default;
  static QuantizedMatrix from_values(std::uint32_t rows, std::uint32_t cols, unsigned bits, bool is_signed,
                                     std::vector<std::int32_t> values);
  static QuantizedMatrix random(std::uint32_t rows, std::uint32_t cols, unsigned bits, bool is_signed,
                                std::uint64_t seed);

  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }
  unsigned bits() const { return bits_; }
  bool is_signed() const { return signed_; }
  std::int64_t zero_point() const { return mvdram::zero_point(bits_, signed_); }

  std::int32_t value(std::uint32_t m, std::uint32_t n) const { return values_[std::size_t{m} * cols_ + n]; }
  std::uint32_t code(std::uint32_t m, std::uint32_t n) const {
    return static_cast<std::uint32_t>(value(m, n) + zero_point());
  }
  /// Sum of codes over the whole row.
  std::int64_t row_sum(std::uint32_t m) const { return row_sums_[m]; }
  /// Sum of codes over columns [n0, n1).
  std::int64_t row_sum(std::uint32_t m, std::uint32_t n0, std::uint32_t n1) const;
  std::span<const std::int32_t> values() const { return values_; }

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  unsigned bits_ = 1;
  bool signed_ = false;
  std::vector<std::int32_t> values_;
  std::vector<std::int64_t> row_sums_;
};

/// Length-N activation vector of q_a-bit integers with the same offset-code convention.
class ActivationVector {
 public:
  ActivationVector() = default;
  static ActivationVector from_values(unsigned bits, bool is_signed, std::vector<std::int32_t> values);
  /// Each code bit is set independently with probability 1 - sparsity.
  static ActivationVector random(std::uint32_t size, unsigned bits, bool is_signed, double sparsity,
                                 std::uint64_t seed);

  std::uint32_t size() const { return static_cast<std::uint32_t>(values_.size()); }
  unsigned bits() const { return bits_; }
  bool is_signed() const { return signed_; }
  std::int64_t zero_point() const { return mvdram::zero_point(bits_, signed_); }

  std::int32_t value(std::uint32_t j) const { return values_[j]; }
  std::uint32_t code(std::uint32_t j) const { return static_cast<std::uint32_t>(values_[j] + zero_point()); }
  bool bit(std::uint32_t j, unsigned plane) const { return (code(j) >> plane) & 1U; }
  std::int64_t code_sum(std::uint32_t n0, std::uint32_t n1) const;
  std::uint64_t popcount(std::uint32_t n0, std::uint32_t n1, unsigned plane) const;
  std::span<const std::int32_t> values() const { return values_; }

 private:
  unsigned bits_ = 1;
  bool signed_ = false;
  std::vector<std::int32_t> values_;
};

}  // namespace mvdram
