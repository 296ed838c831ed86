#include "mvdram/quant.hpp"

#include <numeric>
#include <random>
#include <string>

#include "mvdram/errors.hpp"

namespace mvdram {

namespace {

void check_bits(unsigned bits) {
  if (bits < 1 || bits > 8) throw ConfigError("bit width " + std::to_string(bits) + " outside 1-8");
}

void check_range(std::int32_t v, unsigned bits, bool is_signed) {
  const std::int64_t lo = is_signed ? -(std::int64_t{1} << (bits - 1)) : 0;
  const std::int64_t hi = is_signed ? (std::int64_t{1} << (bits - 1)) - 1 : (std::int64_t{1} << bits) - 1;
  if (v < lo || v > hi) {
    throw ConfigError("value " + std::to_string(v) + " outside " + (is_signed ? "signed " : "unsigned ") +
                      std::to_string(bits) + "-bit range");
  }
}

// Portable: only raw mt19937_64 output is used (distributions are implementation-defined).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

QuantizedMatrix QuantizedMatrix::from_values(std::uint32_t rows, std::uint32_t cols, unsigned bits, bool is_signed,
                                             std::vector<std::int32_t> values) {
  check_bits(bits);
  if (rows < 1 || cols < 1) throw ConfigError("matrix dimensions must be >= 1");
  if (values.size() != std::size_t{rows} * cols) {
    throw ConfigError("matrix has " + std::to_string(values.size()) + " values, expected " +
                      std::to_string(std::size_t{rows} * cols));
  }
  QuantizedMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.bits_ = bits;
  m.signed_ = is_signed;
  m.values_ = std::move(values);
  m.row_sums_.assign(rows, 0);
  const std::int64_t z = m.zero_point();
  for (std::uint32_t r = 0; r < rows; ++r) {
    std::int64_t s = 0;
    for (std::uint32_t c = 0; c < cols; ++c) {
      const auto v = m.values_[std::size_t{r} * cols + c];
      check_range(v, bits, is_signed);
      s += v + z;
    }
    m.row_sums_[r] = s;
  }
  return m;
}

QuantizedMatrix QuantizedMatrix::random(std::uint32_t rows, std::uint32_t cols, unsigned bits, bool is_signed,
                                        std::uint64_t seed) {
  check_bits(bits);
  std::mt19937_64 rng(seed);
  std::vector<std::int32_t> values(std::size_t{rows} * cols);
  const std::int64_t z = mvdram::zero_point(bits, is_signed);
  for (auto& v : values) v = static_cast<std::int32_t>(static_cast<std::int64_t>(rng() >> (64 - bits)) - z);
  return from_values(rows, cols, bits, is_signed, std::move(values));
}

std::int64_t QuantizedMatrix::row_sum(std::uint32_t m, std::uint32_t n0, std::uint32_t n1) const {
  std::int64_t s = 0;
  for (std::uint32_t n = n0; n < n1; ++n) s += code(m, n);
  return s;
}

ActivationVector ActivationVector::from_values(unsigned bits, bool is_signed, std::vector<std::int32_t> values) {
  check_bits(bits);
  if (values.empty()) throw ConfigError("activation vector must be non-empty");
  for (auto v : values) check_range(v, bits, is_signed);
  ActivationVector a;
  a.bits_ = bits;
  a.signed_ = is_signed;
  a.values_ = std::move(values);
  return a;
}

ActivationVector ActivationVector::random(std::uint32_t size, unsigned bits, bool is_signed, double sparsity,
                                          std::uint64_t seed) {
  check_bits(bits);
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw ConfigError("sparsity must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  const double density = 1.0 - sparsity;
  const std::int64_t z = mvdram::zero_point(bits, is_signed);
  std::vector<std::int32_t> values(size);
  for (auto& v : values) {
    std::int64_t code = 0;
    for (unsigned b = 0; b < bits; ++b) {
      if (unit(rng) < density) code |= std::int64_t{1} << b;
    }
    v = static_cast<std::int32_t>(code - z);
  }
  return from_values(bits, is_signed, std::move(values));
}

std::int64_t ActivationVector::code_sum(std::uint32_t n0, std::uint32_t n1) const {
  std::int64_t s = 0;
  for (std::uint32_t j = n0; j < n1; ++j) s += code(j);
  return s;
}

std::uint64_t ActivationVector::popcount(std::uint32_t n0, std::uint32_t n1, unsigned plane) const {
  std::uint64_t s = 0;
  for (std::uint32_t j = n0; j < n1; ++j) s += bit(j, plane);
  return s;
}

}  // namespace mvdram
