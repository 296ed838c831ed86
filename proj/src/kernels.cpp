#include "mvdram/kernels.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "mvdram/bitvector.hpp"

namespace mvdram::kernels {

namespace {

inline std::uint64_t maj3_word(std::uint64_t a, std::uint64_t b, std::uint64_t c) { return (a & b) | (a & c) | (b & c); }

// 5-bit sliced counter preloaded with 16 - threshold; bit 4 ends up set iff count >= threshold.
inline std::uint64_t majn_word(std::span<const std::uint64_t* const> rows, std::size_t w) {
  const unsigned threshold = static_cast<unsigned>(rows.size() + 1) / 2;
  const unsigned bias = 16 - threshold;
  std::array<std::uint64_t, 5> counter{};
  for (unsigned b = 0; b < 5; ++b) counter[b] = ((bias >> b) & 1U) ? ~std::uint64_t{0} : 0;
  for (const auto* row : rows) {
    std::uint64_t carry = row[w];
    for (unsigned b = 0; b < 5 && carry != 0; ++b) {
      const std::uint64_t t = counter[b] & carry;
      counter[b] ^= carry;
      carry = t;
    }
  }
  return counter[4];
}

inline std::uint64_t tail_mask(std::size_t columns) {
  return columns % kWordBits == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (columns % kWordBits)) - 1;
}

}  // namespace

void majority_reference(std::span<const std::uint64_t* const> rows, std::size_t columns, std::uint64_t* out) {
  std::fill(out, out + words_for_bits(columns), 0);
  for (std::size_t c = 0; c < columns; ++c) {
    std::size_t ones = 0;
    for (const auto* row : rows) ones += (row[c / kWordBits] >> (c % kWordBits)) & 1U;
    if (2 * ones > rows.size()) out[c / kWordBits] |= std::uint64_t{1} << (c % kWordBits);
  }
}

void majority_serial(std::span<const std::uint64_t* const> rows, std::size_t words, std::uint64_t* out) {
  if (rows.size() == 3) {
    const auto *a = rows[0], *b = rows[1], *c = rows[2];
    for (std::size_t w = 0; w < words; ++w) out[w] = maj3_word(a[w], b[w], c[w]);
    return;
  }
  for (std::size_t w = 0; w < words; ++w) out[w] = majn_word(rows, w);
}

void majority_parallel(std::span<const std::uint64_t* const> rows, std::size_t words, std::uint64_t* out) {
  const auto n = static_cast<std::ptrdiff_t>(words);
  if (rows.size() == 3) {
    const auto *a = rows[0], *b = rows[1], *c = rows[2];
#pragma omp parallel for schedule(static) if (words >= kParallelWordThreshold)
    for (std::ptrdiff_t w = 0; w < n; ++w) out[w] = maj3_word(a[w], b[w], c[w]);
    return;
  }
#pragma omp parallel for schedule(static) if (words >= kParallelWordThreshold)
  for (std::ptrdiff_t w = 0; w < n; ++w) out[w] = majn_word(rows, static_cast<std::size_t>(w));
}

void majority(Policy policy, std::span<const std::uint64_t* const> rows, std::size_t columns, std::uint64_t* out) {
  const std::size_t words = words_for_bits(columns);
  switch (policy) {
    case Policy::Reference:
      majority_reference(rows, columns, out);
      return;
    case Policy::Serial:
      majority_serial(rows, words, out);
      break;
    case Policy::Parallel:
      majority_parallel(rows, words, out);
      break;
  }
  if (words > 0) out[words - 1] &= tail_mask(columns);
}

void copy_words(Policy policy, const std::uint64_t* src, std::size_t words, std::uint64_t* dst) {
  if (policy != Policy::Parallel || words < kParallelWordThreshold) {
    std::memcpy(dst, src, words * sizeof(std::uint64_t));
    return;
  }
  const auto n = static_cast<std::ptrdiff_t>(words);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t w = 0; w < n; ++w) dst[w] = src[w];
}

}  // namespace mvdram::kernels
