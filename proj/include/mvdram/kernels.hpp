#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace mvdram::kernels {

enum class Policy : std::uint8_t {
  Reference,  // per-column bit loop, the literal definition
  Serial,     // bit-sliced, one thread
  Parallel,   // bit-sliced, OpenMP over words
};

/// Minimum row width (in words) before the parallel kernel forks threads.
inline constexpr std::size_t kParallelWordThreshold = 2048;

/// out[c] = majority of rows[*][c] for every column c < columns. rows.size() must be odd.
void majority_reference(std::span<const std::uint64_t* const> rows, std::size_t columns, std::uint64_t* out);
void majority_serial(std::span<const std::uint64_t* const> rows, std::size_t words, std::uint64_t* out);
void majority_parallel(std::span<const std::uint64_t* const> rows, std::size_t words, std::uint64_t* out);

void majority(Policy policy, std::span<const std::uint64_t* const> rows, std::size_t columns, std::uint64_t* out);

void copy_words(Policy policy, const std::uint64_t* src, std::size_t words, std::uint64_t* dst);

}  // namespace mvdram::kernels
