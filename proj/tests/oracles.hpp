// Test-only oracles and generators. Nothing here is used by the library.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mvdram/bitvector.hpp"
#include "mvdram/layout.hpp"
#include "mvdram/quant.hpp"
#include "mvdram/subarray.hpp"

namespace oracle {

/// Hand-rolled generator over raw mt19937_64 output.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t next() { return rng_(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  bool coin(double p = 0.5) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  mvdram::BitVector bits(std::size_t n) {
    mvdram::BitVector b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, coin());
    return b;
  }

 private:
  std::mt19937_64 rng_;
};

inline bool majority(const std::vector<bool>& in) {
  std::size_t ones = 0;
  for (bool b : in) ones += b;
  return 2 * ones > in.size();
}

/// o_m = sum_j w[m][j] * a[j] on signed values.
inline std::vector<std::int64_t> gemv(const mvdram::QuantizedMatrix& w, const mvdram::ActivationVector& a) {
  std::vector<std::int64_t> out(w.rows(), 0);
  const auto vals = w.values();
  for (std::uint32_t m = 0; m < w.rows(); ++m) {
    for (std::uint32_t j = 0; j < w.cols(); ++j) out[m] += std::int64_t{vals[std::size_t{m} * w.cols() + j]} * a.values()[j];
  }
  return out;
}

/// Counter value of a stack of pos rows in one column.
inline std::uint64_t column_value(const mvdram::Subarray& s, const std::vector<mvdram::RowIndex>& rows,
                                  mvdram::ColumnIndex c) {
  std::uint64_t v = 0;
  for (std::size_t t = 0; t < rows.size(); ++t) v |= std::uint64_t{s.read_bit(rows[t], c)} << t;
  return v;
}

/// Conventional read-out: gather each bit-plane column's r bits into an integer (a transpose),
/// then combine planes.
inline std::vector<std::uint64_t> transposing_read(const mvdram::TileAssignment& tile, unsigned q_w,
                                                   const mvdram::Subarray& s) {
  const auto& rows = tile.region_map.output_rows;
  std::vector<std::uint64_t> out(tile.m_count(), 0);
  for (std::uint32_t m = 0; m < tile.m_count(); ++m) {
    for (unsigned i = 0; i < q_w; ++i) {
      const std::uint64_t plane_sum = column_value(s, rows, tile.group_starts[m] + i);
      out[m] += plane_sum << i;
    }
  }
  return out;
}

}  // namespace oracle
